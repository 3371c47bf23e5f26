#pragma once

#include <numbers>

// CODATA 2018 exact / recommended values. Atomic line data lives in data/, not here.
namespace aotx::constants {

inline constexpr double pi = std::numbers::pi;
inline constexpr double c = 299792458.0;              // m/s
inline constexpr double h = 6.62607015e-34;           // J s
inline constexpr double hbar = h / (2.0 * pi);        // J s
inline constexpr double epsilon0 = 8.8541878128e-12;  // F/m
inline constexpr double kB = 1.380649e-23;            // J/K

}  // namespace aotx::constants
