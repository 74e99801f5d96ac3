#pragma once

#include <cmath>
#include <complex>
#include <limits>

namespace qtraj {

using Cx = std::complex<double>;

inline constexpr double pi = 3.141592653589793238462643383279502884;
inline constexpr Cx iu{0.0, 1.0};

inline bool is_finite(Cx z) {
    return std::isfinite(z.real()) && std::isfinite(z.imag());
}

inline double abs2(Cx z) {
    return z.real() * z.real() + z.imag() * z.imag();
}

// Distance from x to the nearest integer, used for gamma-pole and
// degenerate-parameter detection.
inline double dist_to_integer(double x) {
    return std::abs(x - std::round(x));
}

inline bool near_integer(Cx z, double tol) {
    return std::abs(z.imag()) < tol && dist_to_integer(z.real()) < tol;
}

// True when z sits within tol of a non-positive integer (a gamma pole).
inline bool near_gamma_pole(Cx z, double tol) {
    return near_integer(z, tol) && std::round(z.real()) <= 0.0;
}

}  // namespace qtraj
