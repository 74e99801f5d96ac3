#pragma once

#include <array>
#include <cmath>

#include "qtraj/cx.hpp"
#include "qtraj/cxfun/ppow.hpp"
#include "qtraj/errors.hpp"

namespace qtraj::cxfun {

namespace detail {

// Lanczos approximation, g = 7, 9 coefficients.  Good for ~15 significant
// digits over the half-plane Re(z) >= 0.5, which is all the reflection
// step below ever feeds it.
inline constexpr std::array<double, 9> lanczos_coeff = {
    0.99999999999980993,
    676.5203681218851,
    -1259.1392167224028,
    771.32342877765313,
    -176.61502916214059,
    12.507343278686905,
    -0.13857109526572012,
    9.9843695780195716e-6,
    1.5056327351493116e-7,
};

// e^z - 1 without cancellation for small |z|.
inline Cx expm1_cx(Cx z) {
    const double em = std::expm1(z.real());
    const double cy = std::cos(z.imag());
    const double sy = std::sin(z.imag());
    // e^x cos y - 1 = expm1(x) cos y - 2 sin^2(y/2)
    const double hy = std::sin(z.imag() / 2.0);
    return {em * cy - 2.0 * hy * hy, (em + 1.0) * sy};
}

// log(sin(pi z)) evaluated without overflowing for large |Im z| and
// without cancellation near the zeros of the sine.  Re(z) is first
// reduced by its nearest integer m -- an exact operation in floating
// point -- so sin(pi z) = (-1)^m sin(pi zr) with zr genuinely small when
// z sits near an integer (the nudged-degenerate hypergeometric path
// lands exactly there).  The result may differ from the principal value
// by a multiple of 2*pi*i, which is harmless because every consumer
// exponentiates ratios of log-gammas.
inline Cx log_sin_pi(Cx z) {
    const double m = std::round(z.real());
    const Cx zr = z - m;
    constexpr double ln2 = 0.6931471805599453;

    Cx ls;
    if (std::abs(zr.imag()) > 0.25) {
        // factor out the exponentially dominant half of the sine
        const Cx ipz = iu * pi * zr;
        if (zr.imag() >= 0.0)
            ls = -ipz + std::log(-expm1_cx(2.0 * ipz)) - ln2 + iu * (pi / 2.0);
        else
            ls = ipz + std::log(-expm1_cx(-2.0 * ipz)) - ln2 - iu * (pi / 2.0);
    } else {
        // near the real axis |sin| stays bounded and zr is exact, so the
        // direct form keeps full relative accuracy down to zr -> 0
        ls = std::log(std::sin(pi * zr));
    }
    return ls + iu * (pi * m);
}

}  // namespace detail

// Complex log-gamma.  Continuous on Re(z) >= 0.5 (principal values there);
// for Re(z) < 0.5 the reflection formula is used and the imaginary part is
// only defined modulo 2*pi.  Arguments within 1e-12 of a pole are rejected.
inline Cx lgamma_cx(Cx z) {
    if (near_gamma_pole(z, 1e-12))
        throw Error("lgamma_cx: argument at or near a gamma pole");

    if (z.real() < 0.5) {
        // log Gamma(z) = log pi - log sin(pi z) - log Gamma(1 - z)
        constexpr double log_pi = 1.1447298858494002;
        return log_pi - detail::log_sin_pi(z) - lgamma_cx(1.0 - z);
    }

    Cx acc = detail::lanczos_coeff[0];
    for (int k = 1; k < 9; ++k)
        acc += detail::lanczos_coeff[k] / (z - 1.0 + static_cast<double>(k));

    const Cx t = z + 6.5;  // z - 1 + g + 1/2
    constexpr double half_log_2pi = 0.9189385332046727;
    return half_log_2pi + (z - 0.5) * std::log(t) - t + std::log(acc);
}

// exp(sum lgamma(num) - sum lgamma(den)) with the usual convention that a
// pole in a denominator argument annihilates the whole ratio (1/Gamma is
// entire).  A pole in a numerator argument is a caller bug here: the
// hypergeometric layer screens those as degenerate-parameter cases first.
template <std::size_t N, std::size_t D>
Cx gamma_ratio(const std::array<Cx, N>& num, const std::array<Cx, D>& den) {
    Cx acc = 0.0;
    for (const Cx& d : den) {
        if (near_gamma_pole(d, 1e-12))
            return Cx(0.0);
        acc -= lgamma_cx(d);
    }
    for (const Cx& n : num)
        acc += lgamma_cx(n);
    return std::exp(acc);
}

}  // namespace qtraj::cxfun
