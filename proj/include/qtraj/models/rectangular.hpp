#pragma once

#include <array>
#include <cmath>

#include "qtraj/cx.hpp"
#include "qtraj/errors.hpp"
#include "qtraj/models/barrier.hpp"
#include "qtraj/models/wavesample.hpp"

namespace qtraj::models {

// Matched amplitudes of the rectangular-barrier eigenstate with unit
// incident amplitude:
//   x < -a      A e^{ikx} + B e^{-ikx}
//   |x| <= a    C e^{-kappa x} + D e^{kappa x}   (C + D x at E = V0)
//   x > a       F e^{ikx}
struct RectCoefficients {
    double E = 0.0;
    double k = 0.0;
    Cx kappa{};
    bool linear_middle = false;  // E = V0 degenerate branch in region II
    Cx A{1.0}, B{}, C{}, D{}, F{};
};

namespace detail {

// Gaussian elimination with partial pivoting for the 4x4 matching system;
// small enough that a dense solve is cleaner than the closed forms.
inline std::array<Cx, 4> solve4(std::array<std::array<Cx, 4>, 4> M,
                                std::array<Cx, 4> rhs) {
    for (int col = 0; col < 4; ++col) {
        int piv = col;
        for (int r = col + 1; r < 4; ++r)
            if (std::abs(M[r][col]) > std::abs(M[piv][col]))
                piv = r;
        std::swap(M[col], M[piv]);
        std::swap(rhs[col], rhs[piv]);
        if (M[col][col] == Cx(0.0))
            throw Error("rect: singular matching system");
        for (int r = col + 1; r < 4; ++r) {
            const Cx m = M[r][col] / M[col][col];
            for (int cc = col; cc < 4; ++cc)
                M[r][cc] -= m * M[col][cc];
            rhs[r] -= m * rhs[col];
        }
    }
    std::array<Cx, 4> x{};
    for (int r = 3; r >= 0; --r) {
        Cx acc = rhs[r];
        for (int cc = r + 1; cc < 4; ++cc)
            acc -= M[r][cc] * x[cc];
        x[r] = acc / M[r][r];
    }
    return x;
}

}  // namespace detail

inline RectCoefficients rect_coefficients(const BarrierModel& m, double E) {
    if (m.kind != BarrierKind::Rectangular)
        throw InvalidModel("rect_coefficients: model is not rectangular");
    if (!(E > 0.0))
        throw InvalidModel("rect_coefficients: energy must be positive");

    RectCoefficients rc;
    rc.E = E;
    const double hbar = m.units.hbar, mass = m.units.mass, a = m.a;
    rc.k = std::sqrt(2.0 * mass * E) / hbar;
    rc.kappa = std::sqrt(Cx(2.0 * mass * (m.V0 - E))) / hbar;
    const double k = rc.k;
    const Cx ik = iu * k;

    if (std::abs(E - m.V0) < 1e-9 * m.V0) {
        // kappa -> 0: region II degenerates to C + D x and the matching
        // system has the closed-form limit below.
        rc.linear_middle = true;
        rc.F = std::exp(-2.0 * ik * a) / (1.0 - ik * a);
        rc.B = -ik * a * rc.F;
        rc.D = ik * rc.F * std::exp(ik * a);
        rc.C = rc.F * std::exp(ik * a) * (1.0 - ik * a);
        return rc;
    }

    const Cx kp = rc.kappa;
    const Cx eika = std::exp(ik * a), emika = std::exp(-ik * a);
    const Cx eka = std::exp(kp * a), emka = std::exp(-kp * a);
    // Unknowns (B, C, D, F); continuity of psi and psi' at x = -a and +a.
    const std::array<std::array<Cx, 4>, 4> M = {{
        {eika, -eka, -emka, Cx(0.0)},
        {-ik * eika, kp * eka, -kp * emka, Cx(0.0)},
        {Cx(0.0), emka, eka, -eika},
        {Cx(0.0), -kp * emka, kp * eka, -ik * eika},
    }};
    const std::array<Cx, 4> rhs = {-emika, -ik * emika, Cx(0.0), Cx(0.0)};
    const auto sol = detail::solve4(M, rhs);
    rc.B = sol[0];
    rc.C = sol[1];
    rc.D = sol[2];
    rc.F = sol[3];
    return rc;
}

// Closed-form transmission probability; continuous through E = V0 where
// it takes the value 1/(1 + k^2 a^2).
inline double rect_T_standard(const BarrierModel& m, double E) {
    const double hbar = m.units.hbar, mass = m.units.mass, a = m.a;
    const double k = std::sqrt(2.0 * mass * E) / hbar;
    if (std::abs(E - m.V0) < 1e-9 * m.V0)
        return 1.0 / (1.0 + k * k * a * a);
    const Cx kp = std::sqrt(Cx(2.0 * mass * (m.V0 - E))) / hbar;
    const Cx eps = kp / k - k / kp;
    const Cx sh = std::sinh(2.0 * kp * a);
    const Cx denom = 1.0 + (1.0 + eps * eps / 4.0) * sh * sh;
    return 1.0 / denom.real();
}

inline double rect_R_standard(const RectCoefficients& rc) {
    return abs2(rc.B) / abs2(rc.A);
}

// Eigenstate and derivative at complex position, continued piecewise by
// the real part.
inline WaveSample rect_psi(const BarrierModel& m, const RectCoefficients& rc,
                           Cx x) {
    const double a = m.a;
    const Cx ik = iu * rc.k;
    WaveSample ws;
    ws.x = x;
    if (x.real() < -a) {
        const Cx ep = std::exp(ik * x), em = std::exp(-ik * x);
        ws.psi = rc.A * ep + rc.B * em;
        ws.dpsi = ik * (rc.A * ep - rc.B * em);
    } else if (x.real() <= a) {
        if (rc.linear_middle) {
            ws.psi = rc.C + rc.D * x;
            ws.dpsi = rc.D;
        } else {
            const Cx em = std::exp(-rc.kappa * x), ep = std::exp(rc.kappa * x);
            ws.psi = rc.C * em + rc.D * ep;
            ws.dpsi = rc.kappa * (-rc.C * em + rc.D * ep);
        }
    } else {
        const Cx ep = std::exp(ik * x);
        ws.psi = rc.F * ep;
        ws.dpsi = ik * rc.F * ep;
    }
    return ws;
}

}  // namespace qtraj::models
