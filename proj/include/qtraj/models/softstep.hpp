#pragma once

#include <cmath>
#include <utility>

#include "qtraj/cx.hpp"
#include "qtraj/cxfun/hyp2f1.hpp"
#include "qtraj/cxfun/lgamma.hpp"
#include "qtraj/cxfun/ppow.hpp"
#include "qtraj/errors.hpp"
#include "qtraj/models/barrier.hpp"
#include "qtraj/models/wavesample.hpp"

namespace qtraj::models {

// Parameters of the smooth (tanh) step at a fixed energy.  kp is the
// wavenumber over the plateau; the principal square root of the complex
// radicand makes it positive-imaginary below threshold, so the same
// expressions cover evanescent transmission without a case split.
struct SoftParams {
    double E = 0.0;
    double V0 = 0.0;
    double a = 0.0;
    double k = 0.0;  // incident wavenumber
    Cx kp{};         // wavenumber above the step
    Cx mu{}, nu{};   // exponents: mu = -i k a, nu = -i kp a
};

inline SoftParams softstep_params(const BarrierModel& m, double E) {
    if (m.kind != BarrierKind::SoftStep)
        throw InvalidModel("softstep_params: model is not a soft step");
    if (!(E > 0.0))
        throw InvalidModel("softstep_params: energy must be positive");

    SoftParams p;
    p.E = E;
    p.V0 = m.V0;
    p.a = m.a;
    const double hbar = m.units.hbar, mass = m.units.mass;
    p.k = std::sqrt(2.0 * mass * E) / hbar;
    p.kp = std::sqrt(Cx(2.0 * mass * (E - m.V0))) / hbar;
    p.mu = -iu * p.k * p.a;
    p.nu = -iu * p.kp * p.a;
    return p;
}

// Transmission-channel eigenstate of the soft step, continued to
// complex x.  In the variable y = 1 / (1 + e^{x/a}),
//
//   psi = y^nu (1 - y)^mu 2F1(mu + nu, mu + nu + 1; 2 nu + 1; y),
//
// which tends to e^{i kp x} as x -> +inf (y -> 0) and decomposes into
// incident plus reflected plane waves as x -> -inf (y -> 1).
inline WaveSample softstep_psi(const SoftParams& p, Cx x) {
    using cxfun::hyp2f1;
    using cxfun::hyp2f1_near_one;
    using cxfun::ppow;

    const Cx ex = std::exp(x / p.a);
    const Cx y = 1.0 / (1.0 + ex);
    // the complement 1 - y = e^{x/a}/(1 + e^{x/a}), formed without
    // subtraction: in the incident asymptote (x -> -inf, y -> 1) the
    // node search and the reflection quadrature both need the y^{c-a-b}
    // branch factor at full relative precision of this small quantity
    const Cx ym1 = ex / (1.0 + ex);
    const Cx ha = p.mu + p.nu;
    const Cx hb = p.mu + p.nu + 1.0;
    const Cx hc = 2.0 * p.nu + 1.0;
    const double maxab = std::max({1.0, std::abs(ha), std::abs(hb)});
    Cx F, dF;
    if (std::abs(ym1) < 0.25 && std::abs(ym1) * maxab < 0.5) {
        F = hyp2f1_near_one(ha, hb, hc, ym1);
        dF = ha * hb / hc * hyp2f1_near_one(ha + 1.0, hb + 1.0, hc + 1.0, ym1);
    } else {
        F = hyp2f1(ha, hb, hc, y);
        dF = ha * hb / hc * hyp2f1(ha + 1.0, hb + 1.0, hc + 1.0, y);
    }
    const Cx head = ppow(y, p.nu) * ppow(ym1, p.mu);
    const Cx dy = -y * ym1 / p.a;

    WaveSample ws;
    ws.x = x;
    ws.psi = head * F;
    ws.dpsi = head * dy * ((p.nu / y - p.mu / ym1) * F + dF);
    return ws;
}

// Asymptotic decomposition psi ~ c1 e^{-i k x} + c2 e^{+i k x} for
// x -> -inf, from the y -> 1 connection formula.  c2 is the incident
// amplitude, c1 the reflected one.
inline std::pair<Cx, Cx> softstep_connection(const SoftParams& p) {
    using cxfun::gamma_ratio;
    const Cx ha = p.mu + p.nu;
    const Cx hb = p.mu + p.nu + 1.0;
    const Cx hc = 2.0 * p.nu + 1.0;
    const Cx c1 = gamma_ratio<2, 2>({hc, hc - ha - hb}, {hc - ha, hc - hb});
    const Cx c2 = gamma_ratio<2, 2>({hc, ha + hb - hc}, {ha, hb});
    return {c1, c2};
}

// Closed-form reflection probability of the smooth step: total below
// threshold, otherwise the classic sinh ratio in k -+ k'.
inline double softstep_R_standard(const SoftParams& p) {
    if (p.E <= p.V0) return 1.0;
    const double kp = p.kp.real();
    const double r = std::sinh(pi * p.a * (p.k - kp)) /
                     std::sinh(pi * p.a * (p.k + kp));
    return r * r;
}

inline double softstep_T_standard(const SoftParams& p) {
    return 1.0 - softstep_R_standard(p);
}

}  // namespace qtraj::models
