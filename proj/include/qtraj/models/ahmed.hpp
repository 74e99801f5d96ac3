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

// Dimensionless parameters of the Ahmed barrier family at a fixed energy.
// With Delta = hbar^2 / (2 m a^2):
//   f = sqrt(E / Delta)                       (= k a, incident side)
//   q = sqrt(V0 / Delta)
//   s = sqrt(f^2 + (b^2 - 1) q^2)             (= k' a, transmitted side)
//   g = sqrt(q^2 (b + 1)^2 - 1/4),  b = 1/c
struct AhmedParams {
    double E = 0.0;
    double V0 = 0.0;
    double a = 0.0;
    double c = 0.0;
    double b = 0.0;
    double f = 0.0;
    double q = 0.0;
    double s = 0.0;
    double g = 0.0;
    Cx ha{}, hb{}, hc{};  // hypergeometric parameters of the eigenstate
};

inline AhmedParams ahmed_params(const BarrierModel& m, double E) {
    if (m.kind != BarrierKind::Ahmed)
        throw InvalidModel("ahmed_params: model is not of the Ahmed family");
    if (!(E > 0.0))
        throw InvalidModel("ahmed_params: energy must be positive");

    AhmedParams p;
    p.E = E;
    p.V0 = m.V0;
    p.a = m.a;
    p.c = m.c;
    p.b = 1.0 / m.c;
    const double delta =
        m.units.hbar * m.units.hbar / (2.0 * m.units.mass * m.a * m.a);
    p.f = std::sqrt(E / delta);
    p.q = std::sqrt(m.V0 / delta);
    p.s = std::sqrt(p.f * p.f + (p.b * p.b - 1.0) * p.q * p.q);
    const double g2 = p.q * p.q * (p.b + 1.0) * (p.b + 1.0) - 0.25;
    if (!(g2 > 0.0))
        throw InvalidModel("ahmed_params: barrier too weak, g^2 <= 0");
    p.g = std::sqrt(g2);

    p.ha = Cx(0.5, -(p.f + p.g + p.s));
    p.hb = Cx(0.5, -(p.f - p.g + p.s));
    p.hc = Cx(1.0, -2.0 * p.s);
    return p;
}

// Scattering eigenstate of the Ahmed barrier (transmission channel,
// normalization constants dropped), continued to complex x:
//
//   psi(x) = e^{-i f x / a} P^{i(s+f)} 2F1(ha, hb; hc; 1/P),
//   P = 1 + c e^{x/a}.
//
// The exponential prefactor is kept entire in x (rather than as a
// principal power of e^{x/a}) so the only branch discontinuities of the
// velocity field lie on the strip boundaries x_i = +-pi a.
inline WaveSample ahmed_psi(const AhmedParams& p, Cx x) {
    using cxfun::hyp2f1;
    using cxfun::hyp2f1_near_one;
    using cxfun::ppow;

    const double a = p.a;
    const Cx cex = p.c * std::exp(x / a);
    const Cx P = 1.0 + cex;
    const Cx isf = iu * (p.s + p.f);
    const Cx prefix = std::exp(-iu * p.f * x / a) * ppow(P, isf);

    // u = 1 - 1/P, formed without subtraction.  Toward the incident
    // asymptote |u| shrinks like e^{x/a}, and the node search lives
    // exactly there: route through the near-one evaluation so the
    // u^{c-a-b} branch factor sees u at full relative precision.  The
    // series growth bound |u| max(|ha|,|hb|) < 1/2 keeps the split
    // safely convergent even for the Morse-like parameter sizes.
    const Cx u = cex / P;
    const double maxab = std::max({1.0, std::abs(p.ha), std::abs(p.hb)});
    Cx F, dF;
    if (std::abs(u) < 0.25 && std::abs(u) * maxab < 0.5) {
        F = hyp2f1_near_one(p.ha, p.hb, p.hc, u);
        dF = p.ha * p.hb / p.hc *
             hyp2f1_near_one(p.ha + 1.0, p.hb + 1.0, p.hc + 1.0, u);
    } else {
        const Cx w = 1.0 / P;
        F = hyp2f1(p.ha, p.hb, p.hc, w);
        dF = p.ha * p.hb / p.hc *
             hyp2f1(p.ha + 1.0, p.hb + 1.0, p.hc + 1.0, w);
    }

    WaveSample ws;
    ws.x = x;
    ws.psi = prefix * F;
    // P' = (P-1)/a = cex/a; chain rule through both the power and the
    // argument, with (P-1)/P written as u
    ws.dpsi = prefix *
              ((-iu * p.f / a + isf * u / a) * F - u / (a * P) * dF);
    return ws;
}

// Coefficients of the x -> -inf asymptotics,
//   psi ~ c1 e^{-i f x / a} + c2 e^{+i f x / a},
// obtained from the w -> 1 connection formula of the hypergeometric
// factor.  Under the e^{-iEt/hbar} convention c2 multiplies the wave
// incident from the left and c1 the reflected one, so |c1/c2|^2 is the
// reflection probability; nodes of this asymptotic field seed the node
// search in the incident region.
inline std::pair<Cx, Cx> ahmed_connection(const AhmedParams& p) {
    using cxfun::gamma_ratio;
    using cxfun::ppow;
    const Cx A = p.ha, B = p.hb, C = p.hc;
    const Cx g1 = gamma_ratio<2, 2>({C, C - A - B}, {C - A, C - B});
    const Cx g2 = gamma_ratio<2, 2>({C, A + B - C}, {A, B});
    return {g1, g2 * ppow(Cx(p.c), 2.0 * iu * p.f)};
}

namespace detail {
// log cosh / log sinh without overflow for large arguments.
inline double lcosh(double t) {
    t = std::abs(t);
    return t + std::log1p(std::exp(-2.0 * t)) - 0.6931471805599453;
}
inline double lsinh(double t) {
    // t > 0 assumed
    return t + std::log1p(-std::exp(-2.0 * t)) - 0.6931471805599453;
}
}  // namespace detail

// Closed-form reflection and transmission probabilities.  The cosh/sinh
// arguments reach ~ pi (f + s + g) ~ 1e4 for the Morse-like limit, far
// beyond floating-point range, so the ratios are assembled in log space.
inline double ahmed_R_standard(const AhmedParams& p) {
    using detail::lcosh;
    const double f = p.f, s = p.s, g = p.g;
    return std::exp(lcosh(pi * (f + g - s)) + lcosh(pi * (f - g - s)) -
                    lcosh(pi * (f + s + g)) - lcosh(pi * (f + s - g)));
}

inline double ahmed_T_standard(const AhmedParams& p) {
    using detail::lcosh;
    using detail::lsinh;
    const double f = p.f, s = p.s, g = p.g;
    return std::exp(lsinh(2.0 * pi * f) + lsinh(2.0 * pi * s) -
                    lcosh(pi * (f + s + g)) - lcosh(pi * (f + s - g)));
}

}  // namespace qtraj::models
