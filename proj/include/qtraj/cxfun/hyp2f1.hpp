#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdlib>
#include <string>

#include "qtraj/cx.hpp"
#include "qtraj/cxfun/lgamma.hpp"
#include "qtraj/cxfun/ppow.hpp"
#include "qtraj/errors.hpp"

namespace qtraj::cxfun {

// Diagnostics a caller can optionally collect from hyp2f1.  `transform`
// records which argument mapping was applied (0 = direct series), `terms`
// the longest series length, `perturbed` whether degenerate parameters
// had to be nudged off an integer difference.
struct Hyp2F1Diag {
    int transform = 0;
    int terms = 0;
    bool perturbed = false;
};

namespace detail {

inline constexpr int hyp_max_terms = 5000;
inline constexpr double hyp_eps = 1e-16;
inline constexpr double degen_tol = 1e-8;
inline constexpr Cx degen_nudge{1e-9, 1e-9};

// Plain Gauss series sum_{n} (a)_n (b)_n / (c)_n / n! w^n.  Terms are
// built by ratio recursion; the sum stops once the last term has been
// below hyp_eps relative to the partial sum three times in a row (the
// terms of a 2F1 are not monotone, a single small term proves nothing).
inline Cx gauss_series(Cx a, Cx b, Cx c, Cx w, int& terms_used) {
    if (near_gamma_pole(c, 1e-12))
        throw DegenerateParameters("hyp2f1: series parameter c at a gamma pole");

    Cx term = 1.0;
    Cx sum = 1.0;
    int streak = 0;
    for (int n = 0; n < hyp_max_terms; ++n) {
        const double dn = static_cast<double>(n);
        term *= (a + dn) * (b + dn) / ((c + dn) * (dn + 1.0)) * w;
        sum += term;
        if (std::abs(term) <= hyp_eps * std::abs(sum)) {
            if (++streak == 3) {
                terms_used = n + 1;
                return sum;
            }
        } else {
            streak = 0;
        }
        if (!is_finite(sum))
            throw ConvergenceFailure("hyp2f1: series overflowed, |w| = " +
                                     std::to_string(std::abs(w)));
    }
    throw ConvergenceFailure("hyp2f1: series did not converge in " +
                             std::to_string(hyp_max_terms) +
                             " terms, |w| = " + std::to_string(std::abs(w)));
}

enum Transform { direct = 0, pfaff = 1, one_minus = 2, inverse = 3,
                 inv_one_minus = 4, one_minus_inv = 5 };

inline Cx mapped_argument(Transform t, Cx w) {
    switch (t) {
        case direct:        return w;
        case pfaff:         return w / (w - 1.0);
        case one_minus:     return 1.0 - w;
        case inverse:       return 1.0 / w;
        case inv_one_minus: return 1.0 / (1.0 - w);
        case one_minus_inv: return 1.0 - 1.0 / w;
    }
    return w;
}

// The two-series transformations pair gamma-function coefficients with
// parameter differences; when the relevant difference sits within
// degen_tol of an integer both coefficients blow up against each other
// and the parameters must be perturbed before use.
inline bool transform_degenerate(Transform t, Cx a, Cx b, Cx c) {
    switch (t) {
        case one_minus:
        case one_minus_inv:
            return near_integer(c - a - b, degen_tol);
        case inverse:
        case inv_one_minus:
            return near_integer(a - b, degen_tol);
        default:
            return false;
    }
}

inline Cx apply_transform(Transform t, Cx a, Cx b, Cx c, Cx w, int& terms_used) {
    const Cx u = mapped_argument(t, w);
    int n1 = 0, n2 = 0;
    Cx result;
    switch (t) {
        case direct:
            result = gauss_series(a, b, c, w, n1);
            break;
        case pfaff:
            result = ppow(1.0 - w, -a) * gauss_series(a, c - b, c, u, n1);
            break;
        case one_minus: {
            const Cx c1 = gamma_ratio<2, 2>({c, c - a - b}, {c - a, c - b});
            const Cx c2 = gamma_ratio<2, 2>({c, a + b - c}, {a, b});
            result = c1 * gauss_series(a, b, a + b - c + 1.0, u, n1) +
                     c2 * ppow(1.0 - w, c - a - b) *
                         gauss_series(c - a, c - b, c - a - b + 1.0, u, n2);
            break;
        }
        case inverse: {
            const Cx c1 = gamma_ratio<2, 2>({c, b - a}, {b, c - a});
            const Cx c2 = gamma_ratio<2, 2>({c, a - b}, {a, c - b});
            result = c1 * ppow(-w, -a) *
                         gauss_series(a, a - c + 1.0, a - b + 1.0, u, n1) +
                     c2 * ppow(-w, -b) *
                         gauss_series(b, b - c + 1.0, b - a + 1.0, u, n2);
            break;
        }
        case inv_one_minus: {
            const Cx c1 = gamma_ratio<2, 2>({c, b - a}, {b, c - a});
            const Cx c2 = gamma_ratio<2, 2>({c, a - b}, {a, c - b});
            result = c1 * ppow(1.0 - w, -a) *
                         gauss_series(a, c - b, a - b + 1.0, u, n1) +
                     c2 * ppow(1.0 - w, -b) *
                         gauss_series(b, c - a, b - a + 1.0, u, n2);
            break;
        }
        case one_minus_inv: {
            const Cx c1 = gamma_ratio<2, 2>({c, c - a - b}, {c - a, c - b});
            const Cx c2 = gamma_ratio<2, 2>({c, a + b - c}, {a, b});
            result = c1 * ppow(w, -a) *
                         gauss_series(a, a - c + 1.0, a + b - c + 1.0, u, n1) +
                     c2 * ppow(w, a - c) * ppow(1.0 - w, c - a - b) *
                         gauss_series(c - a, 1.0 - a, c - a - b + 1.0, u, n2);
            break;
        }
    }
    terms_used = std::max(n1, n2);
    return result;
}

}  // namespace detail

// Gauss hypergeometric function 2F1(a, b; c; w) for complex parameters
// and argument, on the principal branch (cut along [1, inf)).
//
// Strategy: the defining series is used directly for |w| <= 0.5;
// otherwise the fractional-linear argument mappings w -> w/(w-1), 1-w,
// 1/w, 1/(1-w), 1-1/w are considered and the one with the smallest
// mapped modulus wins.  Coefficients are assembled in log-gamma space so
// the large parameter values of the barrier models (|b|, |c| ~ 1e3) do
// not overflow.  When a transformation needs a gamma of an integer
// parameter difference, the parameters are shifted by 1e-9*(1+i) and the
// perturbation is reported through the diagnostics.
inline Cx hyp2f1(Cx a, Cx b, Cx c, Cx w, Hyp2F1Diag* diag = nullptr) {
    using namespace detail;

    Hyp2F1Diag local;
    Hyp2F1Diag& d = diag ? *diag : local;
    d = Hyp2F1Diag{};

    if (w == Cx(0.0) || a == Cx(0.0) || b == Cx(0.0))
        return Cx(1.0);

    Transform chosen = direct;
    if (std::abs(w) > 0.5) {
        double best = std::abs(w);
        for (Transform t : {pfaff, one_minus, inverse, inv_one_minus, one_minus_inv}) {
            const double m = std::abs(mapped_argument(t, w));
            if (m < best) {
                best = m;
                chosen = t;
            }
        }
    }
    d.transform = chosen;

    // c exactly at a pole makes every term of every series singular;
    // c-a-b or a-b at an integer degenerates the selected two-series
    // split.  Both are lifted by the same small complex shift.
    if (near_gamma_pole(c, degen_tol)) {
        c += degen_nudge;
        d.perturbed = true;
    }
    if (transform_degenerate(chosen, a, b, c)) {
        if (chosen == inverse || chosen == inv_one_minus)
            a += degen_nudge;
        else
            c += degen_nudge;
        d.perturbed = true;
    }

    return apply_transform(chosen, a, b, c, w, d.terms);
}

// d/dw 2F1(a, b; c; w) via the contiguous relation
// F'(a,b;c;w) = (a b / c) F(a+1, b+1; c+1; w).
inline Cx hyp2f1_dw(Cx a, Cx b, Cx c, Cx w, Hyp2F1Diag* diag = nullptr) {
    return a * b / c * hyp2f1(a + 1.0, b + 1.0, c + 1.0, w, diag);
}

// F(a, b; c; 1 - u) with the complement u supplied directly.  The
// generic path reconstitutes 1 - w by subtraction, which for |u| ~ 1e-5
// leaves u with only ~11 correct digits; the u^{c-a-b} factor then turns
// that into an absolute noise floor on the value.  Callers that can form
// u exactly (the barrier eigenstates in their incident asymptote, where
// u = c e^{x/a} / P) get the full precision back through this route.
inline Cx hyp2f1_near_one(Cx a, Cx b, Cx c, Cx u, Hyp2F1Diag* diag = nullptr) {
    using namespace detail;

    Hyp2F1Diag local;
    Hyp2F1Diag& d = diag ? *diag : local;
    d = Hyp2F1Diag{};
    d.transform = one_minus;

    if (u == Cx(0.0))
        throw ConvergenceFailure("hyp2f1_near_one: u = 0 has no limit value");
    if (std::abs(u) > 0.5)
        throw ConvergenceFailure("hyp2f1_near_one: |u| must be small");
    if (a == Cx(0.0) || b == Cx(0.0)) return Cx(1.0);

    if (near_gamma_pole(c, degen_tol)) {
        c += degen_nudge;
        d.perturbed = true;
    }
    if (near_integer(c - a - b, degen_tol)) {
        c += degen_nudge;
        d.perturbed = true;
    }
    const Cx c1 = gamma_ratio<2, 2>({c, c - a - b}, {c - a, c - b});
    const Cx c2 = gamma_ratio<2, 2>({c, a + b - c}, {a, b});
    int n1 = 0, n2 = 0;
    const Cx r = c1 * gauss_series(a, b, a + b - c + 1.0, u, n1) +
                 c2 * ppow(u, c - a - b) *
                     gauss_series(c - a, c - b, c - a - b + 1.0, u, n2);
    d.terms = std::max(n1, n2);
    return r;
}

}  // namespace qtraj::cxfun
