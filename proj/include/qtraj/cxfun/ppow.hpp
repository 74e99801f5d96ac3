#pragma once

#include <cmath>

#include "qtraj/cx.hpp"
#include "qtraj/errors.hpp"

namespace qtraj::cxfun {

// Principal-branch logarithm with Arg in (-pi, pi].  std::log already uses
// the principal branch but maps -0.0 imaginary parts to Arg = -pi; points
// that sit exactly on the negative real axis must resolve to +pi so that
// both sides of every downstream formula agree on which sheet they are on.
inline Cx plog(Cx z) {
    if (z.imag() == 0.0)
        z = Cx(z.real(), +0.0);
    return std::log(z);
}

// z^s = exp(s log z) on the principal branch, with the same -0.0
// normalization as plog.  z = 0 follows the limit rules: 0^0 = 1 and
// 0^s = 0 when Re(s) > 0; anything else has no finite limit.
inline Cx ppow(Cx z, Cx s) {
    if (z == Cx(0.0)) {
        if (s == Cx(0.0))
            return Cx(1.0);
        if (s.real() > 0.0)
            return Cx(0.0);
        throw Error("ppow: 0 raised to exponent with non-positive real part");
    }
    return std::exp(s * plog(z));
}

}  // namespace qtraj::cxfun
