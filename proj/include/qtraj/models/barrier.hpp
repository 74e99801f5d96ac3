#pragma once

#include <cmath>
#include <string>

#include "qtraj/cx.hpp"
#include "qtraj/cxfun/ppow.hpp"
#include "qtraj/errors.hpp"
#include "qtraj/models/units.hpp"

namespace qtraj::models {

enum class BarrierKind { Rectangular, Ahmed, SoftStep };

// One-dimensional barrier description.  `c` is the asymmetry parameter of
// the Ahmed family (c = 1 is the symmetric Eckart barrier, c -> 0 tends
// to a Morse-like one-sided barrier); it is ignored by the other kinds.
struct BarrierModel {
    BarrierKind kind = BarrierKind::Rectangular;
    double V0 = 1.0;
    double a = 1.0;
    double c = 1.0;
    PhysicalUnits units{};
};

namespace detail {
inline void validate_common(const BarrierModel& m) {
    if (!(m.V0 > 0.0))
        throw InvalidModel("barrier: V0 must be positive");
    if (!(m.a > 0.0))
        throw InvalidModel("barrier: width parameter a must be positive");
    if (!(m.units.hbar > 0.0) || !(m.units.mass > 0.0))
        throw InvalidModel("barrier: hbar and mass must be positive");
}
}  // namespace detail

inline BarrierModel make_rectangular(double V0 = 1.0, double a = 1.0,
                                     PhysicalUnits units = {}) {
    BarrierModel m{BarrierKind::Rectangular, V0, a, 1.0, units};
    detail::validate_common(m);
    return m;
}

inline BarrierModel make_ahmed(double V0 = 1.0, double a = 1.0, double c = 1.0,
                               PhysicalUnits units = {}) {
    BarrierModel m{BarrierKind::Ahmed, V0, a, c, units};
    detail::validate_common(m);
    if (!(m.c > 0.0) || m.c > 1.0)
        throw InvalidModel("barrier: asymmetry parameter c must lie in (0, 1]");
    return m;
}

inline BarrierModel make_softstep(double V0 = 1.0, double a = 1.0,
                                  PhysicalUnits units = {}) {
    BarrierModel m{BarrierKind::SoftStep, V0, a, 1.0, units};
    detail::validate_common(m);
    return m;
}

// Potential evaluated at complex position.  The rectangular barrier is
// continued piecewise by the real part, matching the region structure of
// its wavefunction; the smooth families continue analytically and are
// periodic under x -> x + 2 pi a i.
inline Cx potential_at(const BarrierModel& m, Cx x) {
    switch (m.kind) {
        case BarrierKind::Rectangular:
            return std::abs(x.real()) <= m.a ? Cx(m.V0) : Cx(0.0);
        case BarrierKind::Ahmed: {
            const Cx ex = std::exp(x / m.a);
            const Cx r = (1.0 - ex) / (1.0 + m.c * ex);
            return m.V0 * (1.0 - r * r);
        }
        case BarrierKind::SoftStep:
            return 0.5 * m.V0 * (1.0 + std::tanh(x / (2.0 * m.a)));
    }
    return Cx(0.0);
}

inline std::string kind_name(BarrierKind k) {
    switch (k) {
        case BarrierKind::Rectangular: return "rect";
        case BarrierKind::Ahmed: return "ahmed";
        case BarrierKind::SoftStep: return "softstep";
    }
    return "?";
}

}  // namespace qtraj::models
