#pragma once

#include <utility>
#include <variant>

#include "qtraj/cx.hpp"
#include "qtraj/errors.hpp"
#include "qtraj/models/ahmed.hpp"
#include "qtraj/models/barrier.hpp"
#include "qtraj/models/rectangular.hpp"
#include "qtraj/models/softstep.hpp"
#include "qtraj/models/wavesample.hpp"

namespace qtraj::models {

// A scattering eigenstate of one barrier model at a fixed energy,
// continued off the real line.  This is the single object the
// trajectory, node-search and reflection layers talk to: it hides which
// closed form produced the wave and exposes psi, psi' and the two
// velocity fields derived from them.
class WaveField {
  public:
    WaveField(const BarrierModel& m, double E) : model_(m), energy_(E) {
        switch (m.kind) {
            case BarrierKind::Rectangular:
                state_ = rect_coefficients(m, E);
                break;
            case BarrierKind::Ahmed:
                state_ = ahmed_params(m, E);
                break;
            case BarrierKind::SoftStep:
                state_ = softstep_params(m, E);
                break;
        }
    }

    const BarrierModel& model() const { return model_; }
    double energy() const { return energy_; }

    // True when the analytic continuation is periodic in the imaginary
    // direction with strip half-width pi*a (the smooth models); the
    // rectangular continuation is entire in each slab instead.
    bool periodic_strip() const {
        return model_.kind != BarrierKind::Rectangular;
    }
    double strip_halfwidth() const { return pi * model_.a; }

    // Incident wavenumber on the left, and the asymptotic (for the
    // rectangular barrier: exact) decomposition there,
    //   psi ~ c1 e^{-ikx} + c2 e^{+ikx}  (x -> -inf),
    // with c2 incident and c1 reflected.
    double incident_wavenumber() const {
        return std::sqrt(2.0 * model_.units.mass * energy_) /
               model_.units.hbar;
    }
    std::pair<Cx, Cx> left_coefficients() const {
        if (const auto* rc = std::get_if<RectCoefficients>(&state_))
            return {rc->B, rc->A};
        if (const auto* ap = std::get_if<AhmedParams>(&state_))
            return ahmed_connection(*ap);
        return softstep_connection(std::get<SoftParams>(state_));
    }

    double R_standard() const {
        if (const auto* rc = std::get_if<RectCoefficients>(&state_))
            return rect_R_standard(*rc);
        if (const auto* ap = std::get_if<AhmedParams>(&state_))
            return ahmed_R_standard(*ap);
        return softstep_R_standard(std::get<SoftParams>(state_));
    }
    double T_standard() const {
        if (std::holds_alternative<RectCoefficients>(state_))
            return rect_T_standard(model_, energy_);
        if (const auto* ap = std::get_if<AhmedParams>(&state_))
            return ahmed_T_standard(*ap);
        return softstep_T_standard(std::get<SoftParams>(state_));
    }

    Cx potential(Cx x) const { return potential_at(model_, x); }

    WaveSample sample(Cx x) const {
        if (const auto* rc = std::get_if<RectCoefficients>(&state_))
            return rect_psi(model_, *rc, x);
        if (const auto* ap = std::get_if<AhmedParams>(&state_))
            return ahmed_psi(*ap, x);
        return softstep_psi(std::get<SoftParams>(state_), x);
    }

    // Complex trajectory velocity v = -i (hbar/m) psi'/psi.  The field
    // has first-order poles at the nodes of psi; refuse to evaluate on
    // top of one rather than return a huge, fully rounded value.
    Cx mdbb_velocity(Cx x) const {
        const WaveSample ws = sample(x);
        const Cx v = -iu * (model_.units.hbar / model_.units.mass) *
                     ws.dpsi / ws.psi;
        if (!is_finite(v))
            throw NodeProximity("mdbb_velocity: evaluated at a node of psi");
        return v;
    }

    // Real-line de Broglie-Bohm velocity (hbar/m) Im(psi'/psi).
    double dbb_velocity(double x) const {
        const WaveSample ws = sample(Cx(x));
        const Cx ratio = ws.dpsi / ws.psi;
        if (!is_finite(ratio))
            throw NodeProximity("dbb_velocity: evaluated at a node of psi");
        return model_.units.hbar / model_.units.mass * ratio.imag();
    }

  private:
    BarrierModel model_;
    double energy_;
    std::variant<RectCoefficients, AhmedParams, SoftParams> state_;
};

}  // namespace qtraj::models
