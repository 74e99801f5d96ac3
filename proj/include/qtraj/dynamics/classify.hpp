#pragma once

#include <algorithm>
#include <cmath>
#include <vector>

#include "qtraj/cx.hpp"
#include "qtraj/errors.hpp"
#include "qtraj/dynamics/integrator.hpp"
#include "qtraj/models/wavefield.hpp"

namespace qtraj::dynamics {

namespace detail {

// Where a backward half that timed out actually ended up.  The repeller
// structures a backward path can die against are the right barrier edge
// (rectangular: the velocity jumps across Re x = +a, so the path gets
// pinned there by the step controller) and stagnation points (smooth
// models: zeros of psi', exponential stall).  The left rectangular edge
// is also a two-sided source over a short segment above the node chain,
// but its left-going outflow simply continues the reflected stream, so
// it is reported separately and classified by the forward fate.
enum class BackwardSite { Free, RightEdge, LeftEdge, Stagnation };

inline BackwardSite backward_site(const Trajectory& tr,
                                  const models::WaveField& wf) {
    if (tr.backward_reason != TerminalReason::TimedOut)
        return BackwardSite::Free;
    const models::BarrierModel& m = wf.model();
    if (m.kind == models::BarrierKind::Rectangular) {
        if (!tr.backward_underflow) return BackwardSite::Free;
        if (std::abs(tr.backward_end.real() - m.a) < 1e-3)
            return BackwardSite::RightEdge;
        if (std::abs(tr.backward_end.real() + m.a) < 1e-3)
            return BackwardSite::LeftEdge;
        return BackwardSite::Free;
    }
    try {
        if (std::abs(wf.mdbb_velocity(tr.backward_end)) <
            1e-3 * m.units.hbar / (m.units.mass * m.a))
            return BackwardSite::Stagnation;
    } catch (const NodeProximity&) {
    }
    return BackwardSite::Free;
}

}  // namespace detail

inline TrajectoryClass classify(const Trajectory& tr,
                                const models::WaveField& wf) {
    using R = TerminalReason;
    if (tr.terminal_reason == R::LoopClosed) return TrajectoryClass::ClosedLoop;
    if (tr.terminal_reason == R::NodeHit || tr.backward_reason == R::NodeHit)
        return TrajectoryClass::Indeterminate;

    const bool fwd_left = tr.terminal_reason == R::EscapedLeft;
    const bool fwd_right = tr.terminal_reason == R::EscapedRight;
    if (!fwd_left && !fwd_right) return TrajectoryClass::Indeterminate;

    if (fwd_right && tr.backward_reason == R::EscapedLeft)
        return TrajectoryClass::Tunneled;
    if (fwd_left && tr.backward_reason == R::EscapedLeft)
        return TrajectoryClass::Reflected;

    switch (detail::backward_site(tr, wf)) {
        case detail::BackwardSite::RightEdge:
        case detail::BackwardSite::Stagnation:
            // emanating family (the repeller onset lives on the right
            // edge; smooth-model analogues are the stagnation sources)
            return fwd_right ? TrajectoryClass::RepellerRight
                             : TrajectoryClass::RepellerLeft;
        case detail::BackwardSite::LeftEdge:
            // incident-side edge source: the outflow is simply the
            // near-web reflected (or, rightward, tunneling) stream
            return fwd_right ? TrajectoryClass::Tunneled
                             : TrajectoryClass::Reflected;
        case detail::BackwardSite::Free:
            break;
    }

    // backward half still bounded at the time budget: it winds around
    // the closed shells of the node web (or is still threading a saddle
    // pinch).  The flow line's observable content is its forward escape,
    // and raising the budget can only sharpen, never flip, this call.
    if (tr.backward_reason == R::TimedOut)
        return fwd_right ? TrajectoryClass::Tunneled
                         : TrajectoryClass::Reflected;
    return TrajectoryClass::Indeterminate;
}

inline TrajectoryClass classify(const Trajectory& tr,
                                const models::BarrierModel& m, double E) {
    return classify(tr, models::WaveField(m, E));
}

// Convenience used everywhere below: integrate and classify in one go.
inline Trajectory classified_trajectory(const models::WaveField& wf, Cx x0,
                                        const IntegratorOptions& opts = {}) {
    Trajectory tr = integrate_trajectory(wf, x0, opts);
    tr.cls = classify(tr, wf);
    return tr;
}

// Ordered bundle of flow lines for a list of launch points.  Failures of
// individual launches surface as Indeterminate entries, never as a throw,
// so a plotting sweep always yields one record per input.
inline std::vector<Trajectory> trajectory_field(
    const models::WaveField& wf, const std::vector<Cx>& launches,
    const IntegratorOptions& opts = {});

// Tunneling-boundary ordinate gamma on the launch line Re x = alpha: the
// ordinate separating launches whose flow lines tunnel from those that do
// not (closed loops and reflected paths sit above).  Bisection between a
// classified-tunneled and the next non-tunneled coarse sample.
struct GammaResult {
    double gamma = 0.0;
    double bracket_lo = 0.0;  // last ordinate classified Tunneled
    double bracket_hi = 0.0;  // first ordinate classified otherwise
};

inline GammaResult find_gamma(const models::WaveField& wf, double alpha,
                              const IntegratorOptions& user_opts = {},
                              double xi_lo = 0.0, double xi_hi = 0.0);

inline GammaResult find_gamma(double E, const models::BarrierModel& m,
                              double alpha,
                              const IntegratorOptions& opts = {}) {
    return find_gamma(models::WaveField(m, E), alpha, opts);
}

// --- stagnation points (smooth models) ----------------------------------

// Zeros of psi'.  Newton's update uses the wave equation for the second
// derivative, psi'' = (2m/hbar^2)(V - E) psi, so no finite differencing
// of the field is needed.
inline std::vector<Cx> find_stagnation_points(const models::WaveField& wf,
                                              double boundary_re,
                                              double xi_lo, double xi_hi,
                                              int n_seeds = 60) {
    const models::BarrierModel& m = wf.model();
    const double two_m_over_h2 =
        2.0 * m.units.mass / (m.units.hbar * m.units.hbar);
    std::vector<Cx> found;
    for (int s = 0; s < n_seeds; ++s) {
        Cx x(boundary_re,
             xi_lo + (xi_hi - xi_lo) * (s + 0.5) / n_seeds);
        bool ok = false;
        for (int it = 0; it < 60; ++it) {
            models::WaveSample w;
            try {
                w = wf.sample(x);
            } catch (const Error&) {
                break;
            }
            if (!is_finite(w.psi) || !is_finite(w.dpsi)) break;
            const Cx ddpsi =
                two_m_over_h2 * (wf.potential(x) - wf.energy()) * w.psi;
            if (std::abs(ddpsi) == 0.0) break;
            const Cx step = w.dpsi / ddpsi;
            x -= step;
            if (std::abs(step) < 1e-12 * (1.0 + std::abs(x))) {
                ok = true;
                break;
            }
            if (std::abs(x) > 1e3) break;
        }
        if (!ok) continue;
        if (std::abs(x.imag()) > pi * m.a) continue;  // off the strip
        // the incident asymptote carries its own saddle lattice (zeros of
        // psi' accompanying the node lattice, divergence -> 0) marching to
        // Re x -> -inf; a radius clamp keeps the search tied to the
        // boundary the caller asked about
        if (std::abs(x.real() - boundary_re) > 5.0 * m.a) continue;
        const bool dup = std::any_of(
            found.begin(), found.end(),
            [&](Cx y) { return std::abs(y - x) < 1e-8; });
        if (!dup) found.push_back(x);
    }
    std::sort(found.begin(), found.end(), [](Cx a, Cx b) {
        return a.real() != b.real() ? a.real() < b.real()
                                    : a.imag() < b.imag();
    });
    return found;
}

// At a stagnation point the local field linearizes to v'(x0) (x - x0)
// with v'(x0) = -2i (V(x0) - E)/hbar; the flow diverges (repeller) when
// Re v' > 0, i.e. when Im V(x0) > 0.
inline Cx stagnation_divergence(const models::WaveField& wf, Cx x0) {
    const double hbar = wf.model().units.hbar;
    return Cx(0.0, -2.0 / hbar) * (wf.potential(x0) - wf.energy());
}

// Sources of the trajectory field.  Rectangular barrier: onset point(s)
// on the edge where trajectories of the outer plane-wave region switch
// from passing through the boundary (their backward halves cross the
// barrier and escape into the incident region) to emanating from it
// (their backward halves pin against the edge); located by bisection on
// the trajectory-level predicate.  Smooth models: stagnation points with
// diverging local flow.
inline std::vector<Cx> find_repellers(const models::WaveField& wf,
                                      double boundary_re, double xi_lo,
                                      double xi_hi) {
    const models::BarrierModel& m = wf.model();
    std::vector<Cx> out;
    if (m.kind == models::BarrierKind::Rectangular) {
        if (m.V0 == 0.0) return out;  // free field has no sources
        IntegratorOptions o;
        o.record_samples = false;
        o.max_time = 200.0;
        const double launch_re =
            boundary_re + (boundary_re >= 0.0 ? 1.0 : -1.0);
        const auto emanates = [&](double xi) {
            const detail::HalfPath b = detail::integrate_half(
                wf, Cx(launch_re, xi), o, -1.0, false);
            return b.reason != TerminalReason::EscapedLeft;
        };
        const int n = 48;
        bool prev = emanates(xi_lo);
        for (int i = 1; i <= n; ++i) {
            const double xi = xi_lo + (xi_hi - xi_lo) * i / n;
            const bool cur = emanates(xi);
            if (cur != prev) {
                double lo = xi_lo + (xi_hi - xi_lo) * (i - 1) / n;
                double hi = xi;
                bool lo_e = prev;
                while (hi - lo > 1e-6) {
                    const double mid = 0.5 * (lo + hi);
                    if (emanates(mid) == lo_e)
                        lo = mid;
                    else
                        hi = mid;
                }
                out.push_back(Cx(boundary_re, 0.5 * (lo + hi)));
            }
            prev = cur;
        }
        return out;
    }
    if (wf.model().V0 == 0.0) return out;  // free field has no sources
    for (Cx x0 : find_stagnation_points(wf, boundary_re, xi_lo, xi_hi))
        if (stagnation_divergence(wf, x0).real() > 0.0) out.push_back(x0);
    return out;
}

}  // namespace qtraj::dynamics
