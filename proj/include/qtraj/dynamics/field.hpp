#pragma once

#include <cmath>
#include <vector>

#include "qtraj/dynamics/classify.hpp"
#include "qtraj/dynamics/integrator.hpp"
#include "qtraj/parallel.hpp"

namespace qtraj::dynamics {

inline std::vector<Trajectory> trajectory_field(
    const models::WaveField& wf, const std::vector<Cx>& launches,
    const IntegratorOptions& opts) {
    std::vector<Trajectory> out(launches.size());
    parallel_for(launches.size(), [&](std::size_t i) {
        try {
            out[i] = classified_trajectory(wf, launches[i], opts);
        } catch (const Error&) {
            // per-launch failures stay inline as Indeterminate stubs so
            // the bundle keeps one entry per input, in input order
            out[i] = Trajectory{};
            out[i].launch = launches[i];
        }
    });
    return out;
}

inline GammaResult find_gamma(const models::WaveField& wf, double alpha,
                              const IntegratorOptions& user_opts,
                              double xi_lo, double xi_hi) {
    const models::BarrierModel& m = wf.model();
    IntegratorOptions opts = user_opts;
    opts.record_samples = false;

    // an evanescent transmitted channel (T identically zero, e.g. the
    // soft step below its asymptotic height) leaves the far-right flow
    // purely vertical: rightward escape is impossible a priori and the
    // scan would grind through every launch just to say so
    if (wf.T_standard() == 0.0)
        throw NoTunnelingFound(
            "find_gamma: transmitted channel is evanescent; no launch can "
            "tunnel");

    const double strip = pi * m.a;
    if (xi_hi <= xi_lo) {
        // default segment: the full launch line, clear of the strip
        // boundary where the periodic continuations carry their cuts
        xi_lo = -strip + 0.1 * m.a;
        xi_hi = strip - 0.1 * m.a;
    }

    // forward-first predicate: most non-tunneling launches reveal it in
    // the forward half alone, and the backward halves of flows hugging
    // the web separatrix are by far the costliest part of a scan
    const auto tunneled = [&](double xi) {
        const Cx x0(alpha, xi);
        const detail::HalfPath f =
            detail::integrate_half(wf, x0, opts, +1.0, true);
        if (f.reason != TerminalReason::EscapedRight) return false;
        const detail::HalfPath b =
            detail::integrate_half(wf, x0, opts, -1.0, false);
        return b.reason == TerminalReason::EscapedLeft;
    };

    // coarse scan for the topmost tunneled ordinate, refining the grid
    // once if the band is narrower than the first spacing
    for (int n : {48, 240}) {
        std::vector<char> is_t(n + 1, 0);
        parallel_for(static_cast<std::size_t>(n) + 1, [&](std::size_t i) {
            const double xi = xi_lo + (xi_hi - xi_lo) * i / n;
            try {
                is_t[i] = tunneled(xi) ? 1 : 0;
            } catch (const Error&) {
                is_t[i] = 0;
            }
        });
        int top = -1;
        for (int i = n; i >= 0; --i)
            if (is_t[i]) {
                top = i;
                break;
            }
        if (top < 0) continue;  // nothing tunneled at this resolution
        if (top == n)
            throw NoTunnelingFound(
                "find_gamma: tunneled flow extends past the segment top");

        double lo = xi_lo + (xi_hi - xi_lo) * top / n;
        double hi = xi_lo + (xi_hi - xi_lo) * (top + 1) / n;
        while (hi - lo > 1e-4) {
            const double mid = 0.5 * (lo + hi);
            bool mid_t = false;
            try {
                mid_t = tunneled(mid);
            } catch (const Error&) {
            }
            (mid_t ? lo : hi) = mid;
        }
        return {0.5 * (lo + hi), lo, hi};
    }
    throw NoTunnelingFound(
        "find_gamma: no tunneled launch on the scan segment");
}

}  // namespace qtraj::dynamics
