#pragma once

#include <algorithm>
#include <cmath>
#include <vector>

#include "qtraj/cx.hpp"
#include "qtraj/errors.hpp"
#include "qtraj/models/wavefield.hpp"

namespace qtraj::dynamics {

struct IntegratorOptions {
    double initial_step = 1e-3;  // time units
    // default tolerances are tight enough that backward halves threading
    // the saddle pinches next to the node web reach their true source
    // (the barrier edge) instead of leaking into the web and winding
    double rel_tol = 1e-9;
    double abs_tol = 1e-11;
    double max_time = 400.0;
    double escape_xr = 0.0;   // 0 = auto: max(5a, |Re launch| + 2, a + 6)
    double node_guard = 1e-6;  // length; velocity cap is hbar/(m*guard)
    double loop_tol = 1e-4;
    bool record_samples = true;
};

enum class TerminalReason {
    EscapedLeft,
    EscapedRight,
    LoopClosed,
    NodeHit,  // field defect: a node of psi, or a branch-cut line contact
    TimedOut
};

enum class TrajectoryClass {
    Tunneled,
    Reflected,
    ClosedLoop,
    RepellerLeft,
    RepellerRight,
    Indeterminate
};

struct TrajectorySample {
    double t = 0.0;
    Cx x{};
};

// A full flow line through the launch point: backward-time half (t < 0)
// concatenated with the forward half (t > 0).  terminal_reason is the
// forward fate; the backward fate is kept alongside because the
// classification rules need both ends.
struct Trajectory {
    std::vector<TrajectorySample> samples;
    TrajectoryClass cls = TrajectoryClass::Indeterminate;
    Cx launch{};
    TerminalReason terminal_reason = TerminalReason::TimedOut;
    TerminalReason backward_reason = TerminalReason::TimedOut;
    Cx forward_end{};
    Cx backward_end{};
    bool forward_underflow = false;   // step size collapsed (seam contact)
    bool backward_underflow = false;
    bool cut_hit = false;  // terminated on a branch-cut line, not a node
};

namespace detail {

inline double resolve_escape(const IntegratorOptions& o,
                             const models::BarrierModel& m, Cx x0) {
    if (o.escape_xr > 0.0) {
        if (o.escape_xr <= m.a + 5.0)
            throw InvalidModel(
                "integrate: escape_xr must exceed the barrier extent + 5");
        return o.escape_xr;
    }
    return std::max({5.0 * m.a, std::abs(x0.real()) + 2.0, m.a + 6.0});
}

// Real part beyond which the strip boundary x_i = +-pi a stops being a
// discontinuity of v: the hypergeometric argument crosses its [1, inf)
// cut only while |c e^{x/a}| < 1 (Ahmed) resp. |e^{x/a}| < 1 (soft
// step).  The prefactor power cuts drop out of psi'/psi entirely.
inline double cut_re_max(const models::BarrierModel& m) {
    if (m.kind == models::BarrierKind::Ahmed) return -m.a * std::log(m.c);
    return 0.0;
}

struct FieldEval {
    Cx v{};
    bool node = false;
};

inline FieldEval eval_velocity(const models::WaveField& wf, Cx x,
                               double cap) {
    FieldEval r;
    try {
        r.v = wf.mdbb_velocity(x);
    } catch (const NodeProximity&) {
        r.node = true;
        return r;
    }
    if (!is_finite(r.v) || std::abs(r.v) > cap) r.node = true;
    return r;
}

// One half of the flow line, in a fixed time direction.
struct HalfPath {
    std::vector<TrajectorySample> samples;  // t >= 0, increasing
    TerminalReason reason = TerminalReason::TimedOut;
    Cx end{};
    bool underflow = false;
    bool cut = false;
    bool stalled = false;  // TimedOut via the stagnation floor
};

inline double seg_distance(Cx a, Cx b, Cx p) {
    const Cx ab = b - a;
    const double L2 = std::norm(ab);
    if (L2 == 0.0) return std::abs(p - a);
    double s = ((p - a).real() * ab.real() + (p - a).imag() * ab.imag()) / L2;
    s = std::clamp(s, 0.0, 1.0);
    return std::abs(p - (a + s * ab));
}

inline HalfPath integrate_half(const models::WaveField& wf, Cx x0,
                               const IntegratorOptions& o, double dir,
                               bool detect_loop) {
    const models::BarrierModel& m = wf.model();
    const double escape = resolve_escape(o, m, x0);
    const double vcap = m.units.hbar / (m.units.mass * o.node_guard);
    const double vfloor = 1e-5 * m.units.hbar / (m.units.mass * m.a);
    const bool periodic = wf.periodic_strip();
    const double strip = pi * m.a;
    const double cut_re = cut_re_max(m) + 1e-3;
    const double im_cap = std::max(60.0 * m.a, std::abs(x0.imag()) + 5.0);

    // Cash-Karp embedded 4(5) tableau
    static constexpr double a21 = 1.0 / 5;
    static constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
    static constexpr double a41 = 3.0 / 10, a42 = -9.0 / 10, a43 = 6.0 / 5;
    static constexpr double a51 = -11.0 / 54, a52 = 5.0 / 2,
                            a53 = -70.0 / 27, a54 = 35.0 / 27;
    static constexpr double a61 = 1631.0 / 55296, a62 = 175.0 / 512,
                            a63 = 575.0 / 13824, a64 = 44275.0 / 110592,
                            a65 = 253.0 / 4096;
    static constexpr double b1 = 37.0 / 378, b3 = 250.0 / 621,
                            b4 = 125.0 / 594, b6 = 512.0 / 1771;
    static constexpr double e1 = 37.0 / 378 - 2825.0 / 27648,
                            e3 = 250.0 / 621 - 18575.0 / 48384,
                            e4 = 125.0 / 594 - 13525.0 / 55296,
                            e5 = -277.0 / 14336,
                            e6 = 512.0 / 1771 - 1.0 / 4;

    HalfPath out;
    const auto record = [&](double t, Cx x) {
        if (o.record_samples) out.samples.push_back({t, x});
    };

    Cx x = x0;
    double t = 0.0;
    record(t, x);
    out.end = x;

    FieldEval f0 = eval_velocity(wf, x, vcap);
    if (f0.node) {
        out.reason = TerminalReason::NodeHit;
        return out;
    }
    const Cx u0 = dir * f0.v / std::abs(f0.v);  // launch direction (loop test)

    double h = o.initial_step;
    long accepted = 0;
    bool left_launch_ball = false;
    Cx checkpoint = x;  // progress watchdog across 200-step windows

    while (t < o.max_time) {
        if (accepted >= 1000000) {
            out.reason = TerminalReason::TimedOut;
            out.end = x;
            return out;
        }
        h = std::min(h, o.max_time - t + 1e-12);
        const Cx k1 = dir * f0.v;

        bool node = false;
        const auto stage = [&](Cx xs) {
            const FieldEval fe = eval_velocity(wf, xs, vcap);
            if (fe.node) node = true;
            return dir * fe.v;
        };
        const Cx k2 = stage(x + h * (a21 * k1));
        const Cx k3 = node ? Cx{} : stage(x + h * (a31 * k1 + a32 * k2));
        const Cx k4 =
            node ? Cx{} : stage(x + h * (a41 * k1 + a42 * k2 + a43 * k3));
        const Cx k5 = node ? Cx{}
                           : stage(x + h * (a51 * k1 + a52 * k2 + a53 * k3 +
                                            a54 * k4));
        const Cx k6 = node ? Cx{}
                           : stage(x + h * (a61 * k1 + a62 * k2 + a63 * k3 +
                                            a64 * k4 + a65 * k5));
        if (node) {
            // a stage probed into a pole's throat; the path is ending on
            // a field defect, not recoverable by step control
            out.reason = TerminalReason::NodeHit;
            out.end = x;
            return out;
        }

        const Cx dx = h * (b1 * k1 + b3 * k3 + b4 * k4 + b6 * k6);
        const Cx err =
            h * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6);
        const Cx xn = x + dx;
        const double tol =
            o.abs_tol + o.rel_tol * std::max(std::abs(x), std::abs(xn));
        const double en = std::abs(err) / tol;

        if (en > 1.0) {
            h *= std::max(0.1, 0.9 * std::pow(en, -0.25));
            if (h < 1e-14) {
                out.underflow = true;
                out.reason = TerminalReason::TimedOut;
                out.end = x;
                return out;
            }
            continue;
        }

        const FieldEval fn = eval_velocity(wf, xn, vcap);
        if (fn.node) {
            out.reason = TerminalReason::NodeHit;
            out.end = xn;
            record(t + h, xn);
            return out;
        }

        // escape planes, with linear interpolation onto the plane (the
        // field is asymptotically uniform there, so the chord is exact
        // to leading order and the escape point is tolerance-stable)
        if (std::abs(xn.real()) > escape) {
            const double plane = xn.real() > 0.0 ? escape : -escape;
            const double th = (plane - x.real()) / (xn.real() - x.real());
            const Cx xe = x + th * (xn - x);
            record(t + th * h, xe);
            out.end = xe;
            out.reason = xn.real() > 0.0 ? TerminalReason::EscapedRight
                                         : TerminalReason::EscapedLeft;
            return out;
        }

        // branch-cut lines of the periodic continuations: v is genuinely
        // discontinuous across x_i = +-pi a (mod the period) on the
        // incident side, so the path ends there (reported like a field
        // defect, flagged apart).  Folding keeps every strip copy usable.
        if (periodic &&
            std::abs(std::remainder(xn.imag(), 2.0 * strip)) >
                strip - 1e-6 &&
            xn.real() < cut_re) {
            out.reason = TerminalReason::NodeHit;
            out.cut = true;
            out.end = xn;
            record(t + h, xn);
            return out;
        }
        if (std::abs(xn.imag()) > im_cap) {
            out.reason = TerminalReason::TimedOut;
            out.end = xn;
            record(t + h, xn);
            return out;
        }

        // stagnation floor: near a zero of psi' the approach is
        // exponential in time; once |v| is this small the remaining
        // motion is negligible and the endpoint marks the stagnation
        if (std::abs(fn.v) < vfloor) {
            out.reason = TerminalReason::TimedOut;
            out.stalled = true;
            out.end = xn;
            record(t + h, xn);
            return out;
        }

        if (detect_loop) {
            if (!left_launch_ball &&
                std::abs(xn - x0) > 20.0 * o.loop_tol)
                left_launch_ball = true;
            if (left_launch_ball && accepted >= 10 &&
                seg_distance(x, xn, x0) < 200.0 * o.loop_tol) {
                // candidate pass near the launch: re-walk this step with
                // small fixed substeps (the chord of an adaptive step can
                // sag several loop_tol away from the true arc)
                Cx xs = x;
                double best = std::abs(xs - x0);
                Cx vbest = k1;
                const int nsub = 64;
                const double hs = h / nsub;
                bool refine_node = false;
                try {
                    for (int i = 0; i < nsub; ++i) {
                        const Cx s1 = dir * wf.mdbb_velocity(xs);
                        const Cx s2 =
                            dir * wf.mdbb_velocity(xs + 0.5 * hs * s1);
                        const Cx s3 =
                            dir * wf.mdbb_velocity(xs + 0.5 * hs * s2);
                        const Cx s4 = dir * wf.mdbb_velocity(xs + hs * s3);
                        xs += hs / 6.0 * (s1 + 2.0 * s2 + 2.0 * s3 + s4);
                        const double d = std::abs(xs - x0);
                        if (d < best) {
                            best = d;
                            vbest = s4;
                        }
                    }
                } catch (const NodeProximity&) {
                    refine_node = true;
                }
                if (refine_node) {
                    out.reason = TerminalReason::NodeHit;
                    out.end = xn;
                    record(t + h, xn);
                    return out;
                }
                if (best < o.loop_tol) {
                    const Cx ud = vbest / std::abs(vbest);
                    const double cosang =
                        ud.real() * u0.real() + ud.imag() * u0.imag();
                    if (cosang > 0.99619469809174553) {  // within 5 deg
                        out.reason = TerminalReason::LoopClosed;
                        out.end = xn;
                        record(t + h, xn);
                        return out;
                    }
                }
            }
        }

        t += h;
        x = xn;
        f0 = fn;
        ++accepted;
        record(t, x);
        out.end = x;
        h *= std::min(5.0, 0.9 * std::pow(std::max(en, 1e-10), -0.2));

        // across a velocity discontinuity (the rectangular barrier edge
        // seen from a path pinned against it) the controller accepts
        // tiny steps forever; detect the lack of progress and stop with
        // the pinned endpoint
        if (accepted % 200 == 0) {
            if (std::abs(x - checkpoint) < 1e-6) {
                out.reason = TerminalReason::TimedOut;
                out.underflow = true;
                return out;
            }
            checkpoint = x;
        }
    }
    out.reason = TerminalReason::TimedOut;
    return out;
}

}  // namespace detail

// Full flow line through x0: adaptive RK4(5) in both time directions,
// halves concatenated so the sample times run from the backward end
// (t < 0) through the launch (t = 0) to the forward end.
inline Trajectory integrate_trajectory(const models::WaveField& wf, Cx x0,
                                       const IntegratorOptions& opts = {}) {
    if (!(opts.initial_step > 0.0) || !(opts.rel_tol > 0.0) ||
        !(opts.abs_tol > 0.0) || !(opts.max_time > 0.0) ||
        !(opts.node_guard > 0.0) || !(opts.loop_tol > 0.0))
        throw InvalidModel("integrate: options must be positive");

    Trajectory tr;
    tr.launch = x0;

    const detail::HalfPath fwd =
        detail::integrate_half(wf, x0, opts, +1.0, true);
    tr.terminal_reason = fwd.reason;
    tr.forward_end = fwd.end;
    tr.forward_underflow = fwd.underflow;
    tr.cut_hit = fwd.cut;

    if (fwd.reason == TerminalReason::LoopClosed) {
        // the closed orbit is already the whole flow line
        tr.backward_reason = TerminalReason::LoopClosed;
        tr.backward_end = fwd.end;
        tr.samples = fwd.samples;
        return tr;
    }

    const detail::HalfPath bwd =
        detail::integrate_half(wf, x0, opts, -1.0, false);
    tr.backward_reason = bwd.reason;
    tr.backward_end = bwd.end;
    tr.backward_underflow = bwd.underflow;
    tr.cut_hit = tr.cut_hit || bwd.cut;

    if (opts.record_samples) {
        tr.samples.reserve(bwd.samples.size() + fwd.samples.size());
        for (auto it = bwd.samples.rbegin(); it != bwd.samples.rend(); ++it)
            tr.samples.push_back({-it->t, it->x});
        // both halves recorded the launch itself; keep one copy
        if (!tr.samples.empty()) tr.samples.pop_back();
        tr.samples.insert(tr.samples.end(), fwd.samples.begin(),
                          fwd.samples.end());
    }
    return tr;
}

inline Trajectory integrate_trajectory(Cx x0, double E,
                                       const models::BarrierModel& m,
                                       const IntegratorOptions& opts = {}) {
    return integrate_trajectory(models::WaveField(m, E), x0, opts);
}

}  // namespace qtraj::dynamics
