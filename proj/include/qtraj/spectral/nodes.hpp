#pragma once

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "qtraj/cx.hpp"
#include "qtraj/cxfun/ppow.hpp"
#include "qtraj/errors.hpp"
#include "qtraj/models/wavefield.hpp"

namespace qtraj::spectral {

// Rectangle in the complex plane, used both as the node-search domain
// and (via its real interval) as the alpha selection window.
struct Window {
    double re_min = -10.0;
    double re_max = -4.0;
    double im_min = -pi;
    double im_max = pi;

    bool contains(Cx x, double slack = 0.0) const {
        return x.real() >= re_min - slack && x.real() <= re_max + slack &&
               x.imag() >= im_min - slack && x.imag() <= im_max + slack;
    }
};

struct Interval {
    double lo = -10.0;
    double hi = -4.0;
};

struct GridSize {
    int n_re = 200;
    int n_im = 200;
};

// The node chosen to anchor the integration line Re(x) = alpha of the
// reflection ansatz; beta is its height above the real axis.
struct PoleLocation {
    double alpha = 0.0;
    double beta = 0.0;
    double residual = 0.0;  // |psi| left at the refined node
    double E = 0.0;
};

struct NodeSearchDiag {
    int seeds = 0;
    int diverged = 0;    // Newton runs that left the window; dropped
    int duplicates = 0;  // refined points merged into an earlier node
};

namespace detail {

// Newton iteration x <- x - psi/psi' from a seed.  Returns true on
// convergence to a node inside the (slightly inflated) window.
inline bool refine_node(const models::WaveField& wf, Cx& x,
                        const Window& win, double slack) {
    for (int it = 0; it < 40; ++it) {
        const models::WaveSample ws = wf.sample(x);
        if (!is_finite(ws.psi) || !is_finite(ws.dpsi)) return false;
        const double scale = std::abs(ws.dpsi) + std::abs(ws.psi);
        if (scale == 0.0) return false;
        if (std::abs(ws.psi) < 1e-13 * scale) return true;
        const Cx step = ws.psi / ws.dpsi;
        x -= step;
        if (!win.contains(x, slack)) return false;
        if (std::abs(step) < 1e-14 * (1.0 + std::abs(x))) {
            return std::abs(wf.sample(x).psi) < 1e-11 * scale;
        }
    }
    return false;
}

inline void push_unique(std::vector<Cx>& nodes, Cx x, NodeSearchDiag* diag) {
    for (const Cx& n : nodes) {
        if (std::abs(n - x) < 1e-8) {
            if (diag) ++diag->duplicates;
            return;
        }
    }
    nodes.push_back(x);
}

inline void sort_nodes(std::vector<Cx>& nodes) {
    std::sort(nodes.begin(), nodes.end(), [](Cx a, Cx b) {
        if (a.real() != b.real()) return a.real() < b.real();
        return a.imag() < b.imag();
    });
}

}  // namespace detail

// Grid scan of |psi| over the window for local minima, each refined by
// Newton to a node of psi.  The window must sit on the incident side of
// the barrier: the scan relies on the velocity field having only
// isolated first-order poles there, not on the interior web of nodes.
inline std::vector<Cx> find_nodes(const models::WaveField& wf,
                                  const Window& win = {},
                                  const GridSize& grid = {},
                                  NodeSearchDiag* diag = nullptr) {
    if (win.re_max > -wf.model().a)
        throw InvalidModel("find_nodes: window reaches into the barrier");
    if (grid.n_re < 8 || grid.n_im < 8)
        throw InvalidModel("find_nodes: grid too coarse");

    const int nr = grid.n_re, ni = grid.n_im;
    const double dr = (win.re_max - win.re_min) / nr;
    const double di = (win.im_max - win.im_min) / ni;

    std::vector<double> amp((nr + 1) * (ni + 1));
    for (int i = 0; i <= nr; ++i)
        for (int j = 0; j <= ni; ++j) {
            const Cx x(win.re_min + i * dr, win.im_min + j * di);
            amp[i * (ni + 1) + j] = std::abs(wf.sample(x).psi);
        }

    const auto at = [&](int i, int j) { return amp[i * (ni + 1) + j]; };
    std::vector<Cx> nodes;
    const double slack = 2.0 * std::max(dr, di);
    for (int i = 1; i < nr; ++i)
        for (int j = 1; j < ni; ++j) {
            const double c = at(i, j);
            bool is_min = true;
            for (int di_ = -1; di_ <= 1 && is_min; ++di_)
                for (int dj = -1; dj <= 1; ++dj) {
                    if (di_ == 0 && dj == 0) continue;
                    if (at(i + di_, j + dj) < c) {
                        is_min = false;
                        break;
                    }
                }
            if (!is_min) continue;
            if (diag) ++diag->seeds;
            Cx x(win.re_min + i * dr, win.im_min + j * di);
            if (detail::refine_node(wf, x, win, slack))
                detail::push_unique(nodes, x, diag);
            else if (diag)
                ++diag->diverged;
        }
    detail::sort_nodes(nodes);
    return nodes;
}

inline std::vector<Cx> find_nodes(double E, const models::BarrierModel& m,
                                  const Window& win = {},
                                  const GridSize& grid = {},
                                  NodeSearchDiag* diag = nullptr) {
    return find_nodes(models::WaveField(m, E), win, grid, diag);
}

// Nodes of the incident-side asymptotic field c1 e^{-ikx} + c2 e^{ikx}:
// a lattice x_n = Log(-c1/c2)/(2ik) + n pi/k.  Exact for the
// rectangular model (whose region-I form is that field), asymptotic for
// the smooth families.
inline Cx asymptotic_node(const models::WaveField& wf, int n) {
    const auto [c1, c2] = wf.left_coefficients();
    const double k = wf.incident_wavenumber();
    const Cx x0 = cxfun::plog(-c1 / c2) / (2.0 * iu * k);
    return x0 + static_cast<double>(n) * pi / k;
}

// Fast node search: seed Newton from every asymptotic lattice member
// that can reach the window, refine, dedupe.  Equivalent to find_nodes
// on the incident side at a small fraction of the cost; sweeps and the
// beta curve use this path.
inline std::vector<Cx> lattice_nodes(const models::WaveField& wf,
                                     const Window& win = {},
                                     NodeSearchDiag* diag = nullptr) {
    const double k = wf.incident_wavenumber();
    const Cx base = asymptotic_node(wf, 0);
    const double spacing = pi / k;
    const int n_lo =
        static_cast<int>(std::floor((win.re_min - base.real()) / spacing)) - 1;
    const int n_hi =
        static_cast<int>(std::ceil((win.re_max - base.real()) / spacing)) + 1;

    std::vector<Cx> nodes;
    for (int n = n_lo; n <= n_hi; ++n) {
        Cx x = base + static_cast<double>(n) * spacing;
        if (!win.contains(x, 0.5 * spacing)) continue;
        if (diag) ++diag->seeds;
        if (detail::refine_node(wf, x, win, 0.5 * spacing)) {
            if (win.contains(x)) detail::push_unique(nodes, x, diag);
        } else if (diag) {
            ++diag->diverged;
        }
    }
    detail::sort_nodes(nodes);
    return nodes;
}

// Fold an imaginary coordinate into the principal strip (-pi a, pi a].
inline double fold_beta(double beta, double a) {
    const double period = 2.0 * pi * a;
    double b = beta - period * std::round(beta / period);
    if (b <= -pi * a) b += period;
    return b;
}

// Pick the pole anchoring the integration line: the node with the most
// negative real part inside the alpha window.  For the periodic models
// beta is folded into the principal strip.
inline PoleLocation select_integration_pole(const std::vector<Cx>& nodes,
                                            const models::WaveField& wf,
                                            const Interval& alpha_window = {}) {
    const Cx* best = nullptr;
    for (const Cx& n : nodes) {
        if (n.real() < alpha_window.lo || n.real() > alpha_window.hi) continue;
        if (!best || n.real() < best->real()) best = &n;
    }
    if (!best)
        throw NoPoleInWindow("select_integration_pole: no node in window [" +
                             std::to_string(alpha_window.lo) + ", " +
                             std::to_string(alpha_window.hi) + "]");
    PoleLocation p;
    p.alpha = best->real();
    p.beta = wf.periodic_strip() ? fold_beta(best->imag(), wf.model().a)
                                 : best->imag();
    p.residual = std::abs(wf.sample(*best).psi);
    p.E = wf.energy();
    return p;
}

struct BetaPoint {
    double E = 0.0;
    double beta = 0.0;
    bool ok = false;
    std::string error;
};

// beta(E) along an energy grid; failures are recorded per energy rather
// than aborting the curve.
inline std::vector<BetaPoint> beta_curve(const models::BarrierModel& m,
                                         const std::vector<double>& E_grid,
                                         const Interval& alpha_window = {}) {
    std::vector<BetaPoint> out;
    out.reserve(E_grid.size());
    const Window win{alpha_window.lo, alpha_window.hi, -pi * m.a, pi * m.a};
    for (double E : E_grid) {
        BetaPoint bp;
        bp.E = E;
        try {
            const models::WaveField wf(m, E);
            std::vector<Cx> nodes = lattice_nodes(wf, win);
            if (nodes.empty()) nodes = find_nodes(wf, win);
            bp.beta = select_integration_pole(nodes, wf, alpha_window).beta;
            bp.ok = true;
        } catch (const Error& e) {
            bp.error = e.what();
        }
        out.push_back(bp);
    }
    return out;
}

}  // namespace qtraj::spectral
