#pragma once

#include <cmath>
#include <string>
#include <vector>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "qtraj/cx.hpp"
#include "qtraj/errors.hpp"
#include "qtraj/models/rectangular.hpp"
#include "qtraj/models/wavefield.hpp"
#include "qtraj/parallel.hpp"
#include "qtraj/spectral/nodes.hpp"

namespace qtraj::tunneling {

// One energy's worth of sweep output.  deviation = R_ansatz - R_standard
// is the quantity the deviation figures plot; quadrature_error_estimate
// propagates the two panel estimates through the ratio.
struct ReflectionRecord {
    double E = 0.0;
    spectral::PoleLocation pole{};
    double R_ansatz = 0.0;
    double R_standard = 0.0;
    double deviation = 0.0;
    double lambda_or_L = 0.0;
    double quadrature_error_estimate = 0.0;
    bool ok = false;
    std::string error;
};

// Complex-extended probability density psi*(x) psi(x), both factors at
// the same complex point: the squared modulus, real and nonnegative.
inline double extended_density(const models::WaveField& wf, Cx x) {
    const models::BarrierModel& m = wf.model();
    if (m.kind == models::BarrierKind::Rectangular &&
        std::abs(x.imag()) > 20.0 && x.real() < -m.a) {
        // incident-region closed form: the two exponentials plus an
        // x_i-independent cross term; evaluating the expansion directly
        // keeps the integrand exact out to the overflow guard
        const auto [c1, c2] = wf.left_coefficients();  // (B, A)
        const double k = wf.incident_wavenumber();
        const double xi = x.imag();
        return std::norm(c2) * std::exp(-2.0 * k * xi) +
               std::norm(c1) * std::exp(2.0 * k * xi) +
               2.0 * (c2 * std::conj(c1) *
                      std::exp(Cx(0.0, 2.0 * k * x.real())))
                         .real();
    }
    return std::norm(wf.sample(x).psi);
}

namespace detail {

struct PanelRatio {
    double value = 0.0;
    double err = 0.0;  // relative error estimate of the ratio
};

// num / den with num = integral over [split, top], den over [bottom,
// split], both along Re x = line_re.
inline PanelRatio density_ratio(const models::WaveField& wf, double line_re,
                                double bottom, double split, double top,
                                double rel_tol) {
    using GK = boost::math::quadrature::gauss_kronrod<double, 15>;
    const auto f = [&](double xi) {
        return extended_density(wf, Cx(line_re, xi));
    };
    double err_num = 0.0, err_den = 0.0;
    const double num = GK::integrate(f, split, top, 15, rel_tol, &err_num);
    const double den =
        GK::integrate(f, bottom, split, 15, rel_tol, &err_den);
    if (!(num >= 0.0) || !(den > 0.0) || !std::isfinite(num) ||
        !std::isfinite(den))
        throw QuadratureFailure(
            "reflection ansatz: non-finite or non-positive panel");
    PanelRatio r;
    r.value = num / den;
    r.err = r.value * (err_num / (num > 0.0 ? num : 1.0) + err_den / den);
    return r;
}

}  // namespace detail

// Reflection ansatz for a non-periodic (rectangular) model: the ratio of
// extended density integrated above the node ordinate to that below it,
// along the vertical line through the pole, truncated at +-Lambda.  The
// truncation error decays like Lambda e^{-2 k Lambda}.
inline double reflection_ansatz_unbounded(const models::WaveField& wf,
                                          const spectral::PoleLocation& pole,
                                          double Lambda,
                                          double* err_estimate = nullptr,
                                          double quad_rel_tol = 1e-10) {
    if (wf.periodic_strip())
        throw InvalidModel(
            "reflection_ansatz_unbounded: model has a periodic strip; use "
            "the periodic form");
    if (!(Lambda > std::abs(pole.beta) + 1.0))
        throw InvalidModel(
            "reflection_ansatz_unbounded: Lambda must exceed |beta| + 1");
    if (2.0 * wf.incident_wavenumber() * Lambda >= 700.0)
        throw InvalidModel(
            "reflection_ansatz_unbounded: 2 k Lambda would overflow the "
            "density");
    const detail::PanelRatio r = detail::density_ratio(
        wf, pole.alpha, -Lambda, pole.beta, Lambda, quad_rel_tol);
    if (err_estimate) *err_estimate = r.err;
    return r.value;
}

inline double reflection_ansatz_unbounded(double E,
                                          const models::BarrierModel& m,
                                          const spectral::PoleLocation& pole,
                                          double Lambda,
                                          double* err_estimate = nullptr) {
    return reflection_ansatz_unbounded(models::WaveField(m, E), pole,
                                       Lambda, err_estimate);
}

// Periodic form: the strip has period 2L with L = pi a, and the
// integration endpoints sit exactly on the branch-cut lines so a cut
// never falls inside a panel.
inline double reflection_ansatz_periodic(const models::WaveField& wf,
                                         const spectral::PoleLocation& pole,
                                         double* err_estimate = nullptr,
                                         double quad_rel_tol = 1e-10) {
    if (!wf.periodic_strip())
        throw InvalidModel(
            "reflection_ansatz_periodic: model is not periodic; use the "
            "unbounded form");
    const double L = pi * wf.model().a;
    if (!(pole.beta > -L && pole.beta < L))
        throw BetaOutOfPeriod(
            "reflection_ansatz_periodic: beta outside (-pi a, pi a)");
    const detail::PanelRatio r = detail::density_ratio(
        wf, pole.alpha, -L, pole.beta, L, quad_rel_tol);
    if (err_estimate) *err_estimate = r.err;
    return r.value;
}

inline double reflection_ansatz_periodic(double E,
                                         const models::BarrierModel& m,
                                         const spectral::PoleLocation& pole,
                                         double* err_estimate = nullptr) {
    return reflection_ansatz_periodic(models::WaveField(m, E), pole,
                                      err_estimate);
}

struct SweepConfig {
    double Lambda = 50.0;              // rectangular truncation
    spectral::Interval window{};       // pole-selection window
    double quad_rel_tol = 1e-10;
};

// Per-energy pipeline: pole -> line -> quadrature -> standard reference.
// Failures are recorded per energy; the sweep itself never throws.
inline std::vector<ReflectionRecord> deviation_sweep(
    const models::BarrierModel& m, const std::vector<double>& E_grid,
    const SweepConfig& cfg = {}) {
    std::vector<ReflectionRecord> out(E_grid.size());
    parallel_for(E_grid.size(), [&](std::size_t i) {
        ReflectionRecord& rec = out[i];
        rec.E = E_grid[i];
        try {
            const models::WaveField wf(m, rec.E);
            spectral::Window win;
            win.re_min = cfg.window.lo;
            win.re_max = cfg.window.hi;
            win.im_min = -pi * m.a;
            win.im_max = pi * m.a;
            const std::vector<Cx> nodes = spectral::lattice_nodes(wf, win);
            rec.pole = spectral::select_integration_pole(nodes, wf,
                                                         cfg.window);
            double err = 0.0;
            if (wf.periodic_strip()) {
                rec.lambda_or_L = pi * m.a;
                rec.R_ansatz = reflection_ansatz_periodic(
                    wf, rec.pole, &err, cfg.quad_rel_tol);
            } else {
                rec.lambda_or_L = cfg.Lambda;
                rec.R_ansatz = reflection_ansatz_unbounded(
                    wf, rec.pole, cfg.Lambda, &err, cfg.quad_rel_tol);
            }
            rec.quadrature_error_estimate = err;
            rec.R_standard = wf.R_standard();
            rec.deviation = rec.R_ansatz - rec.R_standard;
            rec.ok = true;
        } catch (const Error& e) {
            rec.ok = false;
            rec.error = e.what();
        }
    });
    return out;
}

}  // namespace qtraj::tunneling
