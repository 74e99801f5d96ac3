#include <charconv>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "qtraj/cx.hpp"
#include "qtraj/dynamics/classify.hpp"
#include "qtraj/dynamics/field.hpp"
#include "qtraj/errors.hpp"
#include "qtraj/models/wavefield.hpp"
#include "qtraj/parallel.hpp"
#include "qtraj/spectral/nodes.hpp"
#include "qtraj/tunneling/reflection.hpp"

using json = nlohmann::ordered_json;
using qtraj::Cx;
using qtraj::pi;
using namespace qtraj;

namespace {

// exit codes: 0 success, 1 validation, 2 numerical (any row failed), 3 I/O
constexpr int kOk = 0, kBadConfig = 1, kNumerical = 2, kIo = 3;

struct RunConfig {
    std::string model = "rect";
    double v0 = 1.0, a = 1.0, c = 1.0;
    std::optional<double> energy;
    double emin = 0.1, emax = 2.0;
    std::optional<int> n;  // absent = per-command default
    double lambda = 50.0;
    double alpha_min = -10.0, alpha_max = -4.0;
    std::string format = "csv";
    std::string out;
    double tol = 0.0;  // 0 = module default
};

// shortest representation that round-trips to the same double
std::string fmt(double v) {
    char buf[32];
    const auto r = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, r.ptr);
}

std::string csv_safe(std::string s) {
    for (char& ch : s)
        if (ch == ',' || ch == '\n') ch = ';';
    return s;
}

models::BarrierModel build_model(const RunConfig& cfg) {
    if (cfg.model == "rect") return models::make_rectangular(cfg.v0, cfg.a);
    if (cfg.model == "ahmed") return models::make_ahmed(cfg.v0, cfg.a, cfg.c);
    if (cfg.model == "softstep") return models::make_softstep(cfg.v0, cfg.a);
    throw InvalidModel("unknown model '" + cfg.model +
                       "' (expected rect|ahmed|softstep)");
}

// canonical config echo: carried in every output so identical configs are
// recognizable and outputs stay timestamp-free (byte-identical reruns)
std::string config_echo(const std::string& cmd, const RunConfig& c) {
    std::ostringstream os;
    os << "qtraj " << cmd << " model=" << c.model << " v0=" << fmt(c.v0)
       << " a=" << fmt(c.a) << " c=" << fmt(c.c);
    if (c.energy) os << " energy=" << fmt(*c.energy);
    os << " emin=" << fmt(c.emin) << " emax=" << fmt(c.emax)
       << " n=" << (c.n ? std::to_string(*c.n) : std::string("default"))
       << " lambda=" << fmt(c.lambda) << " alpha=[" << fmt(c.alpha_min)
       << "," << fmt(c.alpha_max) << "]"
       << " tol=" << fmt(c.tol) << " format=" << c.format;
    return os.str();
}

json config_json(const RunConfig& c) {
    json j;
    j["model"] = c.model;
    j["v0"] = c.v0;
    j["a"] = c.a;
    j["c"] = c.c;
    if (c.energy) j["energy"] = *c.energy;
    j["emin"] = c.emin;
    j["emax"] = c.emax;
    if (c.n) j["n"] = *c.n;
    j["lambda"] = c.lambda;
    j["alpha_min"] = c.alpha_min;
    j["alpha_max"] = c.alpha_max;
    j["tol"] = c.tol;
    return j;
}

json units_json() {
    json u;
    u["hbar"] = 1.0;
    u["mass"] = 1.0;
    u["length"] = "a";
    u["energy"] = "V0";
    return u;
}

int write_output(const RunConfig& cfg, const std::string& payload) {
    if (cfg.out.empty()) {
        std::cout << payload;
        return kOk;
    }
    std::ofstream f(cfg.out, std::ios::binary);
    if (!f) {
        std::cerr << "error: cannot open '" << cfg.out << "' for writing\n";
        return kIo;
    }
    f << payload;
    return f.good() ? kOk : kIo;
}

std::vector<double> energy_grid(const RunConfig& cfg, int default_n) {
    if (cfg.energy) return {*cfg.energy};
    const int n = cfg.n.value_or(default_n);
    std::vector<double> g;
    if (n == 1) {
        g.push_back(cfg.emin);
        return g;
    }
    for (int i = 0; i < n; ++i)
        g.push_back(cfg.emin + (cfg.emax - cfg.emin) * i / (n - 1));
    return g;
}

const char* class_name(dynamics::TrajectoryClass c) {
    using TC = dynamics::TrajectoryClass;
    switch (c) {
        case TC::Tunneled: return "tunneled";
        case TC::Reflected: return "reflected";
        case TC::ClosedLoop: return "closed";
        case TC::RepellerLeft: return "repeller-left";
        case TC::RepellerRight: return "repeller-right";
        case TC::Indeterminate: return "indeterminate";
    }
    return "indeterminate";
}

// --- potential -----------------------------------------------------------

int cmd_potential(const RunConfig& cfg) {
    const models::BarrierModel m = build_model(cfg);
    const int n = cfg.n.value_or(401);
    const double lo = -10.0 * cfg.a, hi = 10.0 * cfg.a;
    std::vector<double> xs, vs;
    for (int i = 0; i < n; ++i) {
        const double x =
            n == 1 ? lo : lo + (hi - lo) * i / (n - 1);
        xs.push_back(x);
        vs.push_back(models::potential_at(m, Cx(x, 0.0)).real());
    }
    if (cfg.format == "json") {
        json j;
        j["command"] = "potential";
        j["config"] = config_json(cfg);
        j["units"] = units_json();
        json rows = json::array();
        for (int i = 0; i < n; ++i) rows.push_back({xs[i], vs[i]});
        j["columns"] = {"x", "V"};
        j["data"] = rows;
        return write_output(cfg, j.dump(2) + "\n");
    }
    std::ostringstream os;
    os << "# " << config_echo("potential", cfg) << "\n"
       << "x,V\n";
    for (int i = 0; i < n; ++i) os << fmt(xs[i]) << "," << fmt(vs[i]) << "\n";
    return write_output(cfg, os.str());
}

// --- reflection / sweep --------------------------------------------------

int emit_sweep(const char* name, const RunConfig& cfg,
               const std::vector<double>& grid) {
    const models::BarrierModel m = build_model(cfg);
    tunneling::SweepConfig sc;
    sc.Lambda = cfg.lambda;
    sc.window = {cfg.alpha_min, cfg.alpha_max};
    if (cfg.tol > 0.0) sc.quad_rel_tol = cfg.tol;
    const auto recs = tunneling::deviation_sweep(m, grid, sc);

    bool any_failed = false;
    for (const auto& r : recs) any_failed |= !r.ok;

    int rc;
    if (cfg.format == "json") {
        json j;
        j["command"] = name;
        j["config"] = config_json(cfg);
        j["units"] = units_json();
        json rows = json::array();
        for (const auto& r : recs) {
            json row;
            row["E"] = r.E;
            if (r.ok) {
                row["R_ansatz"] = r.R_ansatz;
                row["R_standard"] = r.R_standard;
                row["deviation"] = r.deviation;
                row["alpha"] = r.pole.alpha;
                row["beta"] = r.pole.beta;
                row["quad_err"] = r.quadrature_error_estimate;
            } else {
                row["error"] = r.error;
            }
            rows.push_back(row);
        }
        j["data"] = rows;
        rc = write_output(cfg, j.dump(2) + "\n");
    } else {
        std::ostringstream os;
        os << "# " << config_echo(name, cfg) << "\n"
           << "E,R_ansatz,R_standard,deviation,alpha,beta,quad_err,status\n";
        for (const auto& r : recs) {
            os << fmt(r.E) << ",";
            if (r.ok)
                os << fmt(r.R_ansatz) << "," << fmt(r.R_standard) << ","
                   << fmt(r.deviation) << "," << fmt(r.pole.alpha) << ","
                   << fmt(r.pole.beta) << ","
                   << fmt(r.quadrature_error_estimate) << ",ok\n";
            else
                os << ",,,,,," << csv_safe(r.error) << "\n";
        }
        rc = write_output(cfg, os.str());
    }
    if (rc != kOk) return rc;
    return any_failed ? kNumerical : kOk;
}

int cmd_reflection(const RunConfig& cfg) {
    if (!cfg.energy) {
        std::cerr << "error: reflection needs --energy\n";
        return kBadConfig;
    }
    return emit_sweep("reflection", cfg, {*cfg.energy});
}

int cmd_sweep(const RunConfig& cfg) {
    return emit_sweep("sweep", cfg, energy_grid(cfg, 39));
}

// --- gamma-beta ----------------------------------------------------------

int cmd_gamma_beta(const RunConfig& cfg) {
    const models::BarrierModel m = build_model(cfg);
    const std::vector<double> grid = energy_grid(cfg, 39);

    struct Row {
        double E = 0.0;
        std::optional<double> beta, gamma;
        std::string status = "ok";
    };
    std::vector<Row> rows(grid.size());
    dynamics::IntegratorOptions io;
    if (cfg.tol > 0.0) io.rel_tol = cfg.tol;
    parallel_for(grid.size(), [&](std::size_t i) {
        Row& row = rows[i];
        row.E = grid[i];
        try {
            const models::WaveField wf(m, row.E);
            spectral::Window win;
            win.re_min = cfg.alpha_min;
            win.re_max = cfg.alpha_max;
            win.im_min = -pi * m.a;
            win.im_max = pi * m.a;
            const auto nodes = spectral::lattice_nodes(wf, win);
            const auto pole = spectral::select_integration_pole(
                nodes, wf, {cfg.alpha_min, cfg.alpha_max});
            row.beta = pole.beta;
            try {
                row.gamma = dynamics::find_gamma(wf, pole.alpha, io).gamma;
            } catch (const NoTunnelingFound&) {
                // total reflection: the tunneled band is empty and gamma
                // is undefined; the row still carries beta
            }
        } catch (const Error& e) {
            row.status = e.what();
        }
    });

    bool any_failed = false;
    for (const auto& r : rows) any_failed |= r.status != "ok";

    int rc;
    if (cfg.format == "json") {
        json j;
        j["command"] = "gamma-beta";
        j["config"] = config_json(cfg);
        j["units"] = units_json();
        json data = json::array();
        for (const auto& r : rows) {
            json row;
            row["E"] = r.E;
            if (r.beta) row["beta"] = *r.beta;
            if (r.gamma) row["gamma"] = *r.gamma;
            if (r.status != "ok") row["error"] = r.status;
            data.push_back(row);
        }
        j["data"] = data;
        rc = write_output(cfg, j.dump(2) + "\n");
    } else {
        std::ostringstream os;
        os << "# " << config_echo("gamma-beta", cfg) << "\n"
           << "E,beta,gamma,status\n";
        for (const auto& r : rows) {
            os << fmt(r.E) << "," << (r.beta ? fmt(*r.beta) : "") << ","
               << (r.gamma ? fmt(*r.gamma) : "") << ","
               << csv_safe(r.status) << "\n";
        }
        rc = write_output(cfg, os.str());
    }
    if (rc != kOk) return rc;
    return any_failed ? kNumerical : kOk;
}

// --- trajectories --------------------------------------------------------

const char* reason_name(dynamics::TerminalReason r) {
    using TR = dynamics::TerminalReason;
    switch (r) {
        case TR::EscapedLeft: return "escaped-left";
        case TR::EscapedRight: return "escaped-right";
        case TR::LoopClosed: return "loop-closed";
        case TR::NodeHit: return "node-hit";
        case TR::TimedOut: return "timed-out";
    }
    return "timed-out";
}

int cmd_trajectories(const RunConfig& cfg) {
    if (!cfg.energy) {
        std::cerr << "error: trajectories needs --energy\n";
        return kBadConfig;
    }
    const models::BarrierModel m = build_model(cfg);
    const models::WaveField wf(m, *cfg.energy);

    spectral::Window win;
    win.re_min = cfg.alpha_min;
    win.re_max = cfg.alpha_max;
    win.im_min = -pi * m.a;
    win.im_max = pi * m.a;
    const auto nodes = spectral::lattice_nodes(wf, win);
    const auto pole = spectral::select_integration_pole(
        nodes, wf, {cfg.alpha_min, cfg.alpha_max});

    // launch band around the node ordinate, on the line through the pole
    const int n = cfg.n.value_or(40);
    std::vector<Cx> launches;
    for (int i = 0; i < n; ++i) {
        const double xi =
            n == 1 ? pole.beta - 1.0
                   : pole.beta - 1.0 + 2.0 * i / (n - 1);
        launches.push_back(Cx(pole.alpha, xi));
    }

    dynamics::IntegratorOptions io;
    if (cfg.tol > 0.0) io.rel_tol = cfg.tol;
    const auto field = dynamics::trajectory_field(wf, launches, io);

    std::vector<Cx> repellers;
    try {
        repellers = dynamics::find_repellers(wf, m.a, 0.0, pi * m.a - 0.05);
    } catch (const Error&) {
        // landmark extraction is best-effort decoration
    }

    if (cfg.format == "json") {
        json j;
        j["command"] = "trajectories";
        j["config"] = config_json(cfg);
        j["units"] = units_json();
        j["launch_line"] = {{"alpha", pole.alpha}, {"beta", pole.beta}};
        json nds = json::array();
        for (Cx nd : nodes) nds.push_back({nd.real(), nd.imag()});
        j["nodes"] = nds;
        json reps = json::array();
        for (Cx r : repellers) reps.push_back({r.real(), r.imag()});
        j["repellers"] = reps;
        json trs = json::array();
        for (const auto& tr : field) {
            json t;
            t["class"] = class_name(tr.cls);
            t["launch"] = {tr.launch.real(), tr.launch.imag()};
            t["terminal"] = reason_name(tr.terminal_reason);
            json pts = json::array();
            for (const auto& s : tr.samples)
                pts.push_back({s.x.real(), s.x.imag()});
            t["points"] = pts;
            trs.push_back(t);
        }
        j["trajectories"] = trs;
        return write_output(cfg, j.dump(2) + "\n");
    }
    std::ostringstream os;
    os << "# " << config_echo("trajectories", cfg) << "\n"
       << "# launch-line alpha=" << fmt(pole.alpha)
       << " beta=" << fmt(pole.beta) << "\n";
    for (Cx nd : nodes)
        os << "# node alpha=" << fmt(nd.real()) << " beta=" << fmt(nd.imag())
           << "\n";
    for (Cx r : repellers)
        os << "# repeller xr=" << fmt(r.real()) << " xi=" << fmt(r.imag())
           << "\n";
    os << "traj,class,t,xr,xi\n";
    for (std::size_t i = 0; i < field.size(); ++i)
        for (const auto& s : field[i].samples)
            os << i << "," << class_name(field[i].cls) << "," << fmt(s.t)
               << "," << fmt(s.x.real()) << "," << fmt(s.x.imag()) << "\n";
    return write_output(cfg, os.str());
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{
        "qtraj: complex quantum trajectories and the trajectory-based "
        "reflection probability for 1-D barrier eigenstates"};
    app.require_subcommand(1);
    app.set_config("--config", "", "key=value config file (flags win)");
    app.footer(
        "Environment: QTRAJ_THREADS caps worker threads.\n"
        "Exit codes: 0 ok, 1 bad configuration, 2 numerical failure in "
        "one or more rows, 3 I/O failure.");

    RunConfig cfg;
    app.add_option("--model", cfg.model, "rect|ahmed|softstep")
        ->capture_default_str();
    app.add_option("--v0", cfg.v0, "barrier height")->capture_default_str();
    app.add_option("--a", cfg.a, "barrier half-width / length scale")
        ->capture_default_str();
    app.add_option("--c", cfg.c, "ahmed asymmetry (1 = symmetric)")
        ->capture_default_str();
    double energy_in = 0.0;
    auto* eopt = app.add_option("--energy", energy_in, "single energy");
    app.add_option("--emin", cfg.emin, "sweep start")->capture_default_str();
    app.add_option("--emax", cfg.emax, "sweep end")->capture_default_str();
    int n_in = 0;
    auto* nopt =
        app.add_option("--n", n_in, "grid size / launch count")
            ->check(CLI::NonNegativeNumber);
    app.add_option("--lambda", cfg.lambda,
                   "integration half-length (rectangular model)")
        ->capture_default_str();
    app.add_option("--alpha-min", cfg.alpha_min, "pole window, left edge")
        ->capture_default_str();
    app.add_option("--alpha-max", cfg.alpha_max, "pole window, right edge")
        ->capture_default_str();
    app.add_option("--format", cfg.format, "csv|json")
        ->check(CLI::IsMember({"csv", "json"}))
        ->capture_default_str();
    app.add_option("--out", cfg.out, "output path (default: stdout)");
    app.add_option("--tol", cfg.tol,
                   "override tolerance (quadrature or integrator)")
        ->capture_default_str();

    auto* sub_pot =
        app.add_subcommand("potential", "sample V(x) on the real axis");
    auto* sub_traj = app.add_subcommand(
        "trajectories", "classified flow lines through the pole line");
    auto* sub_refl = app.add_subcommand(
        "reflection", "reflection ansatz at one energy");
    auto* sub_sweep = app.add_subcommand(
        "sweep", "reflection ansatz vs closed form over an energy grid");
    auto* sub_gb = app.add_subcommand(
        "gamma-beta", "node height and tunneling-boundary ordinate vs E");
    for (auto* s : {sub_pot, sub_traj, sub_refl, sub_sweep, sub_gb})
        s->fallthrough();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? kOk : kBadConfig;
    }
    if (eopt->count() > 0) cfg.energy = energy_in;
    if (nopt->count() > 0) cfg.n = n_in;

    try {
        if (sub_pot->parsed()) return cmd_potential(cfg);
        if (sub_traj->parsed()) return cmd_trajectories(cfg);
        if (sub_refl->parsed()) return cmd_reflection(cfg);
        if (sub_sweep->parsed()) return cmd_sweep(cfg);
        if (sub_gb->parsed()) return cmd_gamma_beta(cfg);
    } catch (const InvalidModel& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kBadConfig;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kNumerical;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kNumerical;
    }
    return kBadConfig;
}
