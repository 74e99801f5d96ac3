#include <catch2/catch_amalgamated.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <sys/wait.h>

#include <json.hpp>

#include "qtraj/models/barrier.hpp"
#include "support/csv.hpp"

// The CLI is exercised as a subprocess, exactly as a user would run it:
// these tests pin the output schemas, the documented example values, the
// exit-code contract, and byte-level determinism.

namespace {

namespace fs = std::filesystem;

std::string tmp_path(const std::string& name) {
    return (fs::temp_directory_path() / ("qtraj_cli_" + name)).string();
}

int run_cli(const std::string& args) {
    const std::string cmd =
        std::string(QTRAJ_CLI_BIN) + " " + args + " >/dev/null 2>/dev/null";
    const int st = std::system(cmd.c_str());
    return (st != -1 && WIFEXITED(st)) ? WEXITSTATUS(st) : -1;
}

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    REQUIRE(in.good());
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

}  // namespace

TEST_CASE("potential profiles hit the documented anchor values", "[cli]") {
    const std::string out = tmp_path("pot.csv");

    // symmetric barrier: V(0) = V0 = 1; grid is symmetric about zero so
    // the middle row of an odd grid sits exactly on the peak
    REQUIRE(run_cli("potential --model ahmed --c 1 --n 41 --out " + out) == 0);
    auto table = testsupport::read_csv(out);
    REQUIRE(table.rows.size() == 41);
    CHECK(table.rows[20].num("x") == 0.0);
    CHECK(table.rows[20].num("V") == Catch::Approx(1.0).margin(1e-12));

    // the soft step rises from 0 to V0 through half height at the origin
    REQUIRE(run_cli("potential --model softstep --n 41 --out " + out) == 0);
    table = testsupport::read_csv(out);
    CHECK(table.rows.front().num("V") < 1e-4);
    CHECK(table.rows[20].num("V") == Catch::Approx(0.5).margin(1e-12));
    CHECK(table.rows.back().num("V") > 1.0 - 1e-4);

    // asymmetric barrier: the CLI must sample the same function the
    // library exposes, peak included
    REQUIRE(run_cli("potential --model ahmed --c 0.5 --n 41 --out " + out) ==
            0);
    table = testsupport::read_csv(out);
    const auto m = qtraj::models::make_ahmed(1.0, 1.0, 0.5);
    for (const auto& row : table.rows) {
        const double x = row.num("x");
        const double want =
            qtraj::models::potential_at(m, qtraj::Cx(x, 0.0)).real();
        CHECK(row.num("V") == Catch::Approx(want).margin(1e-13));
    }
}

TEST_CASE("the rectangular sweep matches its closed form row by row",
          "[cli]") {
    const std::string out = tmp_path("sweep.csv");
    REQUIRE(run_cli("sweep --model rect --emin 0.1 --emax 2.2 --n 22 --out " +
                    out) == 0);
    const auto table = testsupport::read_csv(out);
    REQUIRE(table.rows.size() == 22);
    double e_prev = 0.0;
    for (const auto& row : table.rows) {
        CAPTURE(row.get("E"));
        CHECK(row.get("status") == "ok");
        CHECK(std::abs(row.num("deviation")) < 1e-3);
        CHECK(row.num("deviation") ==
              Catch::Approx(row.num("R_ansatz") - row.num("R_standard"))
                  .margin(1e-15));
        CHECK(row.num("E") == Catch::Approx(e_prev + 0.1).margin(1e-12));
        e_prev = row.num("E");
    }
}

TEST_CASE("a one-point sweep degenerates to the reflection record", "[cli]") {
    const std::string a = tmp_path("one_sweep.csv");
    const std::string b = tmp_path("one_refl.csv");
    REQUIRE(run_cli("sweep --model rect --emin 0.98 --n 1 --out " + a) == 0);
    REQUIRE(run_cli("reflection --model rect --energy 0.98 --out " + b) == 0);
    const auto ra = testsupport::read_csv(a);
    const auto rb = testsupport::read_csv(b);
    REQUIRE(ra.rows.size() == 1);
    REQUIRE(rb.rows.size() == 1);
    // identical records, column by column (the provenance line differs by
    // the command name, the data must not)
    for (const auto& col : *ra.header)
        CHECK(ra.rows[0].get(col) == rb.rows[0].get(col));
}

TEST_CASE("gamma and beta curves carry the documented Eckart values",
          "[cli]") {
    const std::string out = tmp_path("gb.csv");
    REQUIRE(run_cli("gamma-beta --model ahmed --emin 0.8 --emax 1.2 --n 5 "
                    "--out " +
                    out) == 0);
    const auto table = testsupport::read_csv(out);
    REQUIRE(table.rows.size() == 5);
    CHECK(table.rows.front().num("beta") ==
          Catch::Approx(0.0365).margin(5e-4));
    CHECK(table.rows.back().num("beta") ==
          Catch::Approx(0.3399).margin(5e-4));
    // both the node ordinate and the tunneling boundary rise with energy
    for (std::size_t i = 1; i < table.rows.size(); ++i) {
        CAPTURE(i);
        CHECK(table.rows[i].get("status") == "ok");
        CHECK(table.rows[i].num("beta") > table.rows[i - 1].num("beta"));
        CHECK(table.rows[i].num("gamma") > table.rows[i - 1].num("gamma"));
    }
}

TEST_CASE("an evanescent transmitted channel leaves the gamma cell empty",
          "[cli]") {
    // soft step below its asymptotic height: total reflection, so no
    // launch ordinate separates tunneled from reflected flow
    const std::string out = tmp_path("gb_soft.csv");
    REQUIRE(run_cli("gamma-beta --model softstep --energy 0.5 --out " + out) ==
            0);
    const auto table = testsupport::read_csv(out);
    REQUIRE(table.rows.size() == 1);
    CHECK(table.rows[0].get("status") == "ok");
    CHECK(!table.rows[0].get("beta").empty());
    CHECK(table.rows[0].get("gamma").empty());
}

TEST_CASE("trajectory landmarks include the documented nodes", "[cli]") {
    // an empty launch grid still yields a valid file whose landmark
    // comments carry the node lattice and the flow sources
    const std::string out = tmp_path("land.csv");
    REQUIRE(run_cli("trajectories --model rect --energy 0.98 --n 0 --out " +
                    out) == 0);
    std::string text = slurp(out);
    CHECK(text.find("-4.5998") != std::string::npos);
    CHECK(text.find("0.06814") != std::string::npos);
    CHECK(testsupport::read_csv(out).rows.empty());

    REQUIRE(run_cli("trajectories --model ahmed --energy 1.0 --n 0 --out " +
                    out) == 0);
    text = slurp(out);
    CHECK(text.find("-9.68207") != std::string::npos);
    CHECK(text.find("0.14901") != std::string::npos);
}

TEST_CASE("trajectory classes split at the tunneling boundary", "[cli]") {
    const std::string out = tmp_path("traj.json");
    REQUIRE(run_cli("trajectories --model ahmed --energy 1.0 --n 8 "
                    "--format json --out " +
                    out) == 0);
    const auto j = nlohmann::json::parse(slurp(out));
    REQUIRE(j.at("trajectories").size() == 8);
    CHECK(j.at("units").at("hbar") == 1.0);
    CHECK(j.at("launch_line").at("alpha").get<double>() ==
          Catch::Approx(-9.68208).margin(1e-4));

    // the boundary ordinate for this line is gamma = -0.0604: three of
    // the eight launches sit below it and must tunnel, the rest must not
    const double gamma = -0.0604;
    for (const auto& t : j.at("trajectories")) {
        const double xi = t.at("launch").at(1).get<double>();
        const std::string cls = t.at("class").get<std::string>();
        CAPTURE(xi, cls);
        CHECK((cls == "tunneled" || cls == "reflected" || cls == "closed" ||
               cls == "repeller-left" || cls == "repeller-right"));
        if (xi < gamma - 0.02)
            CHECK(cls == "tunneled");
        else if (xi > gamma + 0.02)
            CHECK(cls != "tunneled");
        CHECK(t.at("points").size() > 10);
    }
}

TEST_CASE("identical configs produce byte-identical files", "[cli]") {
    const std::string a = tmp_path("det_a");
    const std::string b = tmp_path("det_b");
    REQUIRE(run_cli("sweep --model ahmed --emin 0.5 --emax 1.5 --n 7 --out " +
                    a) == 0);
    REQUIRE(run_cli("sweep --model ahmed --emin 0.5 --emax 1.5 --n 7 --out " +
                    b) == 0);
    CHECK(slurp(a) == slurp(b));

    REQUIRE(run_cli("trajectories --model ahmed --energy 1.0 --n 4 "
                    "--format json --out " +
                    a) == 0);
    REQUIRE(run_cli("trajectories --model ahmed --energy 1.0 --n 4 "
                    "--format json --out " +
                    b) == 0);
    CHECK(slurp(a) == slurp(b));
}

TEST_CASE("exit codes separate validation, numerical, and I/O failures",
          "[cli]") {
    CHECK(run_cli("reflection --model bogus --energy 1.0") == 1);
    CHECK(run_cli("reflection") == 1);          // --energy is required
    CHECK(run_cli("reflection --energy 1.0 --badflag") == 1);
    CHECK(run_cli("nosuchcommand") == 1);

    // a pole window with no node in it fails every row: the file is
    // still written, with the diagnostic in the status column
    const std::string out = tmp_path("bad_window.csv");
    CHECK(run_cli("sweep --model rect --emin 0.5 --emax 0.6 --n 2 "
                  "--alpha-min -4.3 --alpha-max -4.1 --out " +
                  out) == 2);
    const auto table = testsupport::read_csv(out);
    REQUIRE(table.rows.size() == 2);
    for (const auto& row : table.rows) {
        CHECK(row.get("status") != "ok");
        CHECK(row.get("R_ansatz").empty());
    }

    CHECK(run_cli("reflection --energy 1.0 --out /nonexistent-dir/x.csv") ==
          3);
}

TEST_CASE("command-line flags override the config file", "[cli]") {
    const std::string cfgp = tmp_path("conf.ini");
    {
        std::ofstream f(cfgp);
        f << "model = ahmed\nenergy = 1.0\n";
    }
    const std::string out = tmp_path("conf_out.csv");
    REQUIRE(run_cli("reflection --config " + cfgp + " --out " + out) == 0);
    auto table = testsupport::read_csv(out);
    REQUIRE(table.rows.size() == 1);
    CHECK(table.rows[0].num("E") == 1.0);

    REQUIRE(run_cli("reflection --config " + cfgp + " --energy 0.5 --out " +
                    out) == 0);
    table = testsupport::read_csv(out);
    CHECK(table.rows[0].num("E") == 0.5);
}
