#include <catch2/catch_amalgamated.hpp>

#include "qtraj/cxfun/hyp2f1.hpp"
#include "support/csv.hpp"

using qtraj::Cx;
using qtraj::iu;
using qtraj::pi;
using qtraj::cxfun::Hyp2F1Diag;
using qtraj::cxfun::hyp2f1;
using qtraj::cxfun::hyp2f1_dw;
using qtraj::cxfun::hyp2f1_near_one;
using qtraj::cxfun::lgamma_cx;
using qtraj::cxfun::ppow;

namespace {
double rel_err(Cx got, Cx want) {
    return std::abs(got - want) / std::max(1e-30, std::abs(want));
}
Cx gr(Cx n1, Cx n2, Cx d1, Cx d2) {
    return std::exp(lgamma_cx(n1) + lgamma_cx(n2) - lgamma_cx(d1) - lgamma_cx(d2));
}
}  // namespace

// Fifteen closed-form identities, chosen to cover the direct series and
// each argument mapping.

TEST_CASE("identity 1: F(a,b;b;w) = (1-w)^-a", "[hyp2f1]") {
    const Cx a(0.37, 0.21), b(1.4, -0.6);
    for (const Cx w : {Cx(0.3, 0.1), Cx(-2.0, 0.4), Cx(0.2, 0.9)}) {
        CHECK(rel_err(hyp2f1(a, b, b, w), ppow(1.0 - w, -a)) < 1e-12);
    }
}

TEST_CASE("identity 2: F(1,1;2;w) = -log(1-w)/w", "[hyp2f1]") {
    for (const Cx w : {Cx(0.25, 0.0), Cx(0.4, -0.2), Cx(-0.45, 0.1)}) {
        CHECK(rel_err(hyp2f1(1.0, 1.0, 2.0, w), -std::log(1.0 - w) / w) < 1e-13);
    }
}

TEST_CASE("identity 3: F(1/2,1;3/2;w^2) = atanh(w)/w", "[hyp2f1]") {
    for (const Cx w : {Cx(0.5, 0.0), Cx(0.3, 0.4), Cx(0.0, 0.65)}) {
        CHECK(rel_err(hyp2f1(0.5, 1.0, 1.5, w * w), std::atanh(w) / w) < 1e-13);
    }
}

TEST_CASE("identity 4: F(1/2,1/2;3/2;w^2) = asin(w)/w", "[hyp2f1]") {
    for (const Cx w : {Cx(0.6, 0.0), Cx(0.2, -0.5)}) {
        CHECK(rel_err(hyp2f1(0.5, 0.5, 1.5, w * w), std::asin(w) / w) < 1e-13);
    }
}

TEST_CASE("identity 5: F(a,b;c;0) = 1", "[hyp2f1]") {
    CHECK(hyp2f1(Cx(0.3, 700.0), Cx(-4.0, 2.0), Cx(0.1), Cx(0.0)) == Cx(1.0));
}

TEST_CASE("identity 6: terminating series is the explicit polynomial", "[hyp2f1]") {
    const Cx b(0.8, -1.1), c(1.9, 0.3);
    for (const Cx w : {Cx(0.3, 0.2), Cx(-4.0, 1.0), Cx(2.0, 2.0)}) {
        const Cx poly = 1.0 - 2.0 * b * w / c +
                        b * (b + 1.0) * w * w / (c * (c + 1.0));
        CHECK(rel_err(hyp2f1(-2.0, b, c, w), poly) < 1e-12);
    }
}

TEST_CASE("identity 7: Gauss summation at w = 1", "[hyp2f1]") {
    const Cx a(0.31, 0.4), b(0.52, -0.7), c(2.9, 0.1);  // Re(c-a-b) > 0
    CHECK(rel_err(hyp2f1(a, b, c, 1.0), gr(c, c - a - b, c - a, c - b)) < 1e-12);
}

TEST_CASE("identity 8: second Gauss theorem at w = 1/2", "[hyp2f1]") {
    const Cx a(0.4, 0.2), b(0.9, -0.3);
    const Cx c = (a + b + 1.0) / 2.0;
    const Cx want = gr(0.5, c, (a + 1.0) / 2.0, (b + 1.0) / 2.0);
    CHECK(rel_err(hyp2f1(a, b, c, 0.5), want) < 1e-12);
}

TEST_CASE("identity 9: Bailey's theorem F(a,1-a;c;1/2)", "[hyp2f1]") {
    const Cx a(0.35, 0.6), c(1.8, -0.4);
    const Cx want = gr(c / 2.0, (c + 1.0) / 2.0, (c + a) / 2.0, (c - a + 1.0) / 2.0);
    CHECK(rel_err(hyp2f1(a, 1.0 - a, c, 0.5), want) < 1e-12);
}

TEST_CASE("identity 10: Euler transformation", "[hyp2f1]") {
    const Cx a(0.4, 0.9), b(1.2, -0.5), c(2.1, 0.33);
    for (const Cx w : {Cx(0.35, 0.1), Cx(-1.5, 0.8)}) {
        const Cx lhs = hyp2f1(a, b, c, w);
        const Cx rhs = ppow(1.0 - w, c - a - b) * hyp2f1(c - a, c - b, c, w);
        CHECK(rel_err(lhs, rhs) < 1e-12);
    }
}

TEST_CASE("identity 11: Pfaff transformation", "[hyp2f1]") {
    const Cx a(0.7, -0.2), b(0.9, 0.4), c(2.4, 0.1);
    for (const Cx w : {Cx(0.3, 0.15), Cx(-0.4, -0.2)}) {
        const Cx lhs = hyp2f1(a, b, c, w);
        const Cx rhs = ppow(1.0 - w, -a) * hyp2f1(a, c - b, c, w / (w - 1.0));
        CHECK(rel_err(lhs, rhs) < 1e-12);
    }
}

TEST_CASE("identity 12: symmetry in the upper parameters", "[hyp2f1]") {
    const Cx a(0.25, 1.3), b(1.6, -0.8), c(2.2, 0.4);
    // Large |w| routes through the 1/w or 1/(1-w) mappings, which treat a
    // and b asymmetrically, so this exercises real code differences.
    for (const Cx w : {Cx(0.4, 0.1), Cx(-6.0, 2.0), Cx(3.0, 4.0)}) {
        CHECK(rel_err(hyp2f1(a, b, c, w), hyp2f1(b, a, c, w)) < 1e-12);
    }
}

TEST_CASE("identity 13: F(1,1;2;w) at mapped arguments", "[hyp2f1]") {
    // a - b = 0 here, so every two-series inverse mapping is degenerate
    // and must survive through the regularizing perturbation.  The 1e-9
    // parameter shift leaves a pole pair of size ~1/|shift| cancelling in
    // double precision, which caps the accuracy near 1e-16/1e-9 = 1e-7.
    for (const Cx w : {Cx(-5.0, 0.0), Cx(0.0, 3.0), Cx(10.0, 2.0), Cx(-0.5, -7.0)}) {
        CHECK(rel_err(hyp2f1(1.0, 1.0, 2.0, w), -std::log(1.0 - w) / w) < 1e-5);
    }
}

TEST_CASE("identity 14: asin form through the Pfaff mapping", "[hyp2f1]") {
    // w^2 = -0.8 routes through w/(w-1), the only single-series mapping.
    const Cx w = std::sqrt(Cx(0.8)) * iu;
    CHECK(rel_err(hyp2f1(0.5, 0.5, 1.5, w * w), std::asin(w) / w) < 1e-12);
}

TEST_CASE("identity 15: Chebyshev case F(-n,n;1/2;sin^2 t) = cos 2nt", "[hyp2f1]") {
    const double t = 0.5;
    const double s2 = std::sin(t) * std::sin(t);
    CHECK(rel_err(hyp2f1(-3.0, 3.0, 0.5, s2), Cx(std::cos(6.0 * t))) < 1e-12);
}

TEST_CASE("reference table: values and derivatives", "[hyp2f1]") {
    const auto table = testsupport::read_csv(testsupport::data_file("hyp2f1_oracle.csv"));
    REQUIRE(table.rows.size() == 50);
    for (const auto& row : table.rows) {
        const std::string tag = row.get("tag");
        const Cx a = row.cx("a"), b = row.cx("b"), c = row.cx("c"), w = row.cx("w");
        Hyp2F1Diag diag;
        const Cx f = hyp2f1(a, b, c, w, &diag);
        const Cx df = hyp2f1_dw(a, b, c, w);
        CAPTURE(tag, a, b, c, w, diag.transform, diag.terms);
        // Near an integer value of a-b or c-a-b the two-series mappings
        // cancel heavily (and within 1e-8 of the integer the parameters
        // get nudged), so those rows cannot reach the clean 1e-9 target.
        const bool touchy = qtraj::near_integer(a - b, 1e-3) ||
                            qtraj::near_integer(c - a - b, 1e-3);
        // Conditioning scales with the parameter magnitude: the barrier
        // rows with |Im| ~ 3e3 run 55-term series whose terms grow a few
        // hundred times larger than the sum before decaying.
        const double scale = std::max({std::abs(a), std::abs(b), std::abs(c)});
        double tol = touchy ? 2e-6 : 1e-9;
        if (!touchy && scale > 100.0)
            tol = 5e-9;
        CHECK(rel_err(f, row.cx("f")) < tol);
        CHECK(rel_err(df, row.cx("df")) < tol);
    }
}

TEST_CASE("derivative matches a central difference", "[hyp2f1]") {
    const Cx a(0.45, 0.8), b(1.3, -0.2), c(1.7, 0.5);
    const Cx w(0.3, 0.2);
    const double h = 1e-6;
    const Cx fd = (hyp2f1(a, b, c, w + h) - hyp2f1(a, b, c, w - h)) / (2.0 * h);
    CHECK(rel_err(hyp2f1_dw(a, b, c, w), fd) < 1e-8);
}

TEST_CASE("diagnostics report the applied mapping", "[hyp2f1]") {
    Hyp2F1Diag diag;
    hyp2f1(Cx(0.3), Cx(0.8), Cx(1.9), Cx(0.2), &diag);
    CHECK(diag.transform == 0);
    CHECK(diag.terms > 0);
    CHECK_FALSE(diag.perturbed);

    hyp2f1(Cx(0.3, 0.2), Cx(0.8, -0.1), Cx(1.9), Cx(0.93), &diag);
    CHECK(diag.transform != 0);
}

TEST_CASE("degenerate parameters are perturbed and flagged", "[hyp2f1]") {
    // c - a - b = 1 exactly; the 1-w mapping needs Gamma(a+b-c) = Gamma(-1).
    Hyp2F1Diag diag;
    const Cx f = hyp2f1(Cx(0.3), Cx(0.7), Cx(2.0), Cx(0.9), &diag);
    CHECK(diag.perturbed);
    CHECK(qtraj::is_finite(f));
}

TEST_CASE("unreachable corner raises ConvergenceFailure", "[hyp2f1]") {
    // At w = exp(i pi/3) every mapping has modulus exactly 1 and a slowly
    // divergent tail; the engine must refuse rather than return noise.
    const Cx w = std::exp(iu * (pi / 3.0));
    CHECK_THROWS_AS(hyp2f1(Cx(0.5, 1.0), Cx(0.7, -0.3), Cx(0.9, 0.2), w),
                    qtraj::ConvergenceFailure);
}

TEST_CASE("near-one entry point matches the generic path", "[hyp2f1]") {
    // same function, different route: F(a,b;c;1-u) with u handed over
    // exactly instead of being recovered as 1-w inside the engine
    const Cx a(0.5, -1.9), b(0.5, 2.6), c(1.0, -2.8);
    for (double r : {1e-3, 0.04, 0.3}) {
        for (double th : {0.4, 2.0, -2.5}) {
            const Cx u = r * Cx(std::cos(th), std::sin(th));
            CAPTURE(u);
            const Cx got = hyp2f1_near_one(a, b, c, u);
            const Cx want = hyp2f1(a, b, c, 1.0 - u);
            CHECK(std::abs(got - want) < 1e-11 * std::abs(want));
        }
    }
    CHECK_THROWS_AS(hyp2f1_near_one(a, b, c, Cx(0.7)),
                    qtraj::ConvergenceFailure);
    CHECK_THROWS_AS(hyp2f1_near_one(a, b, c, Cx(0.0)),
                    qtraj::ConvergenceFailure);
}
