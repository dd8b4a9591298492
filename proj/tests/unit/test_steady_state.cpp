#include "crm/errors.hpp"
#include "crm/steady_state.hpp"

#include <doctest.h>

#include <cmath>

using namespace crm;

namespace {

ModelConfig two(Scenario s, double a, double d, double k, double w, double D1, double D2,
                double ap, double dp, double ai, double di, ResourceLaw r) {
    auto c = ModelConfig::zeros(s, 2, 1);
    c.a.setConstant(a);
    c.d.setConstant(d);
    c.k.setConstant(k);
    c.w.setConstant(w);
    c.D << D1, D2;
    if (has_intra(s)) {
        c.a_intra.setConstant(ap);
        c.d_intra.setConstant(dp);
    }
    if (has_inter(s)) {
        c.a_inter(0, 1) = c.a_inter(1, 0) = ai;
        c.d_inter(0, 1) = c.d_inter(1, 0) = di;
    }
    c.resources[0] = r;
    return c;
}

ModelConfig intra_biotic() {
    return two(Scenario::ChasingIntra, 0.5, 0.5, 0.4, 0.2, 0.022, 0.020, 0.525, 0.5, 0, 0,
               {ResourceKind::Biotic, 0.1, 10.0});
}

double max_rel(const Vec& a, const Vec& b) {
    return ((a - b).array().abs() / b.array().abs()).maxCoeff();
}

}  // namespace

TEST_CASE("intra 2x1 closed form is refined to an exact fixed point") {
    const auto c = intra_biotic();
    const auto guess = analytic_intra_2x1(c);
    CHECK(guess.method == FixedPointMethod::ClosedFormDilute);
    CHECK(guess.C.minCoeff() > 0.0);
    const auto fp = refine_fixed_point(c, guess);
    CHECK(fp.method == FixedPointMethod::NewtonRefined);
    CHECK(fp.rhs_residual < 1e-9);
    CHECK(rhs_residual(c, fp.components) == doctest::Approx(fp.rhs_residual).epsilon(1e-6).scale(1e-9));
    // Refining again stays put.
    const auto again = refine_fixed_point(c, fp);
    CHECK(max_rel(again.C, fp.C) < 1e-9);
}

TEST_CASE("closed form converges to the refined point in the dilute regime") {
    // Scarce supply keeps consumers rare while R* is fixed by mortality: R >> sum C.
    const auto c = two(Scenario::ChasingIntra, 0.01, 0.5, 0.2, 0.2, 0.002, 0.002, 0.05, 0.5, 0, 0,
                       {ResourceKind::Abiotic, 1e-4, 1e5});
    const auto guess = analytic_intra_2x1(c);
    const auto fp = refine_fixed_point(c, guess);
    CHECK(fp.regime_ratio > 100.0);
    CHECK(max_rel(guess.C, fp.C) < 0.02);
    CHECK(max_rel(guess.R, fp.R) < 0.02);
}

TEST_CASE("chasing-only pair settles on the boundary") {
    const auto c = two(Scenario::ChasingOnly, 0.1, 0.5, 0.1, 0.1, 0.002, 0.001, 0, 0, 0, 0,
                       {ResourceKind::Abiotic, 0.05, 5.0});
    FixedPoint guess;
    guess.C = Vec::Constant(2, 1.0);
    guess.R = Vec::Constant(1, 2.0);
    try {
        refine_fixed_point(c, guess);
        FAIL("expected BoundaryFixedPoint");
    } catch (const BoundaryFixedPoint& e) {
        // Either single-species point; both are equilibria.
        REQUIRE(e.extinct().size() == 1);
        const auto survivor = 1 - e.extinct().front();
        CHECK(e.consumers()[survivor] > 0.0);
    }
}

TEST_CASE("both interference types reduce to intra-only as gamma vanishes") {
    const auto intra = intra_biotic();
    auto both = two(Scenario::ChasingIntraInter, 0.5, 0.5, 0.4, 0.2, 0.022, 0.020, 0.525, 0.5,
                    1e-14, 0.1, {ResourceKind::Biotic, 0.1, 10.0});
    const auto a = analytic_intra_2x1(intra);
    const auto b = analytic_both_2x1(both);
    CHECK(max_rel(b.C, a.C) < 1e-9);
    CHECK(max_rel(b.R, a.R) < 1e-9);
}

TEST_CASE("interspecific closed form and refinement") {
    const auto c = two(Scenario::ChasingInter, 0.05, 0.05, 0.02, 0.08, 0.001, 0.0008, 0, 0, 0.3, 0.1,
                       {ResourceKind::Biotic, 0.02, 5.0});
    const auto guess = analytic_inter_2x1(c);
    // Far from dilute (R ~ 1.6 sum C): Newton from the closed form slides to a boundary.
    CHECK(guess.regime_ratio < 2.0);
    CHECK_THROWS_AS(refine_fixed_point(c, guess), BoundaryFixedPoint);
    const auto fp = find_interior_fixed_point(c, guess);
    CHECK(fp.C.minCoeff() > 0.1);
    CHECK(fp.rhs_residual < 1e-9);
}

TEST_CASE("refinement does not accept the trivial state") {
    const auto c = two(Scenario::ChasingInter, 0.05, 0.1, 0.1, 0.05, 0.00055, 0.0005, 0, 0, 0.6, 0.1,
                       {ResourceKind::Biotic, 0.05, 100.0});
    FixedPoint guess;
    guess.C = Vec::Constant(2, 0.3);
    guess.R = Vec::Constant(1, 3.0);
    try {
        const auto fp = refine_fixed_point(c, guess);
        CHECK(fp.C.minCoeff() > 1e-3);
    } catch (const BoundaryFixedPoint&) {
    }
    const auto fp = find_interior_fixed_point(c, analytic_inter_2x1(c));
    CHECK(fp.C.minCoeff() > 1.0);
}

TEST_CASE("general biotic matrix solution") {
    auto c = ModelConfig::zeros(Scenario::ChasingIntra, 3, 2);
    c.a.setConstant(0.05);
    c.a(0, 1) = 0.02;
    c.a(2, 0) = 0.03;
    c.d.setConstant(1.0);
    c.k.setConstant(0.16);
    c.w.setConstant(0.45);
    c.a_intra.setConstant(0.07);
    c.d_intra.setConstant(0.02);
    c.D << 0.03, 0.031, 0.029;
    c.resources = {{ResourceKind::Biotic, 0.9, 2000.0}, {ResourceKind::Biotic, 0.8, 1500.0}};
    const auto guess = analytic_general_biotic(c);
    CHECK(guess.method == FixedPointMethod::MatrixSolve);
    CHECK(guess.C.minCoeff() > 0.0);
    const auto fp = refine_fixed_point(c, guess);
    CHECK(fp.rhs_residual < 1e-9);

    for (auto& r : c.resources) r.kind = ResourceKind::Abiotic;
    CHECK_THROWS_AS(analytic_general_biotic(c), Error);
    const auto abio = analytic_general_abiotic(c);
    CHECK(abio.R.minCoeff() > 0.0);
}

TEST_CASE("coexistence bound") {
    auto c = two(Scenario::ChasingIntra, 0.5, 0.8, 0.2, 0.2, 0.008, 0.008, 0.625, 0.5, 0, 0,
                 {ResourceKind::Abiotic, 0.8, 60.0});
    const auto b = coexistence_delta_sup(c);
    CHECK(b.resource_kind == ResourceKind::Abiotic);
    CHECK(b.delta_sup > 0.0);
    // Stronger self-interference means faster separation and weaker self-limitation.
    c.d_intra.setConstant(1.0);
    CHECK(coexistence_delta_sup(c).delta_sup < b.delta_sup);
}

TEST_CASE("closed forms reject infeasible regimes") {
    // The weaker consumer's mortality is so high that the closed form goes negative.
    const auto c = two(Scenario::ChasingIntra, 0.5, 0.5, 0.4, 0.2, 0.2, 0.020, 0.525, 0.5, 0, 0,
                       {ResourceKind::Biotic, 0.1, 10.0});
    CHECK_THROWS_AS(analytic_intra_2x1(c), InfeasibleRegime);
}
