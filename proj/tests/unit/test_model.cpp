#include "crm/errors.hpp"
#include "crm/model.hpp"

#include <doctest.h>

#include <cmath>

using namespace crm;

namespace {

ModelConfig pair_config(Scenario s) {
    auto c = ModelConfig::zeros(s, 2, 1);
    c.a.setConstant(0.1);
    c.d.setConstant(0.5);
    c.k.setConstant(0.1);
    c.w.setConstant(0.1);
    c.D << 0.002, 0.001;
    if (has_intra(s)) {
        c.a_intra.setConstant(0.2);
        c.d_intra.setConstant(0.4);
    }
    if (has_inter(s)) {
        c.a_inter(0, 1) = c.a_inter(1, 0) = 0.3;
        c.d_inter(0, 1) = c.d_inter(1, 0) = 0.6;
    }
    c.resources[0] = {ResourceKind::Biotic, 0.1, 10.0};
    return c;
}

}  // namespace

TEST_CASE("scenario names round trip") {
    for (auto s : {Scenario::ChasingOnly, Scenario::ChasingIntra, Scenario::ChasingInter,
                   Scenario::ChasingIntraInter})
        CHECK(scenario_from_string(to_string(s)) == s);
    CHECK_THROWS_AS(scenario_from_string("Chasing"), InvalidConfig);
    CHECK(has_intra(Scenario::ChasingIntraInter));
    CHECK(has_inter(Scenario::ChasingIntraInter));
    CHECK_FALSE(has_intra(Scenario::ChasingInter));
    CHECK_FALSE(has_inter(Scenario::ChasingIntra));
}

TEST_CASE("resource laws") {
    ResourceLaw bio{ResourceKind::Biotic, 0.5, 100.0};
    ResourceLaw abio{ResourceKind::Abiotic, 0.5, 100.0};
    CHECK(bio.growth(50.0) == doctest::Approx(0.5 * 50.0 * 0.5));
    CHECK(abio.growth(50.0) == doctest::Approx(0.25));
    CHECK(bio.growth(0.0) == 0.0);
    CHECK(abio.growth(0.0) == doctest::Approx(0.5));
    CHECK(bio.growth(100.0) == doctest::Approx(0.0));
}

TEST_CASE("config validation") {
    auto c = pair_config(Scenario::ChasingIntraInter);
    CHECK_NOTHROW(c.validate());

    SUBCASE("negative rate") {
        c.d(0, 0) = -1.0;
        CHECK_THROWS_WITH_AS(c.validate(), doctest::Contains("d"), InvalidConfig);
    }
    SUBCASE("w above one") {
        c.w(1, 0) = 1.5;
        CHECK_THROWS_AS(c.validate(), InvalidConfig);
    }
    SUBCASE("asymmetric interspecific rates") {
        c.a_inter(0, 1) = 0.1;
        CHECK_THROWS_WITH_AS(c.validate(), doctest::Contains("symmetric"), InvalidConfig);
    }
    SUBCASE("interference without the channel") {
        auto only = pair_config(Scenario::ChasingOnly);
        only.a_intra(0) = 0.1;
        only.d_intra(0) = 0.1;
        CHECK_THROWS_AS(only.validate(), InvalidConfig);
    }
    SUBCASE("shape mismatch") {
        c.k = Mat::Constant(2, 2, 0.1);
        CHECK_THROWS_WITH_AS(c.validate(), doctest::Contains("2x1"), InvalidConfig);
    }
    SUBCASE("zero carrying capacity") {
        c.resources[0].carrying_capacity = 0.0;
        CHECK_THROWS_AS(c.validate(), InvalidConfig);
    }
    SUBCASE("pairing with zero separation") {
        c.d_intra(1) = 0.0;
        CHECK_THROWS_AS(c.validate(), InvalidConfig);
    }
}

TEST_CASE("derived constants") {
    const auto c = pair_config(Scenario::ChasingIntraInter);
    const auto dc = derive_constants(c);
    CHECK(dc.K(0, 0) == doctest::Approx((0.5 + 0.1) / 0.1));
    CHECK(dc.inv_K(0, 0) == doctest::Approx(0.1 / 0.6));
    CHECK(dc.alpha(1, 0) == doctest::Approx(0.001 / (0.1 * 0.1)));
    CHECK(dc.beta(0) == doctest::Approx(0.5));
    CHECK(dc.gamma(0, 1) == doctest::Approx(0.5));
    CHECK(dc.gamma(1, 0) == doctest::Approx(0.5));
}

TEST_CASE("state layout packs and unpacks") {
    const std::size_t M = 3, N = 2;
    StateLayout layout(Scenario::ChasingIntraInter, M, N);
    CHECK(layout.size() == M + N + M * N + M + M * (M - 1) / 2);

    SystemState s = SystemState::zeros(M, N);
    double v = 1.0;
    for (Eigen::Index i = 0; i < 3; ++i) s.c_free(i) = v++;
    for (Eigen::Index l = 0; l < 2; ++l) s.r_free(l) = v++;
    for (Eigen::Index i = 0; i < 3; ++i)
        for (Eigen::Index l = 0; l < 2; ++l) s.x(i, l) = v++;
    for (Eigen::Index i = 0; i < 3; ++i) s.y(i) = v++;
    for (Eigen::Index i = 0; i < 3; ++i)
        for (Eigen::Index j = i + 1; j < 3; ++j) s.z(i, j) = s.z(j, i) = v++;

    const Vec u = layout.pack(s);
    CHECK(static_cast<std::size_t>(u.size()) == layout.size());
    const auto back = layout.unpack(u);
    CHECK(back.c_free == s.c_free);
    CHECK(back.r_free == s.r_free);
    CHECK(back.x == s.x);
    CHECK(back.y == s.y);
    CHECK(back.z == s.z);

    // z indices are symmetric and distinct.
    CHECK(layout.z(0, 2) == layout.z(2, 0));
    CHECK(layout.z(0, 1) != layout.z(1, 2));

    const Vec C = layout.consumer_totals(u.data());
    for (std::size_t i = 0; i < M; ++i)
        CHECK(C(static_cast<Eigen::Index>(i)) == doctest::Approx(s.consumer_total(i)));
    // Intraspecific pairs hold two individuals of the same species.
    const double c0 = s.c_free(0) + s.x.row(0).sum() + 2.0 * s.y(0) + s.z(0, 1) + s.z(0, 2);
    CHECK(s.consumer_total(0) == doctest::Approx(c0));
    CHECK(s.resource_total(1) == doctest::Approx(s.r_free(1) + s.x.col(1).sum()));
    CHECK(layout.component_names().size() == layout.size());
}

TEST_CASE("chasing-only layout has no interference slots") {
    StateLayout layout(Scenario::ChasingOnly, 2, 1);
    CHECK(layout.size() == 2 + 1 + 2);
    CHECK_FALSE(layout.intra());
    CHECK_FALSE(layout.inter());
}

TEST_CASE("from_totals leaves every individual free") {
    Vec C(2), R(1);
    C << 3.0, 4.0;
    R << 5.0;
    const auto s = SystemState::from_totals(C, R, 2.5);
    CHECK(s.t == 2.5);
    CHECK(s.consumer_totals() == C);
    CHECK(s.resource_totals() == R);
    CHECK(s.x.isZero());
}

TEST_CASE("mean-field encounter rates from kinetic geometry") {
    KineticGeometry g;
    g.L = 120.0;
    g.v_c = Vec::Constant(2, 1.0);
    g.v_r = Vec::Constant(1, 1.0);
    g.r_chase = Mat::Constant(2, 1, 5.0);
    g.r_intra = Vec::Constant(2, 3.0);
    g.r_inter = Mat::Constant(2, 2, 4.0);
    const auto rates = mean_field_rates(g);
    CHECK(rates.a(0, 0) == doctest::Approx(2.0 * 5.0 * std::sqrt(2.0) / (120.0 * 120.0)));
    CHECK(rates.a_intra(1) == doctest::Approx(2.0 * std::sqrt(2.0) * 3.0 / (120.0 * 120.0)));
    CHECK(rates.a_inter(0, 1) == doctest::Approx(2.0 * 4.0 * std::sqrt(2.0) / (120.0 * 120.0)));
    CHECK(rates.a_inter(0, 0) == 0.0);

    g.r_chase(0, 0) = 70.0;
    CHECK_THROWS_AS(mean_field_rates(g), InvalidConfig);
}
