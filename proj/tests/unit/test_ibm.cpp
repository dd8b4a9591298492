#include "crm/errors.hpp"
#include "crm/ibm.hpp"

#include <doctest.h>

#include <cmath>
#include <sstream>

using namespace crm;

namespace {

IbmParams demographic_params() {
    IbmParams p;
    p.L = 40;
    p.v_c = {1.0, 1.0};
    p.v_r = 1.0;
    p.r_chase = {3.0, 3.0};
    p.r_inter << 2.0, 1.5, 1.5, 2.0;
    p.d = {0.2, 0.2};
    p.k = {0.3, 0.3};
    p.w = {0.5, 0.5};
    p.D = {0.01, 0.012};
    p.d_inter << 0.3, 0.3, 0.3, 0.3;
    p.resource = {ResourceKind::Biotic, 0.1, 300.0};
    p.choose_dt();
    return p;
}

}  // namespace

TEST_CASE("torus distance uses the minimum image") {
    CHECK(torus_distance(10, 0, 0, 9, 0) == doctest::Approx(1.0));
    CHECK(torus_distance(10, 1, 1, 9, 9) == doctest::Approx(std::sqrt(8.0)));
    CHECK(torus_distance(10, 2, 3, 2, 3) == 0.0);
    CHECK(torus_distance(10, 0, 0, 5, 5) == doctest::Approx(std::sqrt(50.0)));
}

TEST_CASE("time step selection and validation") {
    auto p = demographic_params();
    CHECK(p.dt == doctest::Approx(0.1));  // speed 1 dominates
    CHECK_NOTHROW(p.validate());
    p.dt = 1.0;
    CHECK_THROWS_AS(p.validate(), InvalidConfig);
    p = demographic_params();
    p.w[0] = 1.5;
    CHECK_THROWS_AS(p.validate(), InvalidConfig);
    p = demographic_params();
    p.L = 1;
    CHECK_THROWS_AS(p.validate(), InvalidConfig);
}

TEST_CASE("world construction") {
    const auto p = demographic_params();
    const auto w = make_world(p, {30, 20}, 100, 5);
    CHECK(w.consumers(0) == 30);
    CHECK(w.consumers(1) == 20);
    CHECK(w.resources() == 100);
    for (const auto& ind : w.individuals) {
        CHECK(ind.status == IbmStatus::Free);
        CHECK(ind.x >= 0);
        CHECK(ind.x < p.L);
        CHECK(ind.y >= 0);
        CHECK(ind.y < p.L);
    }
    CHECK_NOTHROW(check_world(w));
}

TEST_CASE("stepping keeps partner links consistent") {
    const auto p = demographic_params();
    auto w = make_world(p, {40, 40}, 200, 11);
    bool paired = false;
    for (int s = 0; s < 3000; ++s) {
        step(w, p);
        for (const auto& ind : w.individuals)
            if (ind.status != IbmStatus::Free) paired = true;
        if (s % 100 == 0) check_world(w);
    }
    CHECK_NOTHROW(check_world(w));
    CHECK(paired);
    CHECK(w.captures > 0);
    CHECK(w.time == doctest::Approx(3000 * p.dt));
}

TEST_CASE("runs are reproducible by seed") {
    const auto p = demographic_params();
    auto a = make_world(p, {20, 20}, 100, 3);
    auto b = make_world(p, {20, 20}, 100, 3);
    const auto sa = run_ibm(a, p, 100.0, 10.0);
    const auto sb = run_ibm(b, p, 100.0, 10.0);
    CHECK(sa.times.size() == 11);
    CHECK(sa.counts == sb.counts);

    std::ostringstream os;
    write_snapshot_csv(os, a);
    CHECK(os.str().rfind("time,id,species,x,y,status\n", 0) == 0);
}

TEST_CASE("count-only encounter estimate") {
    IbmParams p;
    p.L = 60;
    p.r_chase = {5.0, 5.0};
    p.dt = 0.1;
    p.resource = {ResourceKind::Biotic, 0.1, 100.0};
    const auto e = estimate_encounter_rate(p, 0, 20, 20, 500.0, 1);
    CHECK(e.events >= 100);
    CHECK(e.rate > 0.0);
    CHECK(e.std_error < e.rate);
    CHECK(e.mean_field == doctest::Approx(2.0 * 5.0 * std::sqrt(2.0) / (60.0 * 60.0)));
    CHECK_THROWS_AS(estimate_encounter_rate(p, 0, 2, 2, 5.0, 1), StatisticalPower);
}
