#include "crm/errors.hpp"
#include "crm/ode.hpp"
#include "crm/ssa.hpp"

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <map>

using namespace crm;

namespace {

ModelConfig full_config() {
    auto c = ModelConfig::zeros(Scenario::ChasingIntraInter, 2, 1);
    c.a.setConstant(0.01);
    c.d.setConstant(0.5);
    c.k.setConstant(0.2);
    c.w.setConstant(0.3);
    c.D << 0.01, 0.012;
    c.a_intra.setConstant(0.005);
    c.d_intra.setConstant(0.3);
    c.a_inter(0, 1) = c.a_inter(1, 0) = 0.004;
    c.d_inter(0, 1) = c.d_inter(1, 0) = 0.2;
    c.resources[0] = {ResourceKind::Biotic, 0.2, 200.0};
    return c;
}

// Consumers that never meet the resource: a pure death process.
ModelConfig death_only(double D) {
    auto c = ModelConfig::zeros(Scenario::ChasingOnly, 1, 1);
    c.D << D;
    c.resources[0] = {ResourceKind::Abiotic, 2.0, 40.0};
    return c;
}

}  // namespace

TEST_CASE("reaction channels of the full network") {
    const auto net = build_reactions(full_config());
    std::map<ReactionKind, int> count;
    for (const auto& r : net.reactions()) ++count[r.kind];
    CHECK(count[ReactionKind::Encounter] == 2);
    CHECK(count[ReactionKind::Escape] == 2);
    CHECK(count[ReactionKind::Capture] == 2);
    CHECK(count[ReactionKind::IntraForm] == 2);
    CHECK(count[ReactionKind::IntraSplit] == 2);
    CHECK(count[ReactionKind::InterForm] == 1);
    CHECK(count[ReactionKind::InterSplit] == 1);
    CHECK(count[ReactionKind::Death] == 2);
    CHECK(count[ReactionKind::ResourceBirth] == 1);
    CHECK(count[ReactionKind::ResourceDeath] == 1);
    CHECK(count[ReactionKind::ResourceInflux] == 0);
}

TEST_CASE("propensities follow mass action") {
    const auto c = full_config();
    const auto net = build_reactions(c);
    const auto& L = net.layout();
    Counts n(L.size(), 0);
    n[L.c_free(0)] = 5;
    n[L.c_free(1)] = 3;
    n[L.r_free(0)] = 40;
    n[L.x(0, 0)] = 2;
    n[L.y(1)] = 1;
    n[L.z(0, 1)] = 1;
    CHECK(net.consumer_total(n, 0) == 5 + 2 + 1);
    CHECK(net.consumer_total(n, 1) == 3 + 2 + 1);
    CHECK(net.resource_total(n, 0) == 42);
    for (std::size_t r = 0; r < net.reactions().size(); ++r) {
        const auto& re = net.reactions()[r];
        const double p = net.propensity(r, n);
        switch (re.kind) {
            case ReactionKind::Encounter:
                CHECK(p == doctest::Approx(c.a(static_cast<Eigen::Index>(re.i), 0) *
                                           double(n[L.c_free(re.i)]) * 40.0));
                break;
            case ReactionKind::IntraForm:
                // Ordered pairs of distinct individuals.
                CHECK(p == doctest::Approx(re.rate * double(n[L.c_free(re.i)]) *
                                           double(n[L.c_free(re.i)] - 1)));
                break;
            case ReactionKind::Death:
                CHECK(p == doctest::Approx(c.D(static_cast<Eigen::Index>(re.i)) *
                                           double(net.consumer_total(n, re.i))));
                break;
            case ReactionKind::ResourceDeath:
                CHECK(p == doctest::Approx(0.2 / 200.0 * 42.0 * 42.0));
                break;
            default:
                CHECK(p >= 0.0);
        }
    }
    double total = 0.0;
    for (std::size_t r = 0; r < net.reactions().size(); ++r) total += net.propensity(r, n);
    CHECK(net.total_propensity(n) == doctest::Approx(total));
}

TEST_CASE("dependency graph covers every read") {
    const auto net = build_reactions(full_config());
    for (std::size_t r = 0; r < net.reactions().size(); ++r)
        for (std::size_t s : net.reactions()[r].writes)
            for (std::size_t dep : net.dependents(s)) {
                const auto& aff = net.affected(r);
                CHECK(std::find(aff.begin(), aff.end(), dep) != aff.end());
            }
}

TEST_CASE("bookkeeping holds along a run") {
    const auto net = build_reactions(full_config());
    Vec C(2), R(1);
    C << 30.0, 30.0;
    R << 150.0;
    SsaOptions opts;
    opts.check_bookkeeping = true;
    opts.sample_times = uniform_samples(0.0, 200.0, 5);
    const auto run = run_ssa(net, net.from_totals(C, R), 200.0, 3, opts);
    CHECK(run.event_count > 100);
    CHECK(run.times.size() == 5);
    for (auto v : run.final_state) CHECK(v >= 0);
}

TEST_CASE("same seed, same path") {
    const auto net = build_reactions(full_config());
    Vec C(2), R(1);
    C << 20.0, 20.0;
    R << 100.0;
    SsaOptions opts;
    opts.sample_times = uniform_samples(0.0, 100.0, 11);
    const auto a = run_ssa(net, net.from_totals(C, R), 100.0, 42, opts);
    const auto b = run_ssa(net, net.from_totals(C, R), 100.0, 42, opts);
    const auto d = run_ssa(net, net.from_totals(C, R), 100.0, 43, opts);
    CHECK(a.samples == b.samples);
    CHECK(a.event_count == b.event_count);
    CHECK(a.samples != d.samples);
}

TEST_CASE("pure death process matches exponential decay") {
    const double D = 0.01;
    const auto net = build_reactions(death_only(D));
    Vec C(1), R(1);
    C << 400.0;
    R << 40.0;
    SsaOptions opts;
    opts.sample_times = uniform_samples(0.0, 100.0, 3);
    const auto runs = run_ensemble(net, net.from_totals(C, R), 100.0, 1, 200, opts, 1);
    const auto s = summarize(net, runs);
    CHECK(s.runs == 200);
    const double p = std::exp(-D * 100.0);
    const double mean = 400.0 * p;
    const double var = 400.0 * p * (1.0 - p);
    const double se = std::sqrt(var / 200.0);
    CHECK(std::abs(s.mean(2, 0) - mean) < 4.0 * se);
    CHECK(s.variance(2, 0) == doctest::Approx(var).epsilon(0.3));
    // Abiotic immigration-decay is Poisson around K0 at stationarity.
    CHECK(std::abs(s.mean(2, 1) - 40.0) < 4.0 * std::sqrt(40.0 / 200.0));
}

TEST_CASE("extinction bookkeeping") {
    const auto net = build_reactions(death_only(0.5));
    Vec C(1), R(1);
    C << 5.0;
    R << 10.0;
    SsaOptions opts;
    opts.stop_on_extinction = true;
    const auto run = run_ssa(net, net.from_totals(C, R), 1e4, 9, opts);
    CHECK(run.lost_consumer());
    REQUIRE(run.extinction_time.size() == 1);
    CHECK(run.extinction_time[0] > 0.0);
    CHECK(run.end_time == doctest::Approx(run.extinction_time[0]));
}

TEST_CASE("ensembles are thread-count independent") {
    const auto net = build_reactions(full_config());
    Vec C(2), R(1);
    C << 20.0, 20.0;
    R << 100.0;
    SsaOptions opts;
    opts.sample_times = uniform_samples(0.0, 50.0, 6);
    const auto one = run_ensemble(net, net.from_totals(C, R), 50.0, 10, 4, opts, 1);
    const auto two = run_ensemble(net, net.from_totals(C, R), 50.0, 10, 4, opts, 2);
    REQUIRE(one.size() == two.size());
    for (std::size_t k = 0; k < one.size(); ++k) {
        CHECK(one[k].seed == two[k].seed);
        CHECK(one[k].samples == two[k].samples);
    }
}
