#include "crm/errors.hpp"
#include "crm/ode.hpp"

#include <doctest.h>

#include <cmath>
#include <numbers>
#include <sstream>

using namespace crm;

namespace {

ModelConfig intra_inter_config() {
    auto c = ModelConfig::zeros(Scenario::ChasingIntraInter, 2, 2);
    c.a << 0.1, 0.2, 0.3, 0.05;
    c.d.setConstant(0.5);
    c.k << 0.1, 0.2, 0.15, 0.1;
    c.w << 0.2, 0.3, 0.1, 0.4;
    c.D << 0.01, 0.02;
    c.a_intra << 0.1, 0.05;
    c.d_intra << 0.3, 0.2;
    c.a_inter(0, 1) = c.a_inter(1, 0) = 0.2;
    c.d_inter(0, 1) = c.d_inter(1, 0) = 0.4;
    c.resources = {{ResourceKind::Biotic, 0.3, 50.0}, {ResourceKind::Abiotic, 0.4, 30.0}};
    return c;
}

Trajectory synthetic(const std::function<double(double)>& consumer, double t_end, std::size_t n) {
    Trajectory tr;
    tr.layout = StateLayout(Scenario::ChasingOnly, 1, 1);
    for (std::size_t k = 0; k < n; ++k) {
        const double t = t_end * double(k) / double(n - 1);
        Vec u(3);
        u << consumer(t), 5.0, 0.0;
        tr.times.push_back(t);
        tr.data.push_back(u);
    }
    return tr;
}

}  // namespace

TEST_CASE("Dormand-Prince on exponential decay") {
    OdeSystem sys{1, [](double, const double* u, double* du) { du[0] = -0.5 * u[0]; }};
    IntegratorControls ctl;
    ctl.rel_tol = 1e-10;
    ctl.abs_tol = 1e-14;
    ctl.clip_negative = false;
    ctl.sample_times = uniform_samples(0.0, 10.0, 11);
    const auto tr = integrate(sys, Vec::Constant(1, 2.0), 0.0, 10.0, ctl);
    REQUIRE(tr.times.size() == 11);
    for (std::size_t k = 0; k < tr.times.size(); ++k)
        CHECK(tr.states[k](0) == doctest::Approx(2.0 * std::exp(-0.5 * tr.times[k])).epsilon(1e-8));
}

TEST_CASE("Dormand-Prince on the harmonic oscillator") {
    OdeSystem sys{2, [](double, const double* u, double* du) {
                      du[0] = u[1];
                      du[1] = -u[0];
                  }};
    IntegratorControls ctl;
    ctl.rel_tol = 1e-10;
    ctl.abs_tol = 1e-12;
    ctl.clip_negative = false;
    const double T = 20.0 * std::numbers::pi;
    ctl.sample_times = uniform_samples(0.0, T, 41);
    Vec u0(2);
    u0 << 1.0, 0.0;
    const auto tr = integrate(sys, u0, 0.0, T, ctl);
    for (std::size_t k = 0; k < tr.times.size(); ++k) {
        CHECK(tr.states[k](0) == doctest::Approx(std::cos(tr.times[k])).epsilon(1e-6).scale(1.0));
        CHECK(tr.states[k](1) == doctest::Approx(-std::sin(tr.times[k])).epsilon(1e-6).scale(1.0));
    }
    CHECK(tr.stats.accepted > 0);
    CHECK(tr.end_time == doctest::Approx(T));
}

TEST_CASE("uniform samples include both ends") {
    const auto s = uniform_samples(1.0, 3.0, 5);
    REQUIRE(s.size() == 5);
    CHECK(s.front() == 1.0);
    CHECK(s.back() == 3.0);
    CHECK(s[2] == doctest::Approx(2.0));
}

TEST_CASE("pair bookkeeping: totals obey birth-death balance") {
    const auto c = intra_inter_config();
    const ModelRhs rhs(c);
    CHECK(rhs.dim() == 2 + 2 + 4 + 2 + 1);

    SystemState s = SystemState::zeros(2, 2);
    s.c_free << 3.0, 4.0;
    s.r_free << 20.0, 10.0;
    s.x << 0.5, 0.7, 0.2, 0.9;
    s.y << 0.3, 0.1;
    s.z(0, 1) = s.z(1, 0) = 0.4;
    const auto ds = rhs.derivative(s);

    // dC_i/dt = sum_l w k x_il - D_i C_i, dR_l/dt = G_l(R_l) - sum_i k x_il.
    for (Eigen::Index i = 0; i < 2; ++i) {
        double expect = -c.D(i) * s.consumer_total(static_cast<std::size_t>(i));
        for (Eigen::Index l = 0; l < 2; ++l) expect += c.w(i, l) * c.k(i, l) * s.x(i, l);
        CHECK(ds.consumer_total(static_cast<std::size_t>(i)) == doctest::Approx(expect).epsilon(1e-12));
    }
    for (Eigen::Index l = 0; l < 2; ++l) {
        double expect = c.resources[static_cast<std::size_t>(l)].growth(s.resource_total(static_cast<std::size_t>(l)));
        for (Eigen::Index i = 0; i < 2; ++i) expect -= c.k(i, l) * s.x(i, l);
        CHECK(ds.resource_total(static_cast<std::size_t>(l)) == doctest::Approx(expect).epsilon(1e-12));
    }
    // Pair equations.
    CHECK(ds.x(1, 0) == doctest::Approx(c.a(1, 0) * 4.0 * 20.0 - (c.d(1, 0) + c.k(1, 0)) * 0.2));
    CHECK(ds.y(0) == doctest::Approx(c.a_intra(0) * 9.0 - c.d_intra(0) * 0.3));
    CHECK(ds.z(0, 1) == doctest::Approx(0.2 * 12.0 - 0.4 * 0.4));
}

TEST_CASE("model integration stays non-negative and logs extinction") {
    auto c = ModelConfig::zeros(Scenario::ChasingOnly, 2, 1);
    c.a.setConstant(0.1);
    c.d.setConstant(0.5);
    c.k.setConstant(0.1);
    c.w.setConstant(0.1);
    c.D << 0.002, 0.001;
    c.resources[0] = {ResourceKind::Abiotic, 0.05, 5.0};
    Vec C(2), R(1);
    C << 10.0, 10.0;
    R << 2.5;
    IntegratorControls ctl;
    ctl.sample_times = uniform_samples(0.0, 1e5, 101);
    const auto tr = integrate(ModelRhs(c), SystemState::from_totals(C, R), 1e5, ctl);
    for (const auto& u : tr.data) CHECK(u.minCoeff() >= 0.0);
    bool logged = false;
    for (const auto& e : tr.events)
        if (e.kind == EventKind::ExtinctionBelowThreshold && e.species == 0) logged = true;
    CHECK(logged);
    const Vec end = tr.consumer_totals(tr.size() - 1);
    CHECK(end(0) < 1e-3);
    CHECK(end(1) > 1.0);

    std::ostringstream os;
    write_trajectory_csv(os, tr);
    CHECK(os.str().rfind("time,species,value\n", 0) == 0);
}

TEST_CASE("steady-state stop") {
    OdeSystem sys{1, [](double, const double* u, double* du) { du[0] = 1.0 - u[0]; }};
    IntegratorControls ctl;
    ctl.stop_at_steady_state = true;
    ctl.steady_state_tol = 1e-9;
    const auto tr = integrate(sys, Vec::Zero(1), 0.0, 1e6, ctl);
    CHECK(tr.end_time < 1e3);
    CHECK(tr.end_state(0) == doctest::Approx(1.0).epsilon(1e-8));
    CHECK(tr.events.back().kind == EventKind::SteadyStateReached);
}

TEST_CASE("on_step can stop the run") {
    OdeSystem sys{1, [](double, const double*, double* du) { du[0] = 1.0; }};
    IntegratorControls ctl;
    ctl.max_step = 0.1;
    ctl.on_step = [](double t, const double*) { return t < 5.0; };
    const auto tr = integrate(sys, Vec::Zero(1), 0.0, 100.0, ctl);
    CHECK(tr.end_time < 6.0);
    CHECK(tr.end_time >= 5.0);
}

TEST_CASE("outcome classes on synthetic series") {
    const double two_pi = 2.0 * std::numbers::pi;
    SUBCASE("fixed point") {
        const auto tr = synthetic([](double) { return 7.0; }, 1e4, 2001);
        const auto oc = classify_outcome(tr, 2e3);
        CHECK(oc.dynamics == DynamicsClass::StableFixedPoint);
        CHECK(oc.fates[0] == ConsumerFate::Persists);
    }
    SUBCASE("extinct") {
        const auto tr = synthetic([](double t) { return 10.0 * std::exp(-t / 100.0); }, 1e4, 2001);
        const auto oc = classify_outcome(tr, 2e3);
        CHECK(oc.fates[0] == ConsumerFate::Extinct);
    }
    SUBCASE("limit cycle") {
        const auto tr = synthetic([&](double t) { return 10.0 + 2.0 * std::sin(two_pi * t / 97.0); },
                                  2e4, 8001);
        const auto oc = classify_outcome(tr, 5e3);
        CHECK(oc.dynamics == DynamicsClass::LimitCycle);
        REQUIRE_FALSE(oc.frequencies.empty());
        CHECK(oc.frequencies.front() == doctest::Approx(1.0 / 97.0).epsilon(0.02));
    }
    SUBCASE("two incommensurate frequencies") {
        const auto tr = synthetic(
            [&](double t) {
                return 10.0 + 2.0 * std::sin(two_pi * t / 97.0) +
                       1.5 * std::sin(two_pi * t * std::numbers::sqrt2 / 97.0 * 2.3);
            },
            2e4, 8001);
        const auto oc = classify_outcome(tr, 5e3);
        CHECK(oc.dynamics == DynamicsClass::QuasiPeriodic);
    }
    SUBCASE("too short") {
        const auto tr = synthetic([](double) { return 1.0; }, 10.0, 11);
        CHECK_THROWS_AS(classify_outcome(tr, 6.0), DomainError);
    }
}
