#include "crm/ibm.hpp"
#include "crm/ode.hpp"
#include "crm/presets.hpp"
#include "crm/qss.hpp"
#include "crm/ssa.hpp"

#include <benchmark/benchmark.h>

#include <cmath>
#include <vector>

using namespace crm;

static void BM_QssQuadratic(benchmark::State& st) {
    double R = 50.0;
    for (auto _ : st) {
        benchmark::DoNotOptimize(qss_chasing_quadratic(R, 10.0, 3.0));
        R = R < 1e3 ? R * 1.001 : 50.0;
    }
}
BENCHMARK(BM_QssQuadratic);

static void BM_QssIntraCubic(benchmark::State& st) {
    double R = 50.0;
    for (auto _ : st) {
        benchmark::DoNotOptimize(qss_intra_cubic(R, 10.0, 3.0, 2.5));
        R = R < 1e3 ? R * 1.001 : 50.0;
    }
}
BENCHMARK(BM_QssIntraCubic);

static void BM_QssGeneric(benchmark::State& st) {
    const auto s = make_preset("figS11b");
    for (auto _ : st) benchmark::DoNotOptimize(qss_generic_numeric(s.initial_C, s.initial_R, s.config));
}
BENCHMARK(BM_QssGeneric);

// Right-hand side for M consumers on the fig3/S17 presets.
static void BM_Rhs(benchmark::State& st) {
    const char* name = st.range(0) == 5 ? "fig3a" : st.range(0) == 20 ? "figS15b" : "figS17b";
    const auto s = make_preset(name);
    const ModelRhs rhs(s.config);
    const Vec u = rhs.layout().pack(SystemState::from_totals(s.initial_C, s.initial_R));
    Vec du(u.size());
    for (auto _ : st) {
        rhs(0.0, u.data(), du.data());
        benchmark::DoNotOptimize(du.data());
    }
    st.SetLabel(name);
}
BENCHMARK(BM_Rhs)->Arg(5)->Arg(20)->Arg(100);

static void BM_OdeFig1e(benchmark::State& st) {
    const auto s = make_preset("fig1e");
    const ModelRhs rhs(s.config);
    for (auto _ : st)
        benchmark::DoNotOptimize(integrate(rhs, SystemState::from_totals(s.initial_C, s.initial_R), 1e4));
}
BENCHMARK(BM_OdeFig1e)->Unit(benchmark::kMillisecond);

// SSA throughput in events per second on the fig2kl network.
static void BM_SsaEvents(benchmark::State& st) {
    const auto s = make_preset("fig2kl");
    const auto net = build_reactions(s.config);
    const auto init = net.from_totals(s.initial_C, s.initial_R);
    SsaOptions o;
    o.max_events = 1'000'000;
    std::uint64_t seed = 1, events = 0;
    for (auto _ : st) events += run_ssa(net, init, 1e9, seed++, o).event_count;
    st.counters["events/s"] = benchmark::Counter(double(events), benchmark::Counter::kIsRate);
}
BENCHMARK(BM_SsaEvents)->Unit(benchmark::kMillisecond);

static void BM_IbmStep(benchmark::State& st) {
    const auto s = make_preset("fig2mo");
    const auto& b = *s.ibm;
    World w = make_world(b.params, b.consumers, b.resources, 7);
    for (auto _ : st) step(w, b.params);
    st.counters["individuals"] = double(w.individuals.size());
}
BENCHMARK(BM_IbmStep);
BENCHMARK_MAIN();
