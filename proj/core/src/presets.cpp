#include "crm/presets.hpp"

#include "crm/errors.hpp"

#include <cmath>
#include <functional>
#include <numbers>
#include <random>

namespace crm {

namespace {

ResourceLaw biotic(double R0, double K0) { return {ResourceKind::Biotic, R0, K0}; }
ResourceLaw abiotic(double Ra, double K0) { return {ResourceKind::Abiotic, Ra, K0}; }

// Species share every rate except the mortality D.
struct Pair {
    Scenario scenario = Scenario::ChasingOnly;
    double a = 0, d = 0, k = 0, w = 0;
    double D1 = 0, D2 = 0;
    double a_intra = 0, d_intra = 0;
    double a12 = 0, d12 = 0;
    ResourceLaw resource;
};

ModelConfig two(const Pair& p) {
    ModelConfig c = ModelConfig::zeros(p.scenario, 2, 1);
    c.a.setConstant(p.a);
    c.d.setConstant(p.d);
    c.k.setConstant(p.k);
    c.w.setConstant(p.w);
    c.D << p.D1, p.D2;
    if (has_intra(p.scenario)) {
        c.a_intra.setConstant(p.a_intra);
        c.d_intra.setConstant(p.d_intra);
    }
    if (has_inter(p.scenario)) {
        c.a_inter(0, 1) = c.a_inter(1, 0) = p.a12;
        c.d_inter(0, 1) = c.d_inter(1, 0) = p.d12;
    }
    c.resources = {p.resource};
    return c;
}

ModelConfig many(Scenario sc, const Vec& D, std::vector<ResourceLaw> res, double a, double d,
                 double k, double w, double a_intra = 0, double d_intra = 0) {
    ModelConfig c = ModelConfig::zeros(sc, static_cast<std::size_t>(D.size()), res.size());
    c.a.setConstant(a);
    c.d.setConstant(d);
    c.k.setConstant(k);
    c.w.setConstant(w);
    c.D = D;
    if (has_intra(sc)) {
        c.a_intra.setConstant(a_intra);
        c.d_intra.setConstant(d_intra);
    }
    c.resources = std::move(res);
    return c;
}

// Portable draws (std distributions differ between standard libraries).
double unit(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

// D_i = base + width * xi_i, xi uniform on [0, 1).
Vec uniform_D(std::size_t M, double base, double width, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    Vec D(static_cast<Eigen::Index>(M));
    for (auto& v : D) v = base + width * unit(rng);
    return D;
}

// D_i = scale * Normal(1, sigma), redrawn while non-positive (Box-Muller).
Vec normal_D(std::size_t M, double sigma, double scale, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    Vec D(static_cast<Eigen::Index>(M));
    for (auto& v : D) {
        double z;
        do {
            const double u1 = 1.0 - unit(rng), u2 = unit(rng);
            z = 1.0 + sigma * std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
        } while (z <= 0.0);
        v = scale * z;
    }
    return D;
}

Vec vec(std::initializer_list<double> v) {
    Vec out(static_cast<Eigen::Index>(v.size()));
    Eigen::Index i = 0;
    for (double x : v) out(i++) = x;
    return out;
}

// C_i = 10, R_l = K0_l / 2 unless overridden.
ExperimentSpec make(std::string name, std::string description, Engine engine, ModelConfig c,
                    double t_end = 1e5) {
    ExperimentSpec s;
    s.name = std::move(name);
    s.description = std::move(description);
    s.engine = engine;
    s.initial_C = Vec::Constant(static_cast<Eigen::Index>(c.consumers()), 10.0);
    s.initial_R.resize(static_cast<Eigen::Index>(c.resource_count()));
    for (std::size_t l = 0; l < c.resource_count(); ++l)
        s.initial_R(static_cast<Eigen::Index>(l)) = 0.5 * c.resources[l].carrying_capacity;
    s.config = std::move(c);
    s.run.t_end = t_end;
    return s;
}

ExperimentSpec with_initial(ExperimentSpec s, Vec C, Vec R) {
    s.initial_C = std::move(C);
    s.initial_R = std::move(R);
    return s;
}

ExperimentSpec with_runs(ExperimentSpec s, std::size_t runs, std::size_t samples = 201) {
    s.run.runs = runs;
    s.run.samples = samples;
    return s;
}

ExperimentSpec scan_of(ExperimentSpec s, ScanAxis a1, ScanAxis a2, bool overlay = false) {
    s.engine = Engine::Scan;
    s.scan = ScanControls{{std::move(a1), std::move(a2)}, overlay};
    s.run.samples = 4001;
    s.run.window = 1e4;
    return s;
}

ExperimentSpec surface_of(std::string name, std::string description, ModelConfig c,
                          std::string family, std::vector<int> orders) {
    ExperimentSpec s = make(std::move(name), std::move(description), Engine::FrSurface, std::move(c));
    SurfaceControls f;
    f.family = std::move(family);
    f.orders = std::move(orders);
    s.surface = f;
    return s;
}

// --- parameter families -------------------------------------------------------

Pair fig1cf() {
    return {Scenario::ChasingOnly, 0.1, 0.5, 0.1, 0.1, 0.002, 0.001, 0, 0, 0, 0, abiotic(0.05, 5)};
}
Pair fig1eh() {
    return {Scenario::ChasingIntra, 0.5, 0.5, 0.4, 0.2, 0.022, 0.020, 0.525, 0.5, 0, 0, biotic(0.1, 10)};
}
// Chasing + interspecific family of S7c-j.
Pair s7(double K0, ResourceLaw r, double a12, double d12) {
    r.carrying_capacity = K0;
    return {Scenario::ChasingInter, 0.05, 0.1, 0.1, 0.05, 0.0009, 0.0007, 0, 0, a12, d12, r};
}
// Fig 2c and S7k-l. The listing gives no interspecific rates; 0.02 / 0.02 is taken from S7c-j.
Pair fig2c() {
    return {Scenario::ChasingInter, 0.15, 0.1, 0.2, 0.1, 0.0009, 0.0007, 0, 0, 0.02, 0.02, biotic(0.15, 60)};
}
Pair fig2ei(double d_intra, double D1, double D2, ResourceLaw r) {
    return {Scenario::ChasingIntra, 0.1, 0.1, 0.1, 0.1, D1, D2, 0.125, d_intra, 0, 0, r};
}
Pair fig2kl(double K0, double D1, double D2) {
    return {Scenario::ChasingIntra, 0.06, 2, 0.22, 0.32, D1, D2, 0.075, 2, 0, 0, biotic(0.13, K0)};
}
Pair s9(double d_intra) {
    return {Scenario::ChasingIntra, 0.1, 0.1, 0.1, 0.1, 0.0085, 0.008, 0.125, d_intra, 0, 0, biotic(0.05, 100)};
}

ModelConfig fig3a() {
    return many(Scenario::ChasingIntra, vec({0.062, 0.0615, 0.0639, 0.066, 0.0644}),
                {biotic(0.9, 600), biotic(0.9, 1000), biotic(0.95, 800)}, 0.05, 1.05, 0.16, 0.45,
                0.07, 0.018);
}

ModelConfig s15(bool intra) {
    return many(intra ? Scenario::ChasingIntra : Scenario::ChasingOnly, uniform_D(20, 0.001, 0.001, 15),
                {abiotic(5, 10000)}, 0.1, 0.5, 0.1, 0.1, 0.125, 0.1);
}
ModelConfig s16(bool intra) {
    return many(intra ? Scenario::ChasingIntra : Scenario::ChasingOnly, uniform_D(20, 0.004, 0.002, 16),
                {biotic(0.95, 300)}, 0.1, 0.3, 0.1, 0.1, 0.125, 0.3);
}
ModelConfig s18b() {
    return many(Scenario::ChasingIntra, uniform_D(18, 0.03, 0.005, 18),
                {biotic(0.95, 6000), biotic(0.85, 4000), biotic(0.9, 5000)}, 0.1, 0.5, 0.2, 0.2,
                0.125, 0.3);
}

using Builder = std::function<ExperimentSpec()>;

struct Entry {
    const char* name;
    Builder build;
};

const std::vector<Entry>& registry() {
    static const std::vector<Entry> entries = [] {
        std::vector<Entry> e;
        auto add = [&](const char* n, Builder b) { e.push_back({n, std::move(b)}); };

        // Fig 1
        add("fig1c", [] { return make("fig1c", "Chasing pairs only, abiotic resource: exclusion (ODE)", Engine::Ode, two(fig1cf())); });
        add("fig1f", [] { return with_runs(make("fig1f", "Fig 1c parameters under SSA", Engine::Ssa, two(fig1cf())), 10); });
        add("fig1e", [] { return make("fig1e", "Intraspecific interference, biotic resource: stable coexistence (ODE + closed form)", Engine::Ode, two(fig1eh())); });
        add("fig1h", [] { return with_runs(make("fig1h", "Fig 1e parameters under SSA", Engine::Ssa, two(fig1eh())), 10); });

        // Fig 2
        add("fig2ab", [] { return with_initial(make("fig2ab", "Interspecific interference, biotic K0 = 60: quasi-periodic coexistence (ODE)", Engine::Ode, two(s7(60, biotic(0.05, 60), 0.02, 0.02)), 4e5), vec({20, 5}), vec({5})); });
        add("fig2c", [] { return with_initial(with_runs(make("fig2c", "Interspecific interference under SSA: a consumer is lost", Engine::Ssa, two(fig2c())), 10), vec({20, 20}), vec({30})); });
        add("fig2d", [] { return make("fig2d", "Intraspecific interference, abiotic resource (ODE)", Engine::Ode, two({Scenario::ChasingIntra, 0.1, 0.1, 0.1, 0.1, 0.0035, 0.0038, 0.125, 0.05, 0, 0, abiotic(0.3, 100)})); });
        add("fig2e", [] { return make("fig2e", "Intraspecific interference, d' = 0.05: stable coexistence (ODE)", Engine::Ode, two(fig2ei(0.05, 0.0085, 0.0080, biotic(0.05, 100)))); });
        // Listing reads "d_i' = 0.1D_1=0.0085": d' = 0.1 and D_1 = 0.0085.
        add("fig2f", [] { return make("fig2f", "Intraspecific interference, d' = 0.1: oscillating coexistence (ODE)", Engine::Ode, two(fig2ei(0.1, 0.0085, 0.0080, biotic(0.05, 100)))); });
        add("fig2g", [] { return scan_of(make("fig2g", "Coexistence phase diagram over (Delta, d'), abiotic Ra = 0.1", Engine::Scan, two(fig2ei(0.05, 0.001, 0.001, abiotic(0.1, 100)))), {"delta", 0.0, 1.5, 16}, {"d_intra", 0.01, 0.3, 16, true}); });
        add("fig2h", [] { return scan_of(make("fig2h", "Coexistence phase diagram over (Delta, d'), biotic R0 = 0.05", Engine::Scan, two(fig2ei(0.05, 0.001, 0.001, biotic(0.05, 100)))), {"delta", 0.0, 1.5, 16}, {"d_intra", 0.01, 0.3, 16, true}); });
        add("fig2i", [] { return scan_of(make("fig2i", "Delta = 1 transection over (a', d'), biotic R0 = 0.05", Engine::Scan, two(fig2ei(0.05, 0.002, 0.001, biotic(0.05, 100)))), {"a_intra", 0.02, 0.5, 13, true}, {"d_intra", 0.01, 0.3, 13, true}); });
        add("fig2j", [] { return make("fig2j", "Intraspecific interference, abiotic K0 = 2000 (ODE)", Engine::Ode, two({Scenario::ChasingIntra, 0.02, 0.7, 0.05, 0.4, 0.0160, 0.0171, 0.025, 0.7, 0, 0, abiotic(5.5, 2000)})); });
        add("fig2kl", [] { return with_initial(with_runs(make("fig2kl", "Intraspecific interference under SSA: both consumers persist", Engine::Ssa, two(fig2kl(5000, 0.0550, 0.0551))), 10), vec({100, 100}), vec({500})); });
        add("fig2mo", [] {
            ExperimentSpec s = make("fig2mo", "Lattice individual-based model, L = 120, r = 5", Engine::Ibm,
                                    two({Scenario::ChasingIntra, 0.0039 * 50, 0.4, 0.1, 0.3, 0.0080, 0.0085, 0.0039 * 50, 0.4, 0, 0, biotic(0.5, 200)}), 1e4);
            IbmSetup b;
            auto& p = b.params;
            p.L = 120;
            p.v_c = {1, 1};
            p.v_r = 1;
            p.r_chase = {5, 5};
            p.r_inter(0, 0) = p.r_inter(1, 1) = 5;
            for (int i = 0; i < 2; ++i) {
                p.d[i] = 0.4;
                p.k[i] = 0.1;
                p.w[i] = 0.3;
                p.d_inter(i, i) = 0.4;
            }
            p.D = {0.0080, 0.0085};
            p.resource = biotic(0.5, 200);
            p.choose_dt();
            b.consumers = {50, 50};
            b.resources = 100;
            b.sample_dt = 10;
            s.ibm = b;
            return s;
        });

        // Fig 3
        add("fig3a", [] { return make("fig3a", "M = 5 consumers on N = 3 biotic resources (ODE + matrix solution)", Engine::Ode, fig3a()); });
        add("fig3bc", [] { return make("fig3bc", "M = 18 consumers on N = 3 biotic resources (ODE)", Engine::Ode, s18b()); });
        add("fig3d", [] { return make("fig3d", "M = 5 consumers on one abiotic resource (ODE)", Engine::Ode, many(Scenario::ChasingIntra, vec({0.0320, 0.0335, 0.0345, 0.0350, 0.0360}), {abiotic(0.35, 3000)}, 0.1, 0.3, 0.5, 0.35, 0.125, 0.05)); });
        add("fig3ef", [] { return make("fig3ef", "M = 20 consumers on one abiotic resource (ODE)", Engine::Ode, s15(true)); });
        add("fig3gi", [] { return make("fig3gi", "M = 200 consumers, D ~ Normal(1, 0.38) x 0.008 (ODE)", Engine::Ode, many(Scenario::ChasingIntra, normal_D(200, 0.38, 0.008, 3), {abiotic(150, 1e5)}, 0.1, 0.5, 0.1, 0.2, 0.125, 0.2)); });

        // Functional responses. Where an escape rate d is not listed, d = 0.1.
        auto fr = [](double a, double d, double k, double ai, double di, double a12, double d12) {
            ModelConfig c = ModelConfig::zeros(a12 > 0 ? Scenario::ChasingInter : ai > 0 ? Scenario::ChasingIntra : Scenario::ChasingOnly, 2, 1);
            c.a.setConstant(a);
            c.d.setConstant(d);
            c.k.setConstant(k);
            c.w.setConstant(0.1);
            c.D.setConstant(0.001);
            if (ai > 0) {
                c.a_intra.setConstant(ai);
                c.d_intra.setConstant(di);
            }
            if (a12 > 0) {
                c.a_inter(0, 1) = c.a_inter(1, 0) = a12;
                c.d_inter(0, 1) = c.d_inter(1, 0) = d12;
            }
            c.resources = {biotic(0.1, 100)};
            return c;
        };
        add("figS2a", [fr] { return surface_of("figS2a", "Chasing-only response vs Beddington-DeAngelis, d = 0", fr(0.25, 0.0, 0.1, 0, 0, 0, 0), "chasing", {1, 2, 3, 4}); });
        add("figS2b", [fr] { return surface_of("figS2b", "Chasing-only response vs Beddington-DeAngelis, d = 0.1", fr(0.25, 0.1, 0.1, 0, 0, 0, 0), "chasing", {1, 2, 3, 4}); });
        add("figS2c", [fr] { return surface_of("figS2c", "Chasing-only response, k = 0.5, a = 0.025", fr(0.025, 0.1, 0.5, 0, 0, 0, 0), "chasing", {1, 2, 3, 4}); });
        add("figS3", [fr] { return surface_of("figS3", "Intraspecific response vs Beddington-DeAngelis", fr(0.1, 0.1, 0.1, 0.12, 0.1, 0, 0), "intra", {1, 2, 3, 4}); });
        add("figS4", [fr] { return surface_of("figS4", "Interspecific response vs Beddington-DeAngelis", fr(0.1, 0.1, 0.1, 0, 0, 0.6, 0.1), "inter", {2, 3}); });

        // Competitive exclusion
        add("figS5c", [] { return make("figS5c", "Chasing pairs only, abiotic: C1 is excluded", Engine::Ode, two({Scenario::ChasingOnly, 0.1, 0.5, 0.1, 0.1, 0.002, 0.001, 0, 0, 0, 0, abiotic(0.05, 5)})); });
        add("figS5d", [] { return make("figS5d", "Chasing pairs only, biotic: C1 is excluded", Engine::Ode, two({Scenario::ChasingOnly, 0.1, 0.2, 0.05, 0.1, 0.005, 0.004, 0, 0, 0, 0, biotic(0.05, 100)})); });

        // Interspecific interference. D_1 missing in (c, d): Delta = 0.1.
        add("figS6a", [] { return make("figS6a", "Interspecific interference, abiotic: unstable interior point", Engine::Stability, two({Scenario::ChasingInter, 0.05, 0.05, 0.02, 0.08, 0.001, 0.0009, 0, 0, 0.3, 0.01, abiotic(0.01, 20)})); });
        add("figS6b", [] { return make("figS6b", "Interspecific interference, biotic: unstable interior point", Engine::Stability, two({Scenario::ChasingInter, 0.05, 0.05, 0.02, 0.08, 0.001, 0.0008, 0, 0, 0.3, 0.1, biotic(0.02, 5)})); });
        add("figS6c", [] { return make("figS6c", "Closed form vs refined fixed point, abiotic, Delta = 0.1", Engine::Analytic, two({Scenario::ChasingInter, 0.04, 0.2, 0.1, 0.3, 0.00088, 0.0008, 0, 0, 0.6, 0.1, abiotic(0.2, 10)})); });
        add("figS6d", [] { return make("figS6d", "Closed form vs refined fixed point, biotic, Delta = 0.1", Engine::Analytic, two({Scenario::ChasingInter, 0.05, 0.2, 0.1, 0.2, 0.0055, 0.005, 0, 0, 0.6, 0.02, biotic(0.02, 10)})); });
        // (e, f) list no interspecific rates; a'12 = 0.6, d'12 = 0.1 from (c), Delta = 0.1.
        add("figS6e", [] { return make("figS6e", "Interspecific interference, abiotic Ra = 0.5: stability of the interior point", Engine::Stability, two({Scenario::ChasingInter, 0.05, 0.1, 0.1, 0.05, 0.00055, 0.0005, 0, 0, 0.6, 0.1, abiotic(0.5, 100)})); });
        add("figS6f", [] { return make("figS6f", "Interspecific interference, biotic R0 = 0.05: stability of the interior point", Engine::Stability, two({Scenario::ChasingInter, 0.05, 0.1, 0.1, 0.05, 0.00055, 0.0005, 0, 0, 0.6, 0.1, biotic(0.05, 100)})); });

        add("figS7c", [] { return make("figS7c", "Interspecific interference, abiotic K0 = 10: exclusion", Engine::Ode, two(s7(10, abiotic(0.2, 10), 0.02, 0.02))); });
        add("figS7d", [] { return make("figS7d", "Interspecific interference, biotic K0 = 10: exclusion", Engine::Ode, two(s7(10, biotic(0.05, 10), 0.02, 0.02))); });
        add("figS7e", [] { ExperimentSpec s = with_initial(make("figS7e", "a'12 = 0.06: limit cycle (ODE)", Engine::Ode, two(s7(60, biotic(0.05, 60), 0.06, 0.02)), 4e5), vec({10.8, 9.6}), vec({7.5})); s.run.window = 2e5; s.run.samples = 40001; return s; });
        add("figS7f", [] { ExperimentSpec s = with_initial(make("figS7f", "a'12 = 0.02: quasi-periodic torus (ODE)", Engine::Ode, two(s7(60, biotic(0.05, 60), 0.02, 0.02)), 4e5), vec({20, 5}), vec({5})); s.run.window = 2e5; s.run.samples = 40001; return s; });
        add("figS7g", [] { ExperimentSpec s = with_initial(make("figS7g", "Lyapunov spectrum and Poincare section of the S7e limit cycle", Engine::Lyapunov, two(s7(60, biotic(0.05, 60), 0.06, 0.02))), vec({10.8, 9.6}), vec({7.5})); s.lyapunov = LyapunovControls{2e5, 10.0, 2e5, 2e5}; return s; });
        add("figS7i", [] { ExperimentSpec s = with_initial(make("figS7i", "Lyapunov spectrum and Poincare section of the S7f torus", Engine::Lyapunov, two(s7(60, biotic(0.05, 60), 0.02, 0.02))), vec({20, 5}), vec({5})); s.lyapunov = LyapunovControls{2e5, 10.0, 5e4, 2e5}; return s; });
        add("figS7k", [] { return with_initial(make("figS7k", "Fig 2c parameters (ODE)", Engine::Ode, two(fig2c())), vec({20, 20}), vec({30})); });
        add("figS7l", [] { return with_initial(with_runs(make("figS7l", "Fig 2c parameters (SSA)", Engine::Ssa, two(fig2c())), 10), vec({20, 20}), vec({30})); });

        // Intraspecific interference, M = 2, N = 1
        add("figS8a", [] { return make("figS8a", "Intraspecific interference, abiotic, D1 = 1.2 D2: stable point", Engine::Stability, two({Scenario::ChasingIntra, 0.5, 0.5, 0.4, 0.5, 0.024, 0.02, 0.625, 0.5, 0, 0, abiotic(0.1, 10)})); });
        add("figS8b", [] { return make("figS8b", "Intraspecific interference, biotic, D1 = 1.05 D2: stable point", Engine::Stability, two({Scenario::ChasingIntra, 0.5, 0.5, 0.4, 0.5, 0.021, 0.02, 0.625, 0.5, 0, 0, biotic(0.3, 10)})); });
        add("figS8c", [] { return make("figS8c", "Closed form vs numeric steady state, abiotic, Delta = 0.1", Engine::Analytic, two({Scenario::ChasingIntra, 0.1, 0.5, 0.12, 0.3, 0.022, 0.02, 0.12, 0.05, 0, 0, abiotic(0.8, 100)})); });
        add("figS8d", [] { return make("figS8d", "Closed form vs numeric steady state, biotic, Delta = 0.1", Engine::Analytic, two({Scenario::ChasingIntra, 0.05, 0.8, 0.12, 0.2, 0.0088, 0.008, 0.06, 0.01, 0, 0, biotic(0.1, 100)})); });
        // (e, f) list no interference rates; a' = 0.625, d' = 0.5 from (a, b).
        add("figS8e", [] { return scan_of(make("figS8e", "Maximum tolerated Delta, abiotic: scan vs closed-form bound", Engine::Scan, two({Scenario::ChasingIntra, 0.5, 0.8, 0.2, 0.2, 0.008, 0.008, 0.625, 0.5, 0, 0, abiotic(0.8, 60)})), {"delta", 0.0, 3.0, 31}, {"d_intra", 0.25, 1.0, 4}, true); });
        add("figS8f", [] { return scan_of(make("figS8f", "Maximum tolerated Delta, biotic: scan vs closed-form bound", Engine::Scan, two({Scenario::ChasingIntra, 0.5, 0.8, 0.1, 0.2, 0.008, 0.008, 0.625, 0.5, 0, 0, biotic(0.2, 100)})), {"delta", 0.0, 2.0, 21}, {"d_intra", 0.25, 1.0, 4}, true); });

        add("figS9c", [] { return make("figS9c", "d' = 0.05: stable coexistence (ODE)", Engine::Ode, two(s9(0.05))); });
        add("figS9d", [] { return make("figS9d", "d' = 0.1: oscillating coexistence (ODE)", Engine::Ode, two(s9(0.1))); });
        add("figS9e", [] { ExperimentSpec s = make("figS9e", "Hopf bifurcation in d'", Engine::Hopf, two(s9(0.05))); s.hopf = HopfControls{0.01, 0.2}; return s; });
        add("figS9g", [] { return with_initial(with_runs(make("figS9g", "Intraspecific interference under SSA, K0 = 500", Engine::Ssa, two(fig2kl(500, 0.055, 0.057))), 10), vec({50, 50}), vec({250})); });

        // Both interference types. d'12 missing in (c, d): 0.2 from (f, g).
        auto s10 = [](double w, double a_intra, double D1, ResourceLaw r, double d12) {
            return two({Scenario::ChasingIntraInter, 0.1, 0.2, 0.2, w, D1, 0.0085, a_intra, 0.3, 0.05, d12, r});
        };
        add("figS10c", [] { return scan_of(make("figS10c", "Both interference types, abiotic: (Delta, d') phase diagram", Engine::Scan, two({Scenario::ChasingIntraInter, 0.1, 0.3, 0.1, 0.1, 0.001, 0.001, 0.12, 0.3, 0.05, 0.2, abiotic(0.3, 100)})), {"delta", 0.0, 1.0, 11}, {"d_intra", 0.02, 0.5, 11, true}); });
        add("figS10d", [s10] { return scan_of(make("figS10d", "Both interference types, biotic: (Delta, d') phase diagram", Engine::Scan, s10(0.05, 0.14, 0.0085, biotic(0.1, 100), 0.2)), {"delta", 0.0, 1.0, 11}, {"d_intra", 0.02, 0.5, 11, true}); });
        add("figS10e", [s10] { return scan_of(make("figS10e", "Delta = 0.2 transection over (d', d'12)", Engine::Scan, s10(0.05, 0.14, 0.0102, biotic(0.1, 100), 0.2)), {"d_intra", 0.02, 0.5, 11, true}, {"d_inter", 0.02, 0.8, 11, true}); });
        // (f, i) list D1 = 0.0009 with D2 = 0.0085; kept as written.
        add("figS10f", [] { return make("figS10f", "Both interference types, abiotic: constant coexistence (ODE)", Engine::Ode, two({Scenario::ChasingIntraInter, 0.1, 0.2, 0.2, 0.1, 0.0009, 0.0085, 0.12, 0.3, 0.05, 0.2, abiotic(0.9, 100)})); });
        add("figS10g", [s10] { return make("figS10g", "Both interference types, biotic, d'12 = 0.2 (ODE)", Engine::Ode, s10(0.05, 0.14, 0.0009, biotic(0.1, 100), 0.2)); });
        add("figS10h", [s10] { return make("figS10h", "Both interference types, biotic, d'12 = 0.4 (ODE)", Engine::Ode, s10(0.05, 0.14, 0.0009, biotic(0.1, 100), 0.4)); });

        // D_1 missing: Delta = 0.1. With beta = 30 a start at C = 10 binds nearly everyone in
        // intra pairs and both consumers collapse to ~1e-17; start at their own scale.
        add("figS11a", [] { return with_initial(make("figS11a", "Both interference types, abiotic: closed form vs ODE", Engine::Analytic, two({Scenario::ChasingIntraInter, 0.05, 0.5, 0.1, 0.2, 0.0088, 0.008, 0.06, 0.002, 0.2, 0.2, abiotic(0.8, 100)})), vec({1, 1}), vec({50})); });
        add("figS11b", [] { return with_initial(make("figS11b", "Both interference types, biotic: closed form vs ODE", Engine::Analytic, two({Scenario::ChasingIntraInter, 0.05, 0.5, 0.05, 0.2, 0.0066, 0.006, 0.06, 0.002, 0.2, 0.2, biotic(0.2, 100)})), vec({1, 1}), vec({50})); });
        add("figS12a", [] { return with_runs(make("figS12a", "Both interference types, abiotic (SSA)", Engine::Ssa, two({Scenario::ChasingIntraInter, 0.1, 0.3, 0.1, 0.15, 0.0125, 0.012, 0.11, 0.5, 0.01, 0.8, abiotic(0.8, 300)})), 10); });
        add("figS12b", [] { return with_runs(make("figS12b", "Both interference types, biotic (SSA)", Engine::Ssa, two({Scenario::ChasingIntraInter, 0.1, 0.3, 0.1, 0.2, 0.013, 0.0125, 0.11, 0.5, 0.05, 0.4, biotic(0.2, 500)})), 10); });

        // Many species
        add("figS14c", [] { return make("figS14c", "M = 5 on one abiotic resource (ODE + closed form)", Engine::Ode, many(Scenario::ChasingIntra, vec({0.0619, 0.0595, 0.057, 0.0584, 0.0603}), {abiotic(0.9, 400)}, 0.04, 0.6, 0.15, 0.45, 0.056, 0.04)); });
        add("figS14d", [] { return make("figS14d", "M = 5 on three biotic resources (ODE + closed form)", Engine::Ode, fig3a()); });
        add("figS15a", [] { return make("figS15a", "M = 20, abiotic, chasing only: one survivor (ODE)", Engine::Ode, s15(false)); });
        add("figS15b", [] { return make("figS15b", "M = 20, abiotic, intraspecific interference (ODE)", Engine::Ode, s15(true)); });
        add("figS15c", [] { return with_runs(make("figS15c", "M = 20, abiotic, chasing only (SSA)", Engine::Ssa, s15(false)), 3); });
        add("figS15d", [] { return with_runs(make("figS15d", "M = 20, abiotic, intraspecific interference (SSA)", Engine::Ssa, s15(true)), 3); });
        add("figS16a", [] { return make("figS16a", "M = 20, biotic, chasing only (ODE)", Engine::Ode, s16(false)); });
        add("figS16b", [] { return make("figS16b", "M = 20, biotic, intraspecific interference (ODE)", Engine::Ode, s16(true)); });
        add("figS16c", [] { return with_runs(make("figS16c", "M = 20, biotic, chasing only (SSA)", Engine::Ssa, s16(false)), 3); });
        add("figS16d", [] { return with_runs(make("figS16d", "M = 20, biotic, intraspecific interference (SSA)", Engine::Ssa, s16(true)), 3); });
        auto s17a = [] { return many(Scenario::ChasingIntra, uniform_D(100, 0.002, 0.002, 17), {abiotic(50, 10000)}, 0.1, 0.3, 0.1, 0.3, 0.125, 0.3); };
        auto s17b = [] { return many(Scenario::ChasingIntra, uniform_D(100, 0.002, 0.005, 171), {biotic(0.95, 1000)}, 0.1, 0.5, 0.1, 0.1, 0.125, 0.1); };
        add("figS17a", [s17a] { return make("figS17a", "M = 100 on one abiotic resource (ODE)", Engine::Ode, s17a()); });
        add("figS17b", [s17b] { return make("figS17b", "M = 100 on one biotic resource (ODE)", Engine::Ode, s17b()); });
        add("figS17c", [s17a] { return with_runs(make("figS17c", "M = 100 on one abiotic resource (SSA)", Engine::Ssa, s17a()), 1); });
        add("figS17d", [s17b] { return with_runs(make("figS17d", "M = 100 on one biotic resource (SSA)", Engine::Ssa, s17b()), 1); });
        auto s18a = [] { return many(Scenario::ChasingIntra, uniform_D(18, 0.028, 0.008, 181), {abiotic(30, 8000), abiotic(40, 3000), abiotic(25, 5000)}, 0.1, 0.5, 0.2, 0.2, 0.125, 0.1); };
        add("figS18a", [s18a] { return make("figS18a", "M = 18 on three abiotic resources (ODE)", Engine::Ode, s18a()); });
        add("figS18b", [] { return make("figS18b", "M = 18 on three biotic resources (ODE)", Engine::Ode, s18b()); });
        add("figS18c", [s18a] { return with_runs(make("figS18c", "M = 18 on three abiotic resources (SSA)", Engine::Ssa, s18a()), 1); });
        add("figS18d", [] { return with_runs(make("figS18d", "M = 18 on three biotic resources (SSA)", Engine::Ssa, s18b()), 1); });
        auto s19a = [] { return many(Scenario::ChasingIntra, uniform_D(98, 0.01, 0.005, 19), {abiotic(30, 8000), abiotic(40, 3000), abiotic(25, 5000)}, 0.1, 0.5, 0.2, 0.3, 0.125, 0.3); };
        auto s19b = [] { return many(Scenario::ChasingIntra, uniform_D(98, 0.008, 0.01, 191), {biotic(0.85, 1800), biotic(0.95, 1400), biotic(0.9, 1600)}, 0.2, 0.4, 0.3, 0.3, 0.25, 0.2); };
        add("figS19a", [s19a] { return make("figS19a", "M = 98 on three abiotic resources (ODE)", Engine::Ode, s19a()); });
        add("figS19b", [s19b] { return make("figS19b", "M = 98 on three biotic resources (ODE)", Engine::Ode, s19b()); });
        add("figS19c", [s19a] { return with_runs(make("figS19c", "M = 98 on three abiotic resources (SSA)", Engine::Ssa, s19a()), 1); });
        add("figS19d", [s19b] { return with_runs(make("figS19d", "M = 98 on three biotic resources (SSA)", Engine::Ssa, s19b()), 1); });

        add("figS22", [] { return scan_of(make("figS22", "Coexistence region, abiotic Ra = 5, D2 = 0.0014", Engine::Scan, two({Scenario::ChasingIntra, 0.1, 0.5, 0.1, 0.1, 0.0014, 0.0014, 0.125, 0.1, 0, 0, abiotic(5, 100)})), {"delta", 0.0, 1.0, 11}, {"d_intra", 0.02, 0.5, 11, true}); });

        auto ramp = [](double base, double step) {
            Vec D(20);
            for (Eigen::Index i = 0; i < 20; ++i) D(i) = base + double(i + 1) * step;
            return D;
        };
        add("figS25a", [ramp] { return make("figS25a", "M = 20, abiotic: pair fractions (ODE)", Engine::Ode, many(Scenario::ChasingIntra, ramp(0.03, 5e-4), {abiotic(0.35, 3000)}, 0.2, 0.3, 0.15, 0.5, 0.25, 0.05)); });
        add("figS25b", [ramp] { return make("figS25b", "M = 20, biotic: pair fractions (ODE)", Engine::Ode, many(Scenario::ChasingIntra, ramp(0.047, 2.5e-4), {biotic(0.8, 400)}, 0.008, 0.6, 0.15, 0.45, 0.0112, 0.04)); });
        return e;
    }();
    return entries;
}

}  // namespace

std::vector<PresetInfo> list_presets() {
    std::vector<PresetInfo> out;
    for (const auto& e : registry()) {
        const ExperimentSpec s = e.build();
        out.push_back({s.name, s.description, s.engine});
    }
    return out;
}

ExperimentSpec make_preset(std::string_view name) {
    for (const auto& e : registry())
        if (name == e.name) return e.build();
    throw InvalidConfig("unknown preset '" + std::string(name) + "' (see list-presets)");
}

}  // namespace crm
