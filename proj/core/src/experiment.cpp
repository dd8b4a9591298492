#include "crm/experiment.hpp"

#include "crm/config_io.hpp"
#include "crm/errors.hpp"
#include "crm/export.hpp"
#include "crm/functional_response.hpp"
#include "crm/scan.hpp"
#include "crm/stability.hpp"

#include <json.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <optional>
#include <sstream>

#ifndef CRM_VERSION
#define CRM_VERSION "0.0.0"
#endif

namespace crm {

using Json = nlohmann::ordered_json;

std::string_view to_string(Engine e) noexcept {
    switch (e) {
        case Engine::Ode: return "ode";
        case Engine::Ssa: return "ssa";
        case Engine::Ibm: return "ibm";
        case Engine::Analytic: return "analytic";
        case Engine::Stability: return "stability";
        case Engine::Hopf: return "hopf";
        case Engine::Lyapunov: return "lyapunov";
        case Engine::FrSurface: return "fr_surface";
        case Engine::Scan: return "scan";
    }
    return "?";
}

Engine engine_from_string(std::string_view name) {
    for (auto e : {Engine::Ode, Engine::Ssa, Engine::Ibm, Engine::Analytic, Engine::Stability,
                   Engine::Hopf, Engine::Lyapunov, Engine::FrSurface, Engine::Scan})
        if (to_string(e) == name) return e;
    throw InvalidConfig("unknown engine '" + std::string(name) +
                        "' (ode, ssa, ibm, analytic, stability, hopf, lyapunov, fr_surface, scan)");
}

std::vector<double> ScanAxis::values() const {
    std::vector<double> v(points);
    for (std::size_t i = 0; i < points; ++i) {
        const double f = points == 1 ? 0.0 : double(i) / double(points - 1);
        v[i] = log ? lo * std::pow(hi / lo, f) : lo + f * (hi - lo);
    }
    return v;
}

// ---------------------------------------------------------------- parameters

namespace {

bool consumer_index(std::string_view name, const ModelConfig& c, std::size_t& i) {
    if (name.size() < 2 || name[0] != 'D') return false;
    std::size_t v = 0;
    for (char ch : name.substr(1)) {
        if (ch < '0' || ch > '9') return false;
        v = v * 10 + static_cast<std::size_t>(ch - '0');
    }
    if (v == 0 || v > c.consumers()) return false;
    i = v - 1;
    return true;
}

Mat off_diagonal(std::size_t M, double v) {
    Mat m = Mat::Constant(static_cast<Eigen::Index>(M), static_cast<Eigen::Index>(M), v);
    m.diagonal().setZero();
    return m;
}

}  // namespace

bool is_parameter(std::string_view name, const ModelConfig& c) {
    std::size_t i = 0;
    if (name == "delta") return c.consumers() == 2;
    if (consumer_index(name, c, i)) return true;
    if (name == "a_intra" || name == "d_intra") return has_intra(c.scenario);
    if (name == "a_inter" || name == "d_inter") return has_inter(c.scenario);
    return name == "a" || name == "d" || name == "k" || name == "w" || name == "K0" || name == "rate";
}

void set_parameter(ModelConfig& c, std::string_view name, double v) {
    if (!is_parameter(name, c))
        throw InvalidConfig("unknown parameter '" + std::string(name) + "' for this model");
    std::size_t i = 0;
    if (name == "delta") {
        c.D(0) = c.D(1) * (1.0 + v);
    } else if (consumer_index(name, c, i)) {
        c.D(static_cast<Eigen::Index>(i)) = v;
    } else if (name == "a") {
        c.a.setConstant(v);
    } else if (name == "d") {
        c.d.setConstant(v);
    } else if (name == "k") {
        c.k.setConstant(v);
    } else if (name == "w") {
        c.w.setConstant(v);
    } else if (name == "a_intra") {
        c.a_intra.setConstant(v);
    } else if (name == "d_intra") {
        c.d_intra.setConstant(v);
    } else if (name == "a_inter") {
        c.a_inter = off_diagonal(c.consumers(), v);
    } else if (name == "d_inter") {
        c.d_inter = off_diagonal(c.consumers(), v);
    } else if (name == "K0") {
        for (auto& r : c.resources) r.carrying_capacity = v;
    } else if (name == "rate") {
        for (auto& r : c.resources) r.intrinsic_rate = v;
    }
}

double get_parameter(const ModelConfig& c, std::string_view name) {
    if (!is_parameter(name, c))
        throw InvalidConfig("unknown parameter '" + std::string(name) + "' for this model");
    std::size_t i = 0;
    if (name == "delta") return (c.D(0) - c.D(1)) / c.D(1);
    if (consumer_index(name, c, i)) return c.D(static_cast<Eigen::Index>(i));
    if (name == "a") return c.a(0, 0);
    if (name == "d") return c.d(0, 0);
    if (name == "k") return c.k(0, 0);
    if (name == "w") return c.w(0, 0);
    if (name == "a_intra") return c.a_intra(0);
    if (name == "d_intra") return c.d_intra(0);
    if (name == "a_inter") return c.a_inter(0, 1);
    if (name == "d_inter") return c.d_inter(0, 1);
    if (name == "K0") return c.resources[0].carrying_capacity;
    return c.resources[0].intrinsic_rate;
}

// ---------------------------------------------------------------- validation

void validate(const ExperimentSpec& s) {
    auto bad = [](const std::string& field, const std::string& msg) {
        throw InvalidConfig(field + ": " + msg);
    };
    if (s.name.empty()) bad("name", "must not be empty");
    if (s.name.find_first_of("/\\") != std::string::npos) bad("name", "must not contain path separators");
    s.config.validate();
    const auto M = static_cast<Eigen::Index>(s.config.consumers());
    const auto N = static_cast<Eigen::Index>(s.config.resource_count());
    if (s.initial_C.size() && s.initial_C.size() != M) bad("initial.C", "length must equal M");
    if (s.initial_R.size() && s.initial_R.size() != N) bad("initial.R", "length must equal N");
    if ((s.initial_C.array() < 0).any() || (s.initial_R.array() < 0).any())
        bad("initial", "abundances must be >= 0");
    const auto& r = s.run;
    if (!(r.t_end > 0)) bad("run.t_end", "must be > 0");
    if (r.samples < 2) bad("run.samples", "must be >= 2");
    if (!(r.rel_tol > 0) || !(r.abs_tol > 0)) bad("run", "tolerances must be > 0");
    if (r.window < 0) bad("run.window", "must be >= 0");
    if (r.runs == 0) bad("run.runs", "must be >= 1");

    switch (s.engine) {
        case Engine::Ode:
        case Engine::Ssa:
        case Engine::Analytic:
        case Engine::Stability:
            break;
        case Engine::Ibm:
            if (!s.ibm) bad("ibm", "required by the ibm engine");
            break;
        case Engine::Hopf:
            if (!s.hopf) bad("hopf", "required by the hopf engine");
            if (!has_intra(s.config.scenario)) bad("model.scenario", "hopf needs intraspecific interference");
            if (!(s.hopf->lo > 0 && s.hopf->hi > s.hopf->lo)) bad("hopf", "need 0 < lo < hi");
            break;
        case Engine::Lyapunov:
            if (!s.lyapunov) bad("lyapunov", "required by the lyapunov engine");
            if (!(s.lyapunov->t_total > 0 && s.lyapunov->renorm_dt > 0)) bad("lyapunov", "times must be > 0");
            break;
        case Engine::FrSurface: {
            if (!s.surface) bad("surface", "required by the fr_surface engine");
            const auto& f = *s.surface;
            if (f.family != "chasing" && f.family != "intra" && f.family != "inter")
                bad("surface.family", "expected chasing, intra or inter");
            if (f.family == "inter" && s.config.consumers() < 2) bad("surface.family", "inter needs M >= 2");
            for (int o : f.orders) {
                if (o < 1 || o > 4) bad("surface.orders", "orders are 1..4");
                if (f.family == "inter" && o != 2 && o != 3) bad("surface.orders", "inter has orders 2 and 3");
            }
            if (!(f.r_range[0] > 0 && f.r_range[1] > f.r_range[0])) bad("surface.R", "need 0 < lo < hi");
            if (!(f.c_range[0] > 0 && f.c_range[1] > f.c_range[0])) bad("surface.C", "need 0 < lo < hi");
            if (f.points < 2) bad("surface.points", "must be >= 2");
            break;
        }
        case Engine::Scan:
            if (!s.scan) bad("scan", "required by the scan engine");
            if (s.config.scenario != Scenario::ChasingIntra &&
                s.config.scenario != Scenario::ChasingIntraInter)
                bad("model.scenario", "scan needs ChasingIntra or ChasingIntraInter");
            for (std::size_t i = 0; i < 2; ++i) {
                const auto& ax = s.scan->axes[i];
                const std::string f = "scan.axes[" + std::to_string(i) + "]";
                if (!is_parameter(ax.parameter, s.config))
                    bad(f + ".parameter", "'" + ax.parameter + "' is not a parameter of this model");
                if (ax.points == 0) bad(f + ".points", "must be >= 1");
                if (ax.log && !(ax.lo > 0 && ax.hi > 0)) bad(f, "log axis needs positive bounds");
            }
            if (s.scan->axes[0].parameter == s.scan->axes[1].parameter)
                bad("scan.axes", "axes must differ");
            break;
    }
}

std::filesystem::path default_output_root() {
    if (const char* env = std::getenv("CRM_OUTPUT_ROOT"); env && *env) return env;
    return "crm-out";
}

// ---------------------------------------------------------------- engines

namespace {

Json vec_json(const Vec& v) {
    Json a = Json::array();
    for (double x : v) a.push_back(x);
    return a;
}

Json fixed_point_json(const FixedPoint& f) {
    return {{"method", std::string(to_string(f.method))},
            {"C", vec_json(f.C)},
            {"R", vec_json(f.R)},
            {"qss_residual", f.qss_residual},
            {"rhs_residual", f.rhs_residual},
            {"regime_ratio", f.regime_ratio},
            {"iterations", f.iterations}};
}

Json stability_json(const StabilityReport& r) {
    Json ev = Json::array();
    for (const auto& z : r.eigenvalues) ev.push_back({z.real(), z.imag()});
    return {{"classification", std::string(to_string(r.classification))},
            {"leading_real_part", r.leading_real_part},
            {"eigenvalues", ev}};
}

Json rel_error(const Vec& a, const Vec& b) {
    Json out = Json::array();
    for (Eigen::Index i = 0; i < a.size(); ++i) out.push_back(std::abs(a(i) - b(i)) / std::abs(b(i)));
    return out;
}

bool all_kind(const ModelConfig& c, ResourceKind k) {
    return std::all_of(c.resources.begin(), c.resources.end(),
                       [k](const ResourceLaw& r) { return r.kind == k; });
}

// Throws InvalidConfig when no closed form covers the scenario.
FixedPoint closed_form(const ModelConfig& c) {
    const bool two_by_one = c.consumers() == 2 && c.resource_count() == 1;
    switch (c.scenario) {
        case Scenario::ChasingIntra:
            if (two_by_one) return analytic_intra_2x1(c);
            if (all_kind(c, ResourceKind::Biotic)) return analytic_general_biotic(c);
            if (all_kind(c, ResourceKind::Abiotic)) return analytic_general_abiotic(c);
            break;
        case Scenario::ChasingInter:
            if (two_by_one) return analytic_inter_2x1(c);
            break;
        case Scenario::ChasingIntraInter:
            if (two_by_one) return analytic_both_2x1(c);
            break;
        case Scenario::ChasingOnly:
            break;
    }
    throw InvalidConfig("no closed-form steady state for this scenario and shape");
}

SystemState initial_state(const ExperimentSpec& s) {
    const auto& c = s.config;
    Vec C = s.initial_C.size() ? s.initial_C : Vec::Constant(static_cast<Eigen::Index>(c.consumers()), 10.0);
    Vec R = s.initial_R;
    if (!R.size()) {
        R.resize(static_cast<Eigen::Index>(c.resource_count()));
        for (std::size_t l = 0; l < c.resource_count(); ++l)
            R(static_cast<Eigen::Index>(l)) = 0.5 * c.resources[l].carrying_capacity;
    }
    return SystemState::from_totals(C, R);
}

IntegratorControls controls(const RunControls& r) {
    IntegratorControls ctl;
    ctl.rel_tol = r.rel_tol;
    ctl.abs_tol = r.abs_tol;
    ctl.extinction_threshold = r.extinction_threshold;
    ctl.sample_times = uniform_samples(0.0, r.t_end, r.samples);
    return ctl;
}

double window_of(const RunControls& r) { return r.window > 0 ? r.window : r.t_end / 10.0; }

class Outputs {
public:
    explicit Outputs(std::filesystem::path dir) : dir_(std::move(dir)) {
        std::filesystem::create_directories(dir_);
    }
    template <class F>
    void csv(const std::string& name, F&& writer) {
        std::ostringstream os;
        writer(os);
        put(name, os.str());
    }
    void json(const std::string& name, const Json& j) { put(name, j.dump(2) + "\n"); }
    void put(const std::string& name, const std::string& text) {
        write_file(dir_ / name, text);
        files.push_back(dir_ / name);
    }
    const std::filesystem::path& dir() const { return dir_; }
    std::vector<std::filesystem::path> files;

private:
    std::filesystem::path dir_;
};

Json outcome_json(const OutcomeClass& oc) {
    Json fates = Json::array();
    for (auto f : oc.fates) fates.push_back(std::string(to_string(f)));
    return {{"fates", fates},
            {"dynamics", std::string(to_string(oc.dynamics))},
            {"relative_oscillation", oc.relative_oscillation},
            {"amplitude_drift", oc.amplitude_drift},
            {"frequencies", oc.frequencies}};
}

Json events_json(const std::vector<Event>& events) {
    Json a = Json::array();
    for (const auto& e : events)
        if (e.kind != EventKind::NegativityClipped)
            a.push_back({{"time", e.time}, {"species", e.species}, {"kind", std::string(to_string(e.kind))}});
    return a;
}

void run_ode(const ExperimentSpec& s, Outputs& out, Json& info) {
    const Trajectory traj = integrate(ModelRhs(s.config), initial_state(s), s.run.t_end, controls(s.run));
    out.csv("trajectory.csv", [&](std::ostream& os) { write_trajectory_csv(os, traj); });
    const OutcomeClass oc = classify_outcome(traj, window_of(s.run));
    const auto end = traj.final_state();
    Json j = outcome_json(oc);
    j["final_C"] = vec_json(end.consumer_totals());
    j["final_R"] = vec_json(end.resource_totals());
    j["events"] = events_json(traj.events);
    out.json("outcome.json", j);
    if (s.config.consumers() >= 2)
        out.csv("rank_abundance.csv", [&](std::ostream& os) {
            write_rank_csv(os, rank_abundance(end.consumer_totals(), true, s.run.extinction_threshold));
        });
    try {
        const FixedPoint cf = closed_form(s.config);
        Json cmp;
        cmp["closed_form"] = fixed_point_json(cf);
        cmp["ode_endpoint"] = {{"C", vec_json(end.consumer_totals())}, {"R", vec_json(end.resource_totals())}};
        cmp["relative_error_C"] = rel_error(cf.C, end.consumer_totals());
        cmp["relative_error_R"] = rel_error(cf.R, end.resource_totals());
        out.json("comparison.json", cmp);
    } catch (const Error& e) {
        info["comparison"] = e.what();
    }
    info["integrator"] = {{"accepted", traj.stats.accepted}, {"rejected", traj.stats.rejected}};
}

void run_ssa_engine(const ExperimentSpec& s, Outputs& out, Json& info) {
    const auto net = build_reactions(s.config);
    const SystemState init = initial_state(s);
    SsaOptions opts;
    opts.sample_times = uniform_samples(0.0, s.run.t_end, s.run.samples);
    const auto runs = run_ensemble(net, net.from_totals(init.consumer_totals(), init.resource_totals()),
                                   s.run.t_end, s.run.seed, s.run.runs, opts, s.run.threads);
    out.csv("ssa.csv", [&](std::ostream& os) { write_ssa_csv(os, net, runs); });
    const auto summary = summarize(net, runs);
    out.csv("ensemble.csv", [&](std::ostream& os) { write_ensemble_csv(os, summary, s.config.consumers()); });
    Json per = Json::array();
    std::size_t lost = 0;
    for (const auto& r : runs) {
        lost += r.lost_consumer();
        per.push_back({{"seed", r.seed},
                       {"events", r.event_count},
                       {"lost_consumer", r.lost_consumer()},
                       {"extinction_time", r.extinction_time}});
    }
    out.json("ssa.json", {{"runs", per}, {"lost_fraction", double(lost) / double(runs.size())}});
    Json seeds = Json::array();
    for (const auto& r : runs) seeds.push_back(r.seed);
    info["seeds"] = seeds;
}

void run_ibm_engine(const ExperimentSpec& s, Outputs& out, Json& info) {
    const auto& b = *s.ibm;
    World w = make_world(b.params, b.consumers, b.resources, s.run.seed);
    const IbmSeries series = run_ibm(w, b.params, s.run.t_end, b.sample_dt);
    out.csv("ibm.csv", [&](std::ostream& os) { write_ibm_csv(os, series); });
    out.csv("snapshot.csv", [&](std::ostream& os) { write_snapshot_csv(os, w); });
    out.json("ibm.json", {{"captures", w.captures},
                          {"dt", b.params.dt},
                          {"final", {w.consumers(0), w.consumers(1), w.resources()}}});
    info["seeds"] = {s.run.seed};
}

void run_analytic(const ExperimentSpec& s, Outputs& out, Json&) {
    const FixedPoint cf = closed_form(s.config);
    Json j;
    j["closed_form"] = fixed_point_json(cf);
    try {
        const FixedPoint nr = find_interior_fixed_point(s.config, cf);
        j["refined"] = fixed_point_json(nr);
        j["refined"]["stability"] = stability_json(classify(s.config, nr));
        j["relative_error_C"] = rel_error(cf.C, nr.C);
        j["relative_error_R"] = rel_error(cf.R, nr.R);
    } catch (const BoundaryFixedPoint& e) {
        j["refined"] = {{"boundary", true},
                        {"C", e.consumers()},
                        {"R", e.resources()},
                        {"extinct", e.extinct()}};
    } catch (const ConvergenceError& e) {
        j["refined"] = {{"error", e.what()}};
    }
    const Trajectory traj = integrate(ModelRhs(s.config), initial_state(s), s.run.t_end, controls(s.run));
    out.csv("trajectory.csv", [&](std::ostream& os) { write_trajectory_csv(os, traj); });
    const auto end = traj.final_state();
    j["ode_endpoint"] = {{"C", vec_json(end.consumer_totals())}, {"R", vec_json(end.resource_totals())}};
    j["ode_relative_error_C"] = rel_error(cf.C, end.consumer_totals());
    out.json("analytic.json", j);
}

void run_stability(const ExperimentSpec& s, Outputs& out, Json&) {
    FixedPoint guess;
    std::string source = "closed form";
    try {
        guess = closed_form(s.config);
    } catch (const Error&) {
        const Trajectory traj = integrate(ModelRhs(s.config), initial_state(s), s.run.t_end, controls(s.run));
        const auto end = traj.final_state();
        guess = make_fixed_point(s.config, end.consumer_totals(), end.resource_totals(),
                                 FixedPointMethod::NewtonRefined);
        source = "ODE endpoint";
    }
    Json j;
    j["guess_source"] = source;
    try {
        const FixedPoint fp = find_interior_fixed_point(s.config, guess);
        j["fixed_point"] = fixed_point_json(fp);
        j["stability"] = stability_json(classify(s.config, fp));
    } catch (const BoundaryFixedPoint& e) {
        j["fixed_point"] = {{"boundary", true}, {"C", e.consumers()}, {"R", e.resources()}, {"extinct", e.extinct()}};
    }
    out.json("stability.json", j);
}

void run_hopf(const ExperimentSpec& s, Outputs& out, Json&) {
    const auto& h = *s.hopf;
    HopfOptions o;
    o.resolution = h.resolution;
    o.amplitude_points = h.points;
    o.amplitude_span = h.span;
    o.settle_time = h.settle_time;
    o.integrator.rel_tol = s.run.rel_tol;
    o.integrator.abs_tol = s.run.abs_tol;
    const HopfResult r = hopf_scan(s.config, {h.lo, h.hi}, o);
    out.csv("hopf.csv", [&](std::ostream& os) { write_hopf_csv(os, r); });
    out.json("hopf.json", {{"d_prime_critical", r.d_prime_critical},
                           {"oscillatory_above", r.oscillatory_above},
                           {"fit_slope", r.fit_slope},
                           {"fit_intercept", r.fit_intercept},
                           {"fit_r2", r.fit_r2}});
}

void run_lyapunov(const ExperimentSpec& s, Outputs& out, Json&) {
    const auto& l = *s.lyapunov;
    LyapunovOptions lo;
    lo.transient = l.transient;
    lo.integrator.rel_tol = s.run.rel_tol;
    lo.integrator.abs_tol = s.run.abs_tol;
    const SystemState init = initial_state(s);
    const LyapunovSpectrum spec = lyapunov_spectrum(s.config, init, l.t_total, l.renorm_dt, lo);

    // Section of the attractor: transient, then a densely sampled run.
    IntegratorControls ctl;
    ctl.rel_tol = s.run.rel_tol;
    ctl.abs_tol = s.run.abs_tol;
    ctl.extinction_threshold = s.run.extinction_threshold;
    const ModelRhs rhs(s.config);
    const Trajectory settle = integrate(rhs, init, l.transient, ctl);
    SystemState start = settle.final_state();
    start.t = 0.0;
    const auto n = static_cast<std::size_t>(l.section_time) + 1;
    ctl.sample_times = uniform_samples(0.0, l.section_time, n);
    const Trajectory traj = integrate(rhs, start, l.section_time, ctl);
    const auto path = totals_path(traj);
    double mean = 0.0;
    for (const auto& p : path) mean += p(0);
    mean /= double(path.size());
    Json j{{"exponents", spec.exponents},
           {"integration_time", spec.integration_time},
           {"renorm_interval", spec.renorm_interval}};
    try {
        const auto cross = poincare_section(traj.times, path, {0, mean, CrossingDirection::Increasing});
        const std::size_t u = 1, v = static_cast<std::size_t>(path.front().size()) - 1;
        const SectionShape sh = section_shape(cross, path, u, v);
        j["section"] = {{"plane", "C1 = time mean, increasing"},
                        {"crossings", sh.count},
                        {"diameter", sh.diameter},
                        {"orbit_size", sh.orbit_size},
                        {"max_angular_gap", sh.max_angular_gap},
                        {"radius_spread", sh.radius_spread}};
        out.csv("section.csv", [&](std::ostream& os) { write_section_csv(os, cross, s.config.consumers()); });
    } catch (const NoCrossing& e) {
        j["section"] = {{"error", e.what()}};
    }
    out.json("lyapunov.json", j);
}

void run_surface(const ExperimentSpec& s, Outputs& out, Json&) {
    const auto& f = *s.surface;
    const auto& c = s.config;
    const double a = c.a(0, 0), d = c.d(0, 0), k = c.k(0, 0);
    std::vector<FrEvaluator> variants;
    std::optional<FrEvaluator> bd;
    if (f.family == "chasing") {
        for (int o : f.orders) variants.push_back(chasing_variant(a, d, k, static_cast<FrOrder>(o)));
        bd = beddington_variant({a, k, 0.0, 1.0, false});
    } else if (f.family == "intra") {
        const double ai = c.a_intra(0), di = c.d_intra(0);
        for (int o : f.orders) variants.push_back(intra_variant(a, d, k, ai, di, static_cast<FrOrder>(o)));
        bd = beddington_variant({a, k, ai, di, false});
    } else {
        const double a12 = c.a_inter(0, 1), d12 = c.d_inter(0, 1);
        for (int o : f.orders)
            variants.push_back(inter_variant(a, d, k, a12 / d12, f.own_abundance, static_cast<FrOrder>(o)));
        bd = beddington_inter_variant(a, k, a12, d12, f.own_abundance);
    }
    const auto rg = logspace(f.r_range[0], f.r_range[1], f.points);
    const auto cg = logspace(f.c_range[0], f.c_range[1], f.points);
    const FrQuantity q = f.searching_efficiency ? FrQuantity::Xi : FrQuantity::F;
    std::vector<FrSurface> surfaces;
    for (const auto& v : variants) surfaces.push_back(evaluate_surface(v, rg, cg, q));
    Json disc = Json::array();
    if (f.include_bd) {
        surfaces.push_back(evaluate_surface(*bd, rg, cg, q));
        for (const auto& v : variants) {
            const auto dd = fr_discrepancy_surface(v, *bd, rg, cg, q);
            disc.push_back({{"variant", v.name},
                            {"reference", bd->name},
                            {"max_absolute", dd.max_absolute},
                            {"max_relative", dd.max_relative}});
        }
    }
    out.csv("fr_surface.csv", [&](std::ostream& os) { write_surface_csv(os, surfaces); });
    out.json("fr_surface.json", {{"quantity", f.searching_efficiency ? "Xi" : "F"}, {"discrepancy", disc}});
}

void run_scan(const ExperimentSpec& s, Outputs& out, Json&) {
    ScanOptions o;
    o.t_end = s.run.t_end;
    o.samples = s.run.samples;
    o.window = window_of(s.run);
    o.integrator.rel_tol = s.run.rel_tol;
    o.integrator.abs_tol = s.run.abs_tol;
    o.outcome.extinction_threshold = s.run.extinction_threshold;
    o.initial_C = s.initial_C;
    o.initial_R = s.initial_R;
    o.overlay_bound = s.scan->overlay_bound;
    o.threads = s.run.threads;
    const ScanResult r = scan_coexistence(s.config, s.scan->axes, o);
    out.csv("scan.csv", [&](std::ostream& os) { write_scan_csv(os, r); });
    Json cells = Json::array();
    for (const auto& c : r.cells) {
        Json cj{{"axis1", c.x1},
                {"axis2", c.x2},
                {"outcome", std::string(to_string(c.outcome))},
                {"detail", c.detail},
                {"leading_real_part", c.leading_real_part}};
        if (o.overlay_bound) cj["delta_bar"] = c.delta_bar;
        cells.push_back(cj);
    }
    out.json("scan.json", {{"axes", {r.axes[0].parameter, r.axes[1].parameter}},
                           {"provenance",
                            {{"t_end", r.t_end},
                             {"rel_tol", r.rel_tol},
                             {"abs_tol", r.abs_tol},
                             {"refine_tol", r.refine_tol}}},
                           {"cells", cells}});
}

}  // namespace

RunSummary run_experiment(const ExperimentSpec& spec) {
    validate(spec);
    const auto t0 = std::chrono::steady_clock::now();
    const auto dir = spec.output_dir.empty() ? default_output_root() / spec.name : spec.output_dir;
    Outputs out(dir);
    Json info = Json::object();
    try {
        switch (spec.engine) {
            case Engine::Ode: run_ode(spec, out, info); break;
            case Engine::Ssa: run_ssa_engine(spec, out, info); break;
            case Engine::Ibm: run_ibm_engine(spec, out, info); break;
            case Engine::Analytic: run_analytic(spec, out, info); break;
            case Engine::Stability: run_stability(spec, out, info); break;
            case Engine::Hopf: run_hopf(spec, out, info); break;
            case Engine::Lyapunov: run_lyapunov(spec, out, info); break;
            case Engine::FrSurface: run_surface(spec, out, info); break;
            case Engine::Scan: run_scan(spec, out, info); break;
        }
    } catch (const InvalidConfig&) {
        throw;
    } catch (const std::exception& e) {
        throw Error(std::string(to_string(spec.engine)) + " engine failed for '" + spec.name + "': " + e.what());
    }
    RunSummary summary;
    summary.directory = dir;
    summary.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

    Json files = Json::array();
    for (const auto& f : out.files) files.push_back(f.filename().string());
    Json manifest;
    manifest["manifest_version"] = 1;
    manifest["version"] = CRM_VERSION;
    manifest["engine"] = std::string(to_string(spec.engine));
    manifest["seed"] = spec.run.seed;
    manifest["wall_seconds"] = summary.wall_seconds;
    manifest["files"] = files;
    manifest["notes"] = info;
    manifest["spec"] = Json::parse(spec_to_json(spec));
    out.json("manifest.json", manifest);
    summary.files = out.files;
    return summary;
}

}  // namespace crm
