// Acceptance criteria for the consumer-resource library. One line per criterion:
//
//   PASS|FAIL  <id>  <title>  [<seconds> s / <limit> s]  <detail>
//
// A criterion passes only if its checks hold and it finishes inside its time limit.
// Usage: crm_acceptance [--only 3,5,...]

#include "crm/errors.hpp"
#include "crm/functional_response.hpp"
#include "crm/ibm.hpp"
#include "crm/ode.hpp"
#include "crm/presets.hpp"
#include "crm/qss.hpp"
#include "crm/scan.hpp"
#include "crm/ssa.hpp"
#include "crm/stability.hpp"
#include "crm/steady_state.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <functional>
#include <iomanip>
#include <iostream>
#include <limits>
#include <numbers>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

using namespace crm;

namespace {

struct Outcome {
    bool pass = false;
    std::string detail;
};

struct Criterion {
    int id;
    std::string title;
    double limit_s;
    std::function<Outcome()> run;
};

std::string fmt(double v, int prec = 3) {
    std::ostringstream os;
    os << std::setprecision(prec) << v;
    return os.str();
}

double max_rel(const Vec& a, const Vec& ref) {
    double m = 0.0;
    for (Eigen::Index i = 0; i < a.size(); ++i)
        m = std::max(m, std::abs(a(i) - ref(i)) / std::abs(ref(i)));
    return m;
}

Vec join(const Vec& C, const Vec& R) {
    Vec v(C.size() + R.size());
    v << C, R;
    return v;
}

IntegratorControls controls_of(const ExperimentSpec& s) {
    IntegratorControls ctl;
    ctl.rel_tol = s.run.rel_tol;
    ctl.abs_tol = s.run.abs_tol;
    ctl.extinction_threshold = s.run.extinction_threshold;
    return ctl;
}

SystemState start_of(const ExperimentSpec& s) {
    if (s.initial_C.size() == 0 || s.initial_R.size() == 0)
        throw Error(s.name + ": preset has no initial condition");
    return SystemState::from_totals(s.initial_C, s.initial_R);
}

// Totals [C, R] at t_end.
Vec ode_endpoint(const ExperimentSpec& s, double t_end) {
    const auto traj = integrate(ModelRhs(s.config), start_of(s), t_end, controls_of(s));
    const auto k = traj.size() - 1;
    return join(traj.consumer_totals(k), traj.resource_totals(k));
}

// ---------------------------------------------------------------------------

Outcome bd_identity() {
    constexpr double tol = 1e-12;
    const auto Rs = logspace(1e-2, 1e4, 601);
    const auto Cs = logspace(1e-2, 1e4, 61);
    double worst = 0.0;
    for (const auto& [a, k] : {std::pair{0.1, 0.1}, {0.5, 0.2}, {0.025, 0.5}, {2.0, 0.01}}) {
        BdRates bd;
        bd.a = a;
        bd.k = k;
        for (double R : Rs)
            for (double C : Cs) {
                const double xi_cp = fr_chasing(R, C, a, 0.0, k, FrOrder::DiluteLimit).Xi;
                const double xi_bd = fr_beddington(R, C, bd).Xi;
                worst = std::max(worst, std::abs(xi_bd - xi_cp) / std::abs(xi_cp));
            }
    }
    return {worst <= tol, "max relative |Xi_BD - Xi_CP4| = " + fmt(worst) + " (tol " + fmt(tol) + ")"};
}

Outcome qss_residuals() {
    constexpr int draws = 10000;
    constexpr double tol = 1e-8;
    constexpr double gap_tol = 1e-6;
    std::mt19937_64 rng(20240601);
    auto logu = [&](double lo, double hi) {
        return std::exp(std::uniform_real_distribution<double>(std::log(lo), std::log(hi))(rng));
    };

    double quad_res = 0.0, cubic_res = 0.0, gen_res = 0.0, gap = 0.0;
    double gap_cf = std::numeric_limits<double>::infinity();  // smallest C^F over tolerance
    int infeasible = 0, failures = 0;
    for (int n = 0; n < draws; ++n) {
        const double R = logu(1e-2, 1e3), C = logu(1e-2, 1e3), K = logu(1e-2, 1e3);
        const double beta = logu(1e-4, 1e2);
        try {
            // x^2 - (R+C+K) x + RC = 0, 0 <= x <= min(R, C)
            const double q = qss_chasing_quadratic(R, C, K);
            quad_res = std::max(quad_res, std::abs(q * q - (R + C + K) * q + R * C) / std::max(1.0, R * C));
            if (!(q >= 0.0 && q <= std::min(R, C))) ++infeasible;

            // Balance on the consumer: C = C^F + x + 2 beta C^F^2, C^F = K x / (R - x).
            const double x = qss_intra_cubic(R, C, K, beta);
            const double cf = K * x / (R - x);
            cubic_res = std::max(cubic_res, std::abs(cf + x + 2.0 * beta * cf * cf - C) / std::max(1.0, C));
            if (!(x >= 0.0 && x < R && cf >= 0.0 && cf <= C)) ++infeasible;

            const double x0 = qss_intra_cubic(R, C, K, 1e-8);
            const double g = std::abs(x0 - q) / q;
            gap = std::max(gap, g);
            if (g >= gap_tol) gap_cf = std::min(gap_cf, K * q / (R - q));
        } catch (const Error&) {
            ++failures;
        }

        // Full fast equilibrium, two consumers on one resource with both interference types.
        auto cfg = ModelConfig::zeros(Scenario::ChasingIntraInter, 2, 1);
        for (int i = 0; i < 2; ++i) {
            cfg.a(i, 0) = logu(1e-2, 1.0);
            cfg.d(i, 0) = logu(1e-2, 1.0);
            cfg.k(i, 0) = logu(1e-2, 1.0);
            cfg.w(i, 0) = 0.1;
            cfg.D(i) = 0.01;
            cfg.a_intra(i) = logu(1e-2, 1.0);
            cfg.d_intra(i) = logu(1e-2, 1.0);
        }
        cfg.a_inter(0, 1) = cfg.a_inter(1, 0) = logu(1e-2, 1.0);
        cfg.d_inter(0, 1) = cfg.d_inter(1, 0) = logu(1e-2, 1.0);
        cfg.resources[0] = {ResourceKind::Biotic, 0.1, 100.0};
        Vec Ct(2), Rt(1);
        Ct << logu(1e-2, 1e3), logu(1e-2, 1e3);
        Rt << logu(1e-2, 1e3);
        try {
            const auto s = qss_generic_numeric(Ct, Rt, cfg);
            double res = 0.0;
            for (int i = 0; i < 2; ++i) {
                const int j = 1 - i;
                const double scale = std::max({1.0, Ct(i), Rt(0)});
                const double Kil = (cfg.d(i, 0) + cfg.k(i, 0)) / cfg.a(i, 0);
                const double b = cfg.a_intra(i) / cfg.d_intra(i);
                const double g = cfg.a_inter(i, j) / cfg.d_inter(i, j);
                res = std::max(res, std::abs(Kil * s.x(i, 0) - s.c_free(i) * s.r_free(0)) / (scale * scale));
                res = std::max(res, std::abs(s.y(i) - b * s.c_free(i) * s.c_free(i)) / (scale * scale));
                res = std::max(res, std::abs(s.z(i, j) - g * s.c_free(i) * s.c_free(j)) /
                                        std::max({1.0, Ct(0) * Ct(1)}));
                res = std::max(res, std::abs(s.c_free(i) + s.x(i, 0) + 2.0 * s.y(i) + s.z(i, j) - Ct(i)) /
                                        std::max(1.0, Ct(i)));
                if (!(s.c_free(i) >= 0.0 && s.x(i, 0) >= 0.0 && s.y(i) >= 0.0 && s.z(i, j) >= 0.0))
                    ++infeasible;
            }
            res = std::max(res, std::abs(s.r_free(0) + s.x(0, 0) + s.x(1, 0) - Rt(0)) / std::max(1.0, Rt(0)));
            if (!(s.r_free(0) >= 0.0)) ++infeasible;
            gen_res = std::max(gen_res, res);
        } catch (const Error&) {
            ++failures;
        }
    }
    const bool ok = failures == 0 && infeasible == 0 && quad_res < tol && cubic_res < tol &&
                    gen_res < tol && gap < gap_tol;
    return {ok, std::to_string(draws) + " draws: residual quadratic " + fmt(quad_res) + ", cubic " +
                    fmt(cubic_res) + ", generic " + fmt(gen_res) + " (tol " + fmt(tol) +
                    "); infeasible " + std::to_string(infeasible) + ", solver errors " +
                    std::to_string(failures) + "; cubic-quadratic gap at beta=1e-8 " + fmt(gap) +
                    " (tol " + fmt(gap_tol) + (gap < gap_tol ? ")" : ", exceeded from C^F = " + fmt(gap_cf) + ")")};
}

Outcome exclusion() {
    constexpr double threshold = 1e-3;
    const auto s = make_preset("figS5c");
    const Vec end = ode_endpoint(s, 1e5);
    const Vec C = end.head(2);
    const int persist = (C.array() >= threshold).count();
    return {persist == 1, "C(1e5) = (" + fmt(C(0)) + ", " + fmt(C(1)) + "), survivors " +
                              std::to_string(persist) + " (want exactly 1, threshold " + fmt(threshold) + ")"};
}

Outcome fig1e_stable() {
    constexpr double tol = 0.10;
    const auto s = make_preset("fig1e");
    const auto closed = analytic_intra_2x1(s.config);
    const auto fp = find_interior_fixed_point(s.config, closed);
    const auto rep = classify(s.config, fp);
    const Vec ode = ode_endpoint(s, 1e5);
    const double err = max_rel(join(closed.C, closed.R), ode);
    const bool ok = rep.classification == Stability::Stable && err <= tol;
    return {ok, "interior point " + std::string(to_string(rep.classification)) + " (max Re " +
                    fmt(rep.leading_real_part) + "); closed form vs ODE endpoint " + fmt(err) +
                    " (tol " + fmt(tol) + "); Newton-refined vs ODE endpoint " +
                    fmt(max_rel(join(fp.C, fp.R), ode)) + ", regime ratio " + fmt(closed.regime_ratio)};
}

Outcome hopf() {
    constexpr double shift_tol = 1e-4;
    constexpr double r2_min = 0.98;
    constexpr std::size_t min_points = 6;
    const auto s = make_preset("figS9e");
    const auto& h = *s.hopf;
    HopfOptions base;
    base.resolution = h.resolution;
    base.amplitude_points = h.points;
    base.amplitude_span = h.span;
    base.settle_time = h.settle_time;
    base.integrator = controls_of(s);
    HopfOptions tight = base;
    tight.bisection_rel_tol = 1e-9;
    tight.refine.tolerance = 1e-11;
    tight.integrator.rel_tol = 1e-10;
    tight.integrator.abs_tol = 1e-12;
    const auto a = hopf_scan(s.config, {h.lo, h.hi}, base);
    const auto b = hopf_scan(s.config, {h.lo, h.hi}, tight);
    const double shift = std::abs(a.d_prime_critical - b.d_prime_critical);
    const bool ok = shift < shift_tol && a.fit_r2 >= r2_min && a.amplitude_samples.size() >= min_points;
    return {ok, "d'_c = " + fmt(a.d_prime_critical, 8) + ", tightened " + fmt(b.d_prime_critical, 8) +
                    ", shift " + fmt(shift) + " (tol " + fmt(shift_tol) + "); amplitude^2 fit r2 " +
                    fmt(a.fit_r2, 5) + " over " + std::to_string(a.amplitude_samples.size()) +
                    " points (min " + fmt(r2_min) + ", " + std::to_string(min_points) + ")"};
}

Outcome fig3a_matrix() {
    constexpr double tol = 0.10;
    constexpr double threshold = 1e-3;
    const auto s = make_preset("fig3a");
    const auto m = analytic_general_biotic(s.config);
    const bool positive = m.C.minCoeff() > 0.0 && m.R.minCoeff() > 0.0;
    const Vec ode = ode_endpoint(s, 1e5);
    const auto M = static_cast<Eigen::Index>(s.config.consumers());
    const int persist = (ode.head(M).array() > threshold).count();
    const double err = max_rel(join(m.C, m.R), ode);
    const bool ok = positive && err <= tol && persist == M;
    std::string refined;
    try {
        const auto fp = find_interior_fixed_point(s.config, m);
        refined = "; Newton-refined vs ODE endpoint " + fmt(max_rel(join(fp.C, fp.R), ode));
    } catch (const Error& e) {
        refined = std::string("; no refined interior point (") + e.what() + ")";
    }
    return {ok, std::string("matrix solution ") + (positive ? "positive" : "not positive") +
                    "; vs ODE endpoint " + fmt(err) + " (tol " + fmt(tol) + "); persisting " +
                    std::to_string(persist) + "/" + std::to_string(M) + refined + ", regime ratio " +
                    fmt(m.regime_ratio)};
}

Outcome s6_unstable() {
    constexpr double tol = 0.05;
    constexpr std::size_t seeds = 50;
    constexpr double need = 0.95;
    bool ok = true;
    std::string detail;
    for (const char* name : {"figS6a", "figS6b", "figS6c", "figS6d"}) {
        const auto s = make_preset(name);
        const auto closed = analytic_inter_2x1(s.config);
        std::string part = std::string(name) + ": ";
        try {
            const auto fp = find_interior_fixed_point(s.config, closed);
            const auto rep = classify(s.config, fp);
            const double err = max_rel(join(closed.C, closed.R), join(fp.C, fp.R));
            ok = ok && err <= tol && rep.leading_real_part > 0.0;
            part += "closed form " + fmt(err) + " (regime ratio " + fmt(closed.regime_ratio) + "), max Re " +
                    fmt(rep.leading_real_part);
        } catch (const Error& e) {
            ok = false;
            part += std::string("no interior point (") + e.what() + ")";
        }
        detail += part + "; ";
    }

    const auto s = make_preset("fig2c");
    const auto net = build_reactions(s.config);
    SsaOptions o;
    o.stop_on_extinction = true;
    const auto runs = run_ensemble(net, net.from_totals(s.initial_C, s.initial_R), 1e5, s.run.seed, seeds, o);
    const auto lost = std::count_if(runs.begin(), runs.end(), [](const SsaRun& r) { return r.lost_consumer(); });
    const double frac = double(lost) / double(seeds);
    ok = ok && frac >= need;
    detail += "fig2c SSA lost a consumer in " + std::to_string(lost) + "/" + std::to_string(seeds) +
              " seeds (need " + fmt(need) + "); closed-form tol " + fmt(tol);
    return {ok, detail};
}

Outcome fig2kl_ssa() {
    constexpr std::size_t seeds = 50;
    constexpr double need = 0.95;
    constexpr double n_se = 3.0;
    constexpr std::size_t checkpoints = 20;
    const double t_end = 1e5;
    const auto s = make_preset("fig2kl");
    std::vector<double> times;
    for (std::size_t k = 1; k <= checkpoints; ++k) times.push_back(t_end * double(k) / checkpoints);

    const auto net = build_reactions(s.config);
    SsaOptions o;
    o.sample_times = times;
    const auto runs = run_ensemble(net, net.from_totals(s.initial_C, s.initial_R), t_end, s.run.seed, seeds, o);
    const auto both = std::count_if(runs.begin(), runs.end(), [&](const SsaRun& r) {
        return net.consumer_total(r.final_state, 0) > 0 && net.consumer_total(r.final_state, 1) > 0;
    });
    const auto sum = summarize(net, runs);

    auto ctl = controls_of(s);
    ctl.sample_times = times;
    const auto traj = integrate(ModelRhs(s.config), start_of(s), t_end, ctl);
    std::size_t inside = 0, total = 0;
    double worst = 0.0;
    for (std::size_t k = 0; k < checkpoints; ++k) {
        const Vec ode = join(traj.consumer_totals(k), traj.resource_totals(k));
        for (Eigen::Index c = 0; c < ode.size(); ++c) {
            const double se = std::sqrt(sum.variance(Eigen::Index(k), c) / double(seeds));
            const double z = std::abs(sum.mean(Eigen::Index(k), c) - ode(c)) / se;
            worst = std::max(worst, z);
            inside += z <= n_se;
            ++total;
        }
    }
    const double frac = double(both) / double(seeds);
    const bool ok = frac >= need && inside == total;
    return {ok, "both persist in " + std::to_string(both) + "/" + std::to_string(seeds) + " seeds (need " +
                    fmt(need) + "); ensemble mean within " + fmt(n_se) + " SE of the ODE at " +
                    std::to_string(inside) + "/" + std::to_string(total) + " (checkpoint, species) entries, worst " +
                    fmt(worst) + " SE"};
}

Outcome ibm_rate() {
    constexpr double tol = 0.10;
    constexpr double z95 = 1.96;
    IbmParams p;
    p.v_c = {1.0, 1.0};
    p.v_r = 1.0;
    p.r_chase = {5.0, 5.0};
    p.resource = {ResourceKind::Biotic, 0.5, 200.0};
    p.choose_dt();
    p.L = 120;
    const auto e1 = estimate_encounter_rate(p, 0, 50, 100, 2000.0, 11);
    p.L = 240;
    const auto e2 = estimate_encounter_rate(p, 0, 50, 100, 8000.0, 12);
    const double theory = 2.0 * 5.0 * std::sqrt(2.0) * 1.0 / (120.0 * 120.0);
    const double err = std::abs(e1.rate - theory) / theory;
    const double ratio = e1.rate / e2.rate;
    const double ratio_se =
        ratio * std::hypot(e1.std_error / e1.rate, e2.std_error / e2.rate);
    const bool quarter = std::abs(ratio - 4.0) <= z95 * ratio_se;
    const bool ok = err <= tol && quarter;
    return {ok, "L=120 rate " + fmt(e1.rate, 4) + " +- " + fmt(e1.std_error, 2) + " vs 2r sqrt2 v/L^2 = " +
                    fmt(theory, 4) + " (rel err " + fmt(err) + ", tol " + fmt(tol) + "); L=120/L=240 ratio " +
                    fmt(ratio, 4) + " +- " + fmt(ratio_se, 2) + " (want 4 within 95% CI)"};
}

Outcome delta_bound() {
    constexpr double tol = 0.15;
    bool ok = true;
    std::string detail;
    for (const char* name : {"figS8e", "figS8f"}) {
        const auto s = make_preset(name);
        ScanOptions o;
        o.t_end = s.run.t_end;
        o.samples = s.run.samples;
        o.window = s.run.window;
        o.integrator = controls_of(s);
        o.outcome.extinction_threshold = s.run.extinction_threshold;
        o.initial_C = s.initial_C;
        o.initial_R = s.initial_R;
        detail += std::string(name) + ":";
        for (double dp : s.scan->axes[1].values()) {
            ModelConfig c = s.config;
            set_parameter(c, "d_intra", dp);
            set_parameter(c, "delta", 0.0);
            const double bar = coexistence_delta_sup(c).delta_sup;
            std::string cell = " d'=" + fmt(dp) + " bound " + fmt(bar, 4);
            try {
                const double scan = coexistence_boundary(c, "delta", 0.1 * bar, 3.0 * bar, o, 1e-3);
                const double err = std::abs(bar - scan) / scan;
                ok = ok && err <= tol;
                cell += " scan " + fmt(scan, 4) + " (" + fmt(err) + ")";
            } catch (const Error& e) {
                ok = false;
                cell += std::string(" scan failed: ") + e.what();
            }
            detail += cell + ";";
        }
        detail += " ";
    }
    return {ok, detail + "tol " + fmt(tol)};
}

struct Attractor {
    double lambda1 = 0.0;
    SectionShape shape;
};

Attractor attractor(const ExperimentSpec& s) {
    const auto& l = *s.lyapunov;
    LyapunovOptions lo;
    lo.transient = l.transient;
    lo.integrator = controls_of(s);
    const auto spec = lyapunov_spectrum(s.config, start_of(s), l.t_total, l.renorm_dt, lo);

    const ModelRhs rhs(s.config);
    auto ctl = controls_of(s);
    SystemState start = integrate(rhs, start_of(s), l.transient, ctl).final_state();
    start.t = 0.0;
    ctl.sample_times = uniform_samples(0.0, l.section_time, static_cast<std::size_t>(l.section_time) + 1);
    const auto traj = integrate(rhs, start, l.section_time, ctl);
    const auto path = totals_path(traj);
    double mean = 0.0;
    for (const auto& p : path) mean += p(0);
    mean /= double(path.size());
    const auto cross = poincare_section(traj.times, path, {0, mean, CrossingDirection::Increasing});
    return {spec.exponents.front(), section_shape(cross, path, 1, path.front().size() - 1)};
}

Outcome cycle_and_torus() {
    constexpr double lambda_tol = 0.01;
    constexpr double point_frac = 0.01;  // section diameter / orbit size
    constexpr double loop_frac = 0.05;
    const double loop_gap = std::numbers::pi / 4.0;
    constexpr std::size_t loop_count = 20;

    const auto cyc = attractor(make_preset("figS7g"));
    const auto tor = attractor(make_preset("figS7i"));
    const double pc = cyc.shape.diameter / cyc.shape.orbit_size;
    const double pt = tor.shape.diameter / tor.shape.orbit_size;
    const bool cycle_ok = std::abs(cyc.lambda1) < lambda_tol && pc < point_frac;
    const bool torus_ok = pt > loop_frac && tor.shape.max_angular_gap < loop_gap && tor.shape.count >= loop_count;
    return {cycle_ok && torus_ok,
            "S7e/g lambda1 " + fmt(cyc.lambda1) + " (|.| < " + fmt(lambda_tol) + "), section diameter/orbit " +
                fmt(pc) + " (< " + fmt(point_frac) + "); S7f/h section diameter/orbit " + fmt(pt) + " (> " +
                fmt(loop_frac) + "), max angular gap " + fmt(tor.shape.max_angular_gap) + " rad (< " +
                fmt(loop_gap) + "), " + std::to_string(tor.shape.count) + " crossings"};
}

Outcome both_types() {
    constexpr double tol = 0.10;
    constexpr double reduce_tol = 1e-9;
    bool ok = true;
    std::string detail;
    for (const char* name : {"figS11a", "figS11b"}) {
        const auto s = make_preset(name);
        const auto closed = analytic_both_2x1(s.config);
        const Vec ode = ode_endpoint(s, 1e5);
        const double err = max_rel(join(closed.C, closed.R), ode);

        ModelConfig weak = s.config;
        weak.a_inter *= 1e-14 / s.config.a_inter(0, 1);
        ModelConfig intra = s.config;
        intra.scenario = Scenario::ChasingIntra;
        intra.a_inter.setZero();
        intra.d_inter.setZero();
        const auto b = analytic_both_2x1(weak);
        const auto a = analytic_intra_2x1(intra);
        const double red = max_rel(join(b.C, b.R), join(a.C, a.R));

        ok = ok && err <= tol && red <= reduce_tol;
        detail += std::string(name) + ": closed form vs ODE endpoint " + fmt(err) + ", gamma->0 vs intra " +
                  fmt(red) + "; ";
    }
    return {ok, detail + "tol " + fmt(tol) + ", reduction tol " + fmt(reduce_tol)};
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Acceptance criteria"};
    std::vector<int> only;
    app.add_option("--only", only, "Run only these criteria")->delimiter(',');
    CLI11_PARSE(app, argc, argv);

    const std::vector<Criterion> all{
        {1, "Beddington-DeAngelis identity at d = 0", 1.0, bd_identity},
        {2, "Fast-equilibrium residuals and feasibility", 10.0, qss_residuals},
        {3, "Competitive exclusion with chasing pairs only (S5c)", 5.0, exclusion},
        {4, "Stable coexistence, closed form vs ODE (1e/h)", 10.0, fig1e_stable},
        {5, "Hopf bifurcation in d' (S9e)", 120.0, hopf},
        {6, "M = 5, N = 3 matrix solution vs ODE (3a)", 60.0, fig3a_matrix},
        {7, "Unstable interior point and SSA exclusion (S6, 2c)", 600.0, s6_unstable},
        {8, "SSA coexistence and ensemble mean vs ODE (2k-l)", 600.0, fig2kl_ssa},
        {9, "Lattice encounter rate vs mean field", 300.0, ibm_rate},
        {10, "Maximum tolerated Delta, bound vs scan (S8e/f)", 600.0, delta_bound},
        {11, "Limit cycle and torus: Lyapunov and sections (S7e-h)", 300.0, cycle_and_torus},
        {12, "Both interference types, closed form vs ODE (S11a/b)", 60.0, both_types},
    };
    const std::set<int> chosen(only.begin(), only.end());

    int failed = 0;
    for (const auto& c : all) {
        if (!chosen.empty() && !chosen.count(c.id)) continue;
        const auto t0 = std::chrono::steady_clock::now();
        Outcome r;
        try {
            r = c.run();
        } catch (const std::exception& e) {
            r = {false, std::string("error: ") + e.what()};
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        const bool in_time = secs <= c.limit_s;
        const bool pass = r.pass && in_time;
        failed += !pass;
        std::cout << (pass ? "PASS" : "FAIL") << "  " << std::setw(2) << c.id << "  " << c.title << "  ["
                  << std::fixed << std::setprecision(1) << secs << " s / " << c.limit_s << " s"
                  << (in_time ? "" : ", over time") << "]  " << std::defaultfloat << r.detail << std::endl;
    }
    return failed == 0 ? 0 : 1;
}
