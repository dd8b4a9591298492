#include "crm/scan.hpp"

#include "crm/errors.hpp"
#include "crm/stability.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <numeric>
#include <optional>
#include <thread>

namespace crm {

std::string_view to_string(CellOutcome c) noexcept {
    switch (c) {
        case CellOutcome::StableCoexistence: return "StableCoexistence";
        case CellOutcome::OscillatoryCoexistence: return "OscillatoryCoexistence";
        case CellOutcome::Extinction: return "Extinction";
        case CellOutcome::Undetermined: return "Undetermined";
    }
    return "?";
}

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

bool all_kind(const ModelConfig& c, ResourceKind k) {
    return std::all_of(c.resources.begin(), c.resources.end(),
                       [k](const ResourceLaw& r) { return r.kind == k; });
}

// Closed-form starting point for the refiner, if the scenario has one.
std::optional<FixedPoint> closed_form_guess(const ModelConfig& c) {
    try {
        const bool two_by_one = c.consumers() == 2 && c.resource_count() == 1;
        if (c.scenario == Scenario::ChasingIntra) {
            if (two_by_one) return analytic_intra_2x1(c);
            if (all_kind(c, ResourceKind::Biotic)) return analytic_general_biotic(c);
            if (all_kind(c, ResourceKind::Abiotic)) return analytic_general_abiotic(c);
        }
        if (c.scenario == Scenario::ChasingIntraInter && two_by_one) return analytic_both_2x1(c);
        if (c.scenario == Scenario::ChasingInter && two_by_one) return analytic_inter_2x1(c);
    } catch (const Error&) {
    }
    return std::nullopt;
}

struct Refined {
    std::optional<StabilityReport> interior;
    bool boundary = false;
};

Refined try_refine(const ModelConfig& c, const FixedPoint& guess, const RefineOptions& opts) {
    Refined r;
    try {
        const FixedPoint fp = find_interior_fixed_point(c, guess, opts);
        r.interior = classify(c, fp);
    } catch (const BoundaryFixedPoint&) {
        r.boundary = true;
    } catch (const Error&) {
    }
    return r;
}

}  // namespace

CellResult classify_cell(const ModelConfig& config, const ScanOptions& opts) {
    CellResult cell;
    cell.leading_real_part = kNaN;
    cell.delta_bar = kNaN;
    if (opts.overlay_bound) {
        try {
            cell.delta_bar = coexistence_delta_sup(config).delta_sup;
        } catch (const Error&) {
        }
    }
    try {
        config.validate();
        const std::size_t M = config.consumers(), N = config.resource_count();

        std::optional<FixedPoint> start;
        if (auto guess = closed_form_guess(config)) {
            // A boundary point from the guess says nothing about the interior; the ODE decides.
            const Refined r = try_refine(config, *guess, opts.refine);
            if (r.interior) {
                cell.leading_real_part = r.interior->leading_real_part;
                if (r.interior->classification == Stability::Stable) {
                    cell.outcome = CellOutcome::StableCoexistence;
                    cell.detail = "stable interior fixed point";
                    return cell;
                }
                start = r.interior->fixed_point;
            }
        }

        SystemState init;
        if (start) {
            Vec C = start->C * 1.01;
            init = SystemState::from_totals(C, start->R);
        } else {
            Vec C = opts.initial_C.size() == static_cast<Eigen::Index>(M)
                        ? opts.initial_C
                        : Vec::Constant(static_cast<Eigen::Index>(M), 10.0);
            Vec R(static_cast<Eigen::Index>(N));
            for (std::size_t l = 0; l < N; ++l)
                R(static_cast<Eigen::Index>(l)) =
                    opts.initial_R.size() == static_cast<Eigen::Index>(N)
                        ? opts.initial_R(static_cast<Eigen::Index>(l))
                        : 0.5 * config.resources[l].carrying_capacity;
            init = SystemState::from_totals(C, R);
        }
        IntegratorControls ctl = opts.integrator;
        ctl.sample_times = uniform_samples(0.0, opts.t_end, opts.samples);
        ctl.extinction_threshold = opts.outcome.extinction_threshold;
        const Trajectory traj = integrate(ModelRhs(config), init, opts.t_end, ctl);
        const OutcomeClass oc = classify_outcome(traj, opts.window, opts.outcome);

        if (std::any_of(oc.fates.begin(), oc.fates.end(),
                        [](ConsumerFate f) { return f == ConsumerFate::Extinct; })) {
            cell.outcome = CellOutcome::Extinction;
            cell.detail = "consumer extinct in the ODE run";
            return cell;
        }
        if (!start) {
            // The run may have settled near an interior point the closed form missed.
            const auto end = traj.final_state();
            const FixedPoint guess = make_fixed_point(config, end.consumer_totals(),
                                                      end.resource_totals(),
                                                      FixedPointMethod::NewtonRefined);
            const Refined r = try_refine(config, guess, opts.refine);
            if (r.interior) {
                cell.leading_real_part = r.interior->leading_real_part;
                if (r.interior->classification == Stability::Stable) {
                    cell.outcome = CellOutcome::StableCoexistence;
                    cell.detail = "stable interior fixed point (from ODE endpoint)";
                    return cell;
                }
            } else if (r.boundary) {
                cell.outcome = CellOutcome::Extinction;
                cell.detail = "ODE endpoint refines onto the boundary";
                return cell;
            }
        }
        switch (oc.dynamics) {
            case DynamicsClass::StableFixedPoint:
                cell.outcome = CellOutcome::StableCoexistence;
                cell.detail = "ODE settles";
                break;
            case DynamicsClass::LimitCycle:
            case DynamicsClass::QuasiPeriodic:
                cell.outcome = CellOutcome::OscillatoryCoexistence;
                cell.detail = std::string("ODE ") + std::string(to_string(oc.dynamics));
                break;
            case DynamicsClass::Undetermined:
                cell.outcome = oc.relative_oscillation > opts.outcome.fixed_point_tol
                                   ? CellOutcome::OscillatoryCoexistence
                                   : CellOutcome::Undetermined;
                cell.detail = "ODE oscillates without a clean period";
                break;
        }
    } catch (const std::exception& e) {
        cell.outcome = CellOutcome::Undetermined;
        cell.detail = e.what();
    }
    return cell;
}

ScanResult scan_coexistence(const ModelConfig& base, const std::array<ScanAxis, 2>& axes,
                            const ScanOptions& opts) {
    if (base.scenario != Scenario::ChasingIntra && base.scenario != Scenario::ChasingIntraInter)
        throw InvalidConfig("scan_coexistence: scenario must be ChasingIntra or ChasingIntraInter");
    for (const auto& ax : axes) {
        if (!is_parameter(ax.parameter, base))
            throw InvalidConfig("scan_coexistence: unknown parameter '" + ax.parameter + "'");
        if (ax.points == 0) throw InvalidConfig("scan_coexistence: axis needs at least one point");
    }
    ScanResult out;
    out.axes = axes;
    out.t_end = opts.t_end;
    out.rel_tol = opts.integrator.rel_tol;
    out.abs_tol = opts.integrator.abs_tol;
    out.refine_tol = opts.refine.tolerance;
    const auto v1 = axes[0].values(), v2 = axes[1].values();
    out.cells.resize(v1.size() * v2.size());

    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t idx; (idx = next.fetch_add(1)) < out.cells.size();) {
            const double x1 = v1[idx / v2.size()], x2 = v2[idx % v2.size()];
            CellResult cell;
            try {
                ModelConfig c = base;
                set_parameter(c, axes[0].parameter, x1);
                set_parameter(c, axes[1].parameter, x2);
                cell = classify_cell(c, opts);
            } catch (const std::exception& e) {
                cell.outcome = CellOutcome::Undetermined;
                cell.detail = e.what();
            }
            cell.x1 = x1;
            cell.x2 = x2;
            out.cells[idx] = std::move(cell);
        }
    };
    unsigned n = opts.threads ? opts.threads : std::max(1u, std::thread::hardware_concurrency());
    n = static_cast<unsigned>(std::min<std::size_t>(n, out.cells.size()));
    std::vector<std::thread> pool;
    for (unsigned t = 1; t < n; ++t) pool.emplace_back(worker);
    worker();
    for (auto& t : pool) t.join();
    return out;
}

double coexistence_boundary(const ModelConfig& base, std::string_view parameter, double lo,
                            double hi, const ScanOptions& opts, double rel_tol) {
    auto coexists = [&](double v) {
        ModelConfig c = base;
        set_parameter(c, parameter, v);
        const auto o = classify_cell(c, opts).outcome;
        if (o == CellOutcome::Undetermined)
            throw ConvergenceError("coexistence_boundary: undetermined cell", {v}, kNaN);
        return o != CellOutcome::Extinction;
    };
    if (!coexists(lo)) throw DomainError("coexistence_boundary: no coexistence at lo");
    if (coexists(hi)) throw DomainError("coexistence_boundary: coexistence at hi");
    while (std::abs(hi - lo) > rel_tol * std::max(std::abs(lo), std::abs(hi))) {
        const double mid = 0.5 * (lo + hi);
        (coexists(mid) ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

std::vector<RankEntry> rank_abundance(const Vec& abundances, bool survivors_only,
                                      double threshold) {
    std::vector<std::size_t> idx(static_cast<std::size_t>(abundances.size()));
    std::iota(idx.begin(), idx.end(), 0);
    std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
        return abundances(static_cast<Eigen::Index>(a)) > abundances(static_cast<Eigen::Index>(b));
    });
    std::vector<RankEntry> out;
    for (std::size_t i : idx) {
        const double v = abundances(static_cast<Eigen::Index>(i));
        if (survivors_only && !(v > threshold)) continue;
        out.push_back({out.size() + 1, i, v});
    }
    return out;
}

}  // namespace crm
