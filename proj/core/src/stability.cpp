#include "crm/stability.hpp"

#include "crm/errors.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace crm {

std::string_view to_string(Stability s) noexcept {
    switch (s) {
        case Stability::Stable: return "Stable";
        case Stability::Unstable: return "Unstable";
        case Stability::Marginal: return "Marginal";
    }
    return "?";
}

Mat jacobian_fd(const OdeSystem& sys, const Vec& u, double t) {
    const auto n = static_cast<Eigen::Index>(sys.dim);
    Mat J(n, n);
    Vec up = u, um = u, fp(n), fm(n);
    for (Eigen::Index j = 0; j < n; ++j) {
        const double h = std::max(1e-6, 1e-6 * std::abs(u(j)));
        up(j) = u(j) + h;
        um(j) = u(j) - h;
        sys.f(t, up.data(), fp.data());
        sys.f(t, um.data(), fm.data());
        J.col(j) = (fp - fm) / (2.0 * h);
        up(j) = um(j) = u(j);
    }
    return J;
}

Mat jacobian_at(const ModelConfig& config, const FixedPoint& point) {
    ModelRhs rhs(config);
    return jacobian_fd(rhs.system(), rhs.layout().pack(point.components), point.components.t);
}

std::vector<std::complex<double>> eigenvalues_of(const Mat& J) {
    Eigen::EigenSolver<Mat> es(J, false);
    if (es.info() != Eigen::Success) throw Error("eigenvalue solver failed");
    std::vector<std::complex<double>> ev(es.eigenvalues().data(),
                                         es.eigenvalues().data() + es.eigenvalues().size());
    std::sort(ev.begin(), ev.end(), [](auto a, auto b) {
        return a.real() != b.real() ? a.real() > b.real() : a.imag() > b.imag();
    });
    return ev;
}

Stability classify_eigenvalues(const std::vector<std::complex<double>>& ev, double tol) {
    if (ev.empty()) return Stability::Stable;
    const double lead = ev.front().real();
    if (std::abs(lead) <= tol) return Stability::Marginal;
    return lead < 0.0 ? Stability::Stable : Stability::Unstable;
}

StabilityReport classify(const ModelConfig& config, const FixedPoint& point, double tol) {
    StabilityReport rep;
    rep.fixed_point = point;
    rep.eigenvalues = eigenvalues_of(jacobian_at(config, point));
    rep.classification = classify_eigenvalues(rep.eigenvalues, tol);
    rep.leading_real_part = rep.eigenvalues.empty() ? 0.0 : rep.eigenvalues.front().real();
    return rep;
}

namespace {

ModelConfig with_d_prime(ModelConfig c, double dp) {
    c.d_intra.setConstant(dp);
    return c;
}

// Least squares y = s x + b.
void linear_fit(const std::vector<double>& x, const std::vector<double>& y, double& slope,
                double& intercept, double& r2) {
    const double n = static_cast<double>(x.size());
    double mx = 0, my = 0;
    for (std::size_t i = 0; i < x.size(); ++i) mx += x[i], my += y[i];
    mx /= n;
    my /= n;
    double sxx = 0, sxy = 0, syy = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxx += (x[i] - mx) * (x[i] - mx);
        sxy += (x[i] - mx) * (y[i] - my);
        syy += (y[i] - my) * (y[i] - my);
    }
    slope = sxy / sxx;
    intercept = my - slope * mx;
    r2 = syy > 0 ? sxy * sxy / (sxx * syy) : 1.0;
}

}  // namespace

StabilityReport intra_point_at(const ModelConfig& config, double d_prime, const FixedPoint* seed,
                               const RefineOptions& refine) {
    const ModelConfig c = with_d_prime(config, d_prime);
    FixedPoint guess;
    if (seed) {
        guess = *seed;
        guess.components = SystemState{};  // force a Newton pass at the new d'
    } else {
        try {
            guess = c.resource_count() == 1 && c.consumers() == 2
                        ? analytic_intra_2x1(c)
                        : (c.resources[0].kind == ResourceKind::Biotic
                               ? analytic_general_biotic(c)
                               : analytic_general_abiotic(c));
        } catch (const InfeasibleRegime&) {
            guess.C = Vec::Constant(static_cast<Eigen::Index>(c.consumers()), 1.0);
            guess.R = Vec(static_cast<Eigen::Index>(c.resource_count()));
            for (std::size_t l = 0; l < c.resource_count(); ++l)
                guess.R(static_cast<Eigen::Index>(l)) = c.resources[l].carrying_capacity / 2.0;
        }
    }
    return classify(c, refine_fixed_point(c, guess, refine));
}

HopfResult hopf_scan(const ModelConfig& config, std::pair<double, double> range,
                     const HopfOptions& opts) {
    if (config.scenario != Scenario::ChasingIntra || config.consumers() != 2 ||
        config.resource_count() != 1)
        throw DomainError("hopf_scan: needs ChasingIntra with M = 2, N = 1");
    if (!(range.first > 0.0) || !(range.second > range.first) || opts.resolution < 2)
        throw DomainError("hopf_scan: bad d' range");

    // Bracket on a log grid, reusing the previous refined point as the seed.
    const double l0 = std::log(range.first), l1 = std::log(range.second);
    double prev_d = 0.0, prev_lead = 0.0;
    FixedPoint prev_fp;
    bool have_prev = false, found = false;
    double lo = 0, hi = 0, lead_lo = 0;
    FixedPoint fp_lo;
    for (int g = 0; g < opts.resolution; ++g) {
        const double dp = std::exp(l0 + (l1 - l0) * g / (opts.resolution - 1));
        const auto rep = intra_point_at(config, dp, have_prev ? &prev_fp : nullptr, opts.refine);
        if (have_prev && (rep.leading_real_part > 0.0) != (prev_lead > 0.0)) {
            lo = prev_d;
            hi = dp;
            lead_lo = prev_lead;
            fp_lo = prev_fp;
            found = true;
            break;
        }
        prev_d = dp;
        prev_lead = rep.leading_real_part;
        prev_fp = rep.fixed_point;
        have_prev = true;
    }
    if (!found) throw NoCrossing("hopf_scan: leading real part keeps its sign over the range");

    HopfResult out;
    out.oscillatory_above = lead_lo < 0.0;
    while ((hi - lo) > opts.bisection_rel_tol * hi) {
        const double mid = 0.5 * (lo + hi);
        const auto rep = intra_point_at(config, mid, &fp_lo, opts.refine);
        if ((rep.leading_real_part > 0.0) == (lead_lo > 0.0)) {
            lo = mid;
            fp_lo = rep.fixed_point;
        } else {
            hi = mid;
        }
    }
    const double dc = 0.5 * (lo + hi);
    out.d_prime_critical = dc;

    // Amplitudes from the far end of the span inward, each run seeded by the last
    // attractor state.
    std::vector<double> xs, ys;
    SystemState state;
    bool have_state = false;
    for (int p = opts.amplitude_points; p >= 1; --p) {
        const double f = opts.amplitude_span * p / opts.amplitude_points;
        const double dp = out.oscillatory_above ? dc * (1.0 + f) : dc * (1.0 - f);
        const ModelConfig c = with_d_prime(config, dp);
        if (!have_state) {
            const auto rep = intra_point_at(config, dp, &fp_lo, opts.refine);
            state = rep.fixed_point.components;
            // kick off the unstable focus
            state.c_free *= 1.01;
        }
        state.t = 0.0;
        IntegratorControls ctl = opts.integrator;
        const double T = opts.settle_time;
        ctl.sample_times = uniform_samples(0.8 * T, T, 20001);
        const auto traj = integrate(ModelRhs(c), state, T, ctl);
        double mn = std::numeric_limits<double>::infinity(), mx = -mn;
        for (std::size_t s = 0; s < traj.size(); ++s) {
            const double v = traj.consumer_totals(s)(static_cast<Eigen::Index>(opts.amplitude_consumer));
            mn = std::min(mn, v);
            mx = std::max(mx, v);
        }
        const double amp = 0.5 * (mx - mn);
        out.amplitude_samples.emplace_back(dp, amp);
        xs.push_back(std::abs(dp - dc));
        ys.push_back(amp * amp);
        state = traj.final_state();
        have_state = true;
    }
    std::reverse(out.amplitude_samples.begin(), out.amplitude_samples.end());
    linear_fit(xs, ys, out.fit_slope, out.fit_intercept, out.fit_r2);
    return out;
}

LyapunovSpectrum lyapunov_spectrum(const OdeSystem& sys, const Vec& initial, double t_total,
                                   double renorm_dt, const LyapunovOptions& opts) {
    const auto n = static_cast<Eigen::Index>(sys.dim);
    if (!(renorm_dt > 0.0) || !(t_total > renorm_dt))
        throw DomainError("lyapunov_spectrum: need t_total > renorm_dt > 0");

    IntegratorControls ctl = opts.integrator;
    ctl.sample_times.clear();
    ctl.record_every_step = false;
    ctl.stop_at_steady_state = false;
    ctl.on_step = nullptr;

    Vec u = initial;
    if (opts.transient > 0.0) {
        IntegratorControls c0 = ctl;
        u = integrate(sys, u, 0.0, opts.transient, c0).end_state;
    }

    // Augmented state [u | V column-major]; dV/dt = J(u) V by directional differences.
    OdeSystem aug;
    aug.dim = static_cast<std::size_t>(n * (n + 1));
    aug.f = [&sys, n](double t, const double* y, double* dy) {
        sys.f(t, y, dy);
        Eigen::Map<const Vec> base(y, n);
        Vec up(n), um(n), fp(n), fm(n);
        const double scale = 1e-7 * (1.0 + base.cwiseAbs().maxCoeff());
        for (Eigen::Index j = 0; j < n; ++j) {
            Eigen::Map<const Vec> v(y + n * (j + 1), n);
            const double vn = v.norm();
            if (vn == 0.0) {
                Eigen::Map<Vec>(dy + n * (j + 1), n).setZero();
                continue;
            }
            const double eps = scale / vn;
            up = base + eps * v;
            um = base - eps * v;
            sys.f(t, up.data(), fp.data());
            sys.f(t, um.data(), fm.data());
            Eigen::Map<Vec>(dy + n * (j + 1), n) = (fp - fm) / (2.0 * eps);
        }
    };
    ctl.clip_negative = false;

    Vec y(n * (n + 1));
    y.head(n) = u;
    Eigen::Map<Mat>(y.data() + n, n, n).setIdentity();
    Vec sums = Vec::Zero(n);
    double t = 0.0;
    const auto steps = static_cast<long>(std::floor(t_total / renorm_dt));
    for (long s = 0; s < steps; ++s) {
        y = integrate(aug, y, t, t + renorm_dt, ctl).end_state;
        t += renorm_dt;
        Eigen::Map<Mat> V(y.data() + n, n, n);
        Eigen::HouseholderQR<Mat> qr(V);
        const Mat Rm = qr.matrixQR().triangularView<Eigen::Upper>();
        Mat Q = qr.householderQ() * Mat::Identity(n, n);
        for (Eigen::Index j = 0; j < n; ++j) {
            const double r = Rm(j, j);
            if (!(std::abs(r) > 0.0) || !std::isfinite(r))
                throw Error("lyapunov_spectrum: tangent frame degenerated");
            sums(j) += std::log(std::abs(r));
            if (r < 0.0) Q.col(j) = -Q.col(j);
        }
        V = Q;
        // keep the base point physical
        for (Eigen::Index j = 0; j < n; ++j) y(j) = std::max(0.0, y(j));
    }
    LyapunovSpectrum out;
    out.integration_time = t;
    out.renorm_interval = renorm_dt;
    out.exponents.resize(static_cast<std::size_t>(n));
    for (Eigen::Index j = 0; j < n; ++j) out.exponents[static_cast<std::size_t>(j)] = sums(j) / t;
    std::sort(out.exponents.begin(), out.exponents.end(), std::greater<>());
    return out;
}

LyapunovSpectrum lyapunov_spectrum(const ModelConfig& config, const SystemState& initial,
                                   double t_total, double renorm_dt, const LyapunovOptions& opts) {
    ModelRhs rhs(config);
    return lyapunov_spectrum(rhs.system(), rhs.layout().pack(initial), t_total, renorm_dt, opts);
}

std::vector<Vec> poincare_section(const std::vector<double>& times, const std::vector<Vec>& path,
                                  const SectionPlane& plane) {
    std::vector<Vec> out;
    const auto c = static_cast<Eigen::Index>(plane.component);
    for (std::size_t k = 1; k < path.size() && k < times.size(); ++k) {
        const double a = path[k - 1](c) - plane.value, b = path[k](c) - plane.value;
        const bool up = a < 0.0 && b >= 0.0;
        const bool down = a > 0.0 && b <= 0.0;
        const bool take = (plane.direction == CrossingDirection::Increasing && up) ||
                          (plane.direction == CrossingDirection::Decreasing && down) ||
                          (plane.direction == CrossingDirection::Both && (up || down));
        if (!take) continue;
        const double s = a / (a - b);
        out.push_back(path[k - 1] + s * (path[k] - path[k - 1]));
    }
    if (out.empty()) throw NoCrossing("poincare_section: path never crosses the plane");
    return out;
}

std::vector<Vec> totals_path(const Trajectory& traj) {
    std::vector<Vec> out;
    out.reserve(traj.size());
    const auto M = static_cast<Eigen::Index>(traj.layout.M());
    const auto N = static_cast<Eigen::Index>(traj.layout.N());
    for (std::size_t k = 0; k < traj.size(); ++k) {
        Vec v(M + N);
        v << traj.consumer_totals(k), traj.resource_totals(k);
        out.push_back(std::move(v));
    }
    return out;
}

std::vector<Vec> poincare_section(const Trajectory& traj, const SectionPlane& plane) {
    return poincare_section(traj.times, totals_path(traj), plane);
}

SectionShape section_shape(const std::vector<Vec>& crossings, const std::vector<Vec>& path,
                           std::size_t u, std::size_t v) {
    SectionShape sh;
    sh.count = crossings.size();
    const auto iu = static_cast<Eigen::Index>(u), iv = static_cast<Eigen::Index>(v);
    auto diameter = [&](const std::vector<Vec>& pts) {
        double lo_u = std::numeric_limits<double>::infinity(), hi_u = -lo_u;
        double lo_v = lo_u, hi_v = hi_u;
        for (const auto& p : pts) {
            lo_u = std::min(lo_u, p(iu));
            hi_u = std::max(hi_u, p(iu));
            lo_v = std::min(lo_v, p(iv));
            hi_v = std::max(hi_v, p(iv));
        }
        return std::hypot(hi_u - lo_u, hi_v - lo_v);
    };
    sh.diameter = diameter(crossings);
    sh.orbit_size = diameter(path);
    if (crossings.size() < 3) {
        sh.max_angular_gap = 2.0 * std::numbers::pi;
        return sh;
    }
    double cu = 0, cv = 0;
    for (const auto& p : crossings) cu += p(iu), cv += p(iv);
    cu /= static_cast<double>(crossings.size());
    cv /= static_cast<double>(crossings.size());
    // Normalise each axis by its spread so the angle is not dominated by scale.
    double su = 0, sv = 0;
    for (const auto& p : crossings) {
        su = std::max(su, std::abs(p(iu) - cu));
        sv = std::max(sv, std::abs(p(iv) - cv));
    }
    su = su > 0 ? su : 1.0;
    sv = sv > 0 ? sv : 1.0;
    std::vector<double> ang, rad;
    for (const auto& p : crossings) {
        const double du = (p(iu) - cu) / su, dv = (p(iv) - cv) / sv;
        ang.push_back(std::atan2(dv, du));
        rad.push_back(std::hypot(du, dv));
    }
    std::sort(ang.begin(), ang.end());
    double gap = ang.front() + 2.0 * std::numbers::pi - ang.back();
    for (std::size_t k = 1; k < ang.size(); ++k) gap = std::max(gap, ang[k] - ang[k - 1]);
    sh.max_angular_gap = gap;
    const auto [mn, mx] = std::minmax_element(rad.begin(), rad.end());
    double mean = 0;
    for (double r : rad) mean += r;
    mean /= static_cast<double>(rad.size());
    sh.radius_spread = mean > 0 ? (*mx - *mn) / mean : 0.0;
    return sh;
}

}  // namespace crm
