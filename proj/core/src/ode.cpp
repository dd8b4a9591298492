#include "crm/ode.hpp"

#include "crm/errors.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

namespace crm {

ModelRhs::ModelRhs(ModelConfig config) : config_(std::move(config)) {
    config_.validate();
    layout_ = StateLayout(config_);
    kd_ = config_.k + config_.d;
    wk_ = config_.w.cwiseProduct(config_.k);
}

ModelRhs build_rhs(const ModelConfig& config) { return ModelRhs(config); }

void ModelRhs::operator()(double, const double* u, double* du) const {
    const std::size_t M = layout_.M(), N = layout_.N();
    const auto& c = config_;
    const auto& L = layout_;

    // Accumulate total derivatives in the free slots, then subtract pair derivatives.
    for (std::size_t i = 0; i < M; ++i) du[L.c_free(i)] = 0.0;
    for (std::size_t l = 0; l < N; ++l) du[L.r_free(l)] = 0.0;

    for (std::size_t i = 0; i < M; ++i) {
        const auto ii = static_cast<Eigen::Index>(i);
        const double cf = u[L.c_free(i)];
        double total = cf;
        double gain = 0.0;
        double pair_rate = 0.0;
        for (std::size_t l = 0; l < N; ++l) {
            const auto ll = static_cast<Eigen::Index>(l);
            const double x = u[L.x(i, l)];
            total += x;
            const double dx = c.a(ii, ll) * cf * u[L.r_free(l)] - kd_(ii, ll) * x;
            du[L.x(i, l)] = dx;
            pair_rate += dx;
            gain += wk_(ii, ll) * x;
            du[L.r_free(l)] -= c.k(ii, ll) * x + dx;
        }
        if (L.intra()) {
            const double y = u[L.y(i)];
            total += 2.0 * y;
            const double dy = c.a_intra(ii) * cf * cf - c.d_intra(ii) * y;
            du[L.y(i)] = dy;
            pair_rate += 2.0 * dy;
        }
        if (L.inter()) {
            for (std::size_t j = 0; j < M; ++j) {
                if (j == i) continue;
                total += u[L.z(i, j)];
                if (j > i) {
                    const auto jj = static_cast<Eigen::Index>(j);
                    const double dz = c.a_inter(ii, jj) * cf * u[L.c_free(j)] -
                                      c.d_inter(ii, jj) * u[L.z(i, j)];
                    du[L.z(i, j)] = dz;
                }
            }
        }
        du[L.c_free(i)] += gain - c.D(ii) * total - pair_rate;
    }
    if (L.inter()) {
        for (std::size_t i = 0; i < M; ++i)
            for (std::size_t j = i + 1; j < M; ++j) {
                const double dz = du[L.z(i, j)];
                du[L.c_free(i)] -= dz;
                du[L.c_free(j)] -= dz;
            }
    }
    for (std::size_t l = 0; l < N; ++l) {
        double R = u[L.r_free(l)];
        for (std::size_t i = 0; i < M; ++i) R += u[L.x(i, l)];
        du[L.r_free(l)] += c.resources[l].growth(R);
    }
}

SystemState ModelRhs::derivative(const SystemState& s) const {
    const Vec u = layout_.pack(s);
    Vec du(u.size());
    (*this)(s.t, u.data(), du.data());
    return layout_.unpack(du, s.t);
}

OdeSystem ModelRhs::system() const {
    // Copying the functor keeps the system self-contained.
    return {dim(), [rhs = *this](double t, const double* u, double* du) { rhs(t, u, du); }};
}

std::string_view to_string(EventKind k) noexcept {
    switch (k) {
        case EventKind::ExtinctionBelowThreshold: return "ExtinctionBelowThreshold";
        case EventKind::SteadyStateReached: return "SteadyStateReached";
        case EventKind::NegativityClipped: return "NegativityClipped";
        case EventKind::Stopped: return "Stopped";
    }
    return "?";
}

std::vector<double> uniform_samples(double t0, double t_end, std::size_t n) {
    std::vector<double> out(n);
    if (n == 1) {
        out[0] = t_end;
        return out;
    }
    for (std::size_t k = 0; k < n; ++k)
        out[k] = t0 + (t_end - t0) * static_cast<double>(k) / static_cast<double>(n - 1);
    out.back() = t_end;
    return out;
}

namespace {

// Dormand-Prince 5(4) coefficients.
constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
constexpr double a21 = 1.0 / 5;
constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                 a54 = -212.0 / 729;
constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                 a65 = -5103.0 / 18656;
constexpr double a71 = 35.0 / 384, a73 = 500.0 / 1113, a74 = 125.0 / 192, a75 = -2187.0 / 6784,
                 a76 = 11.0 / 84;
constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920, e5 = -17253.0 / 339200,
                 e6 = 22.0 / 525, e7 = -1.0 / 40;
constexpr double d1 = -12715105075.0 / 11282082432, d3 = 87487479700.0 / 32700410799,
                 d4 = -10690763975.0 / 1880347072, d5 = 701980252875.0 / 199316789632,
                 d6 = -1453857185.0 / 822651844, d7 = 69997945.0 / 29380423;

class Dopri5 {
public:
    Dopri5(const OdeSystem& sys, const IntegratorControls& ctl)
        : sys_(sys), ctl_(ctl), n_(static_cast<Eigen::Index>(sys.dim)) {
        for (auto* v : {&k1_, &k2_, &k3_, &k4_, &k5_, &k6_, &k7_, &tmp_, &ynew_, &r2_, &r3_, &r4_,
                        &r5_})
            v->resize(n_);
    }

    FlatTrajectory run(const Vec& u0, double t0, double t_end) {
        if (static_cast<std::size_t>(u0.size()) != sys_.dim)
            throw DomainError("initial state has wrong dimension");
        if (!(t_end >= t0)) throw DomainError("t_end must be >= t0");
        FlatTrajectory out;
        y_ = u0;
        double t = t0;
        if (ctl_.clip_negative) clip(y_, t, out, false);
        eval(t, y_, k1_, out);

        auto samples = ctl_.sample_times;
        std::sort(samples.begin(), samples.end());
        std::size_t next = 0;
        while (next < samples.size() && samples[next] < t0) ++next;
        const bool endpoints_only = samples.empty() && !ctl_.record_every_step;
        if (endpoints_only || ctl_.record_every_step) record(out, t, y_);
        while (next < samples.size() && samples[next] == t0) {
            record(out, t, y_);
            ++next;
        }

        double h = ctl_.initial_step > 0.0 ? ctl_.initial_step : initial_step(t, t_end, out);
        bool steady_logged = false;
        bool stop = false;
        double err_old = 1e-4;
        while (t < t_end && !stop) {
            if (out.stats.accepted + out.stats.rejected >= ctl_.max_steps)
                throw StiffnessError("maximum number of steps exceeded", t, to_std(y_));
            h = std::min({h, ctl_.max_step, t_end - t});
            const double h_min = 1e-13 * std::max(1.0, std::abs(t));
            if (h < h_min && t_end - t > h_min)
                throw StiffnessError("step size underflow", t, to_std(y_));

            const double err = attempt(t, h, out);
            if (err <= 1.0) {
                // Dense-output coefficients from the unclipped step.
                prepare_dense(h);
                const double t_new = (t_end - t - h <= 1e-15 * std::max(1.0, std::abs(t_end)))
                                         ? t_end
                                         : t + h;
                while (next < samples.size() && samples[next] <= t_new) {
                    const double theta = (samples[next] - t) / h;
                    Vec ys = dense(std::clamp(theta, 0.0, 1.0));
                    if (ctl_.clip_negative) ys = ys.cwiseMax(0.0);
                    record(out, samples[next], ys);
                    ++next;
                }
                y_.swap(ynew_);
                k1_.swap(k7_);
                t = t_new;
                if (ctl_.clip_negative && clip(y_, t, out, true)) eval(t, y_, k1_, out);
                ++out.stats.accepted;
                out.stats.last_step = h;
                if (ctl_.record_every_step) record(out, t, y_);

                if (!steady_logged && (ctl_.stop_at_steady_state ||
                                       ctl_.steady_state_tol > 0.0)) {
                    const double scale = std::max(1.0, y_.cwiseAbs().maxCoeff());
                    if (k1_.cwiseAbs().maxCoeff() <= ctl_.steady_state_tol * scale) {
                        out.events.push_back({t, -1, EventKind::SteadyStateReached});
                        steady_logged = true;
                        if (ctl_.stop_at_steady_state) stop = true;
                    }
                }
                if (ctl_.on_step && !ctl_.on_step(t, y_.data())) {
                    out.events.push_back({t, -1, EventKind::Stopped});
                    stop = true;
                }
                const double fac = 0.9 * std::pow(std::max(err, 1e-10), -0.17) *
                                   std::pow(err_old, 0.04);
                err_old = std::max(err, 1e-4);
                h *= std::clamp(fac, 0.2, 10.0);
            } else {
                ++out.stats.rejected;
                h *= std::max(0.2, 0.9 * std::pow(err, -0.2));
            }
        }
        if (endpoints_only && (out.times.empty() || out.times.back() != t)) record(out, t, y_);
        out.end_time = t;
        out.end_state = y_;
        return out;
    }

private:
    static std::vector<double> to_std(const Vec& v) { return {v.data(), v.data() + v.size()}; }

    void eval(double t, const Vec& y, Vec& dy, FlatTrajectory& out) {
        sys_.f(t, y.data(), dy.data());
        ++out.stats.evaluations;
    }

    static void record(FlatTrajectory& out, double t, const Vec& y) {
        out.times.push_back(t);
        out.states.push_back(y);
    }

    bool clip(Vec& y, double t, FlatTrajectory& out, bool log) {
        bool any = false;
        for (Eigen::Index j = 0; j < y.size(); ++j) {
            if (y(j) < 0.0) {
                if (log && y(j) < -ctl_.abs_tol)
                    out.events.push_back({t, static_cast<int>(j), EventKind::NegativityClipped});
                y(j) = 0.0;
                any = true;
            }
        }
        return any;
    }

    double initial_step(double t, double t_end, FlatTrajectory& out) {
        const Vec sc = (ctl_.abs_tol + ctl_.rel_tol * y_.cwiseAbs().array()).matrix();
        const double d0 = std::sqrt((y_.cwiseQuotient(sc)).squaredNorm() / double(n_));
        const double d1v = std::sqrt((k1_.cwiseQuotient(sc)).squaredNorm() / double(n_));
        double h0 = (d0 < 1e-5 || d1v < 1e-5) ? 1e-6 : 0.01 * d0 / d1v;
        h0 = std::min(h0, t_end - t);
        tmp_ = y_ + h0 * k1_;
        eval(t + h0, tmp_, k2_, out);
        const double d2 = std::sqrt(((k2_ - k1_).cwiseQuotient(sc)).squaredNorm() / double(n_)) / h0;
        const double h1 = std::max(d1v, d2) <= 1e-15 ? std::max(1e-6, h0 * 1e-3)
                                                     : std::pow(0.01 / std::max(d1v, d2), 0.2);
        return std::max(std::min(100.0 * h0, h1), 1e-10);
    }

    double attempt(double t, double h, FlatTrajectory& out) {
        tmp_ = y_ + h * a21 * k1_;
        eval(t + c2 * h, tmp_, k2_, out);
        tmp_ = y_ + h * (a31 * k1_ + a32 * k2_);
        eval(t + c3 * h, tmp_, k3_, out);
        tmp_ = y_ + h * (a41 * k1_ + a42 * k2_ + a43 * k3_);
        eval(t + c4 * h, tmp_, k4_, out);
        tmp_ = y_ + h * (a51 * k1_ + a52 * k2_ + a53 * k3_ + a54 * k4_);
        eval(t + c5 * h, tmp_, k5_, out);
        tmp_ = y_ + h * (a61 * k1_ + a62 * k2_ + a63 * k3_ + a64 * k4_ + a65 * k5_);
        eval(t + h, tmp_, k6_, out);
        ynew_ = y_ + h * (a71 * k1_ + a73 * k3_ + a74 * k4_ + a75 * k5_ + a76 * k6_);
        eval(t + h, ynew_, k7_, out);
        double acc = 0.0;
        for (Eigen::Index j = 0; j < n_; ++j) {
            const double e = h * (e1 * k1_(j) + e3 * k3_(j) + e4 * k4_(j) + e5 * k5_(j) +
                                  e6 * k6_(j) + e7 * k7_(j));
            const double sc =
                ctl_.abs_tol + ctl_.rel_tol * std::max(std::abs(y_(j)), std::abs(ynew_(j)));
            acc += (e / sc) * (e / sc);
        }
        const double err = std::sqrt(acc / double(n_));
        return std::isfinite(err) ? err : 1e10;
    }

    void prepare_dense(double h) {
        y_old_ = y_;
        r2_ = ynew_ - y_;
        r3_ = h * k1_ - r2_;
        r4_ = r2_ - h * k7_ - r3_;
        r5_ = h * (d1 * k1_ + d3 * k3_ + d4 * k4_ + d5 * k5_ + d6 * k6_ + d7 * k7_);
    }

    Vec dense(double th) const {
        const double th1 = 1.0 - th;
        return y_old_ + th * (r2_ + th1 * (r3_ + th * (r4_ + th1 * r5_)));
    }

    const OdeSystem& sys_;
    const IntegratorControls& ctl_;
    Eigen::Index n_;
    Vec y_, y_old_, k1_, k2_, k3_, k4_, k5_, k6_, k7_, tmp_, ynew_, r2_, r3_, r4_, r5_;
};

}  // namespace

FlatTrajectory integrate(const OdeSystem& sys, const Vec& u0, double t0, double t_end,
                         const IntegratorControls& controls) {
    Dopri5 solver(sys, controls);
    return solver.run(u0, t0, t_end);
}

Trajectory integrate(const ModelRhs& rhs, const SystemState& initial, double t_end,
                     const IntegratorControls& controls) {
    const auto& L = rhs.layout();
    const std::size_t M = L.M();
    for (Eigen::Index j = 0; j < initial.c_free.size(); ++j)
        if (initial.c_free(j) < 0.0) throw DomainError("initial state must be non-negative");
    const Vec u0 = L.pack(initial);
    if ((u0.array() < 0.0).any()) throw DomainError("initial state must be non-negative");

    IntegratorControls ctl = controls;
    std::vector<Event> extinctions;
    std::vector<char> extinct(M, 0);
    const Vec C0 = L.consumer_totals(u0.data());
    for (std::size_t i = 0; i < M; ++i)
        extinct[i] = C0(static_cast<Eigen::Index>(i)) < ctl.extinction_threshold;
    auto user = controls.on_step;
    ctl.on_step = [&, user](double t, const double* u) {
        const Vec C = L.consumer_totals(u);
        for (std::size_t i = 0; i < M; ++i) {
            if (!extinct[i] && C(static_cast<Eigen::Index>(i)) < ctl.extinction_threshold) {
                extinct[i] = 1;
                extinctions.push_back({t, static_cast<int>(i), EventKind::ExtinctionBelowThreshold});
            }
        }
        return user ? user(t, u) : true;
    };

    auto flat = integrate(rhs.system(), u0, initial.t, t_end, ctl);
    Trajectory out;
    out.layout = L;
    out.times = std::move(flat.times);
    out.data = std::move(flat.states);
    out.events = std::move(flat.events);
    out.events.insert(out.events.end(), extinctions.begin(), extinctions.end());
    std::stable_sort(out.events.begin(), out.events.end(),
                     [](const Event& a, const Event& b) { return a.time < b.time; });
    out.stats = flat.stats;
    return out;
}

void write_trajectory_csv(std::ostream& os, const Trajectory& traj) {
    os << "time,species,value\n";
    const auto old = os.precision(12);
    for (std::size_t k = 0; k < traj.size(); ++k) {
        const Vec C = traj.consumer_totals(k);
        const Vec R = traj.resource_totals(k);
        for (Eigen::Index i = 0; i < C.size(); ++i)
            os << traj.times[k] << ",C" << i + 1 << ',' << C(i) << '\n';
        for (Eigen::Index l = 0; l < R.size(); ++l)
            os << traj.times[k] << ",R" << l + 1 << ',' << R(l) << '\n';
    }
    os.precision(old);
}

}  // namespace crm
