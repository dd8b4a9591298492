#include "crm/qss.hpp"

#include "crm/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

namespace crm {

SystemState QssSolution::to_state(double t) const {
    SystemState s;
    s.c_free = c_free;
    s.r_free = r_free;
    s.x = x;
    s.y = y;
    s.z = z;
    s.t = t;
    return s;
}

namespace {

void require_nonneg(double v, const char* name) {
    if (!(v >= 0.0) || !std::isfinite(v))
        throw DomainError(std::string(name) + " must be finite and >= 0");
}

double cubic_derivative(const CubicCoefficients& c, double x) noexcept {
    return (3.0 * x + 2.0 * c.phi2) * x + c.phi1;
}

double polish(const CubicCoefficients& c, double x, int steps) {
    for (int s = 0; s < steps; ++s) {
        const double f = cubic_value(c, x);
        const double df = cubic_derivative(c, x);
        if (df == 0.0 || !std::isfinite(df)) break;
        const double next = x - f / df;
        if (!std::isfinite(next) || std::abs(cubic_value(c, next)) > std::abs(f)) break;
        x = next;
    }
    return x;
}

}  // namespace

double qss_chasing_quadratic(double R, double C, double K) {
    require_nonneg(R, "R");
    require_nonneg(C, "C");
    require_nonneg(K, "K");
    const double S = R + C + K;
    if (S == 0.0 || R == 0.0 || C == 0.0) return 0.0;
    const double disc = std::max(0.0, 1.0 - 4.0 * R * C / (S * S));
    const double x = 2.0 * R * C / (S * (1.0 + std::sqrt(disc)));
    return std::min(x, std::min(R, C));
}

CubicCoefficients intra_cubic_coefficients(double R, double C, double K, double beta) {
    CubicCoefficients c;
    c.phi2 = 2.0 * beta * K * K - K - C - 2.0 * R;
    c.phi1 = 2.0 * C * R + K * R + R * R;
    c.phi0 = -C * R * R;
    c.psi = c.phi1 - c.phi2 * c.phi2 / 3.0;
    c.varphi = c.phi0 - c.phi1 * c.phi2 / 3.0 + 2.0 * c.phi2 * c.phi2 * c.phi2 / 27.0;
    c.discriminant = -4.0 * c.psi * c.psi * c.psi - 27.0 * c.varphi * c.varphi;
    return c;
}

double cubic_value(const CubicCoefficients& c, double x) noexcept {
    return ((x + c.phi2) * x + c.phi1) * x + c.phi0;
}

std::vector<double> real_cubic_roots(const CubicCoefficients& c) {
    const double shift = -c.phi2 / 3.0;
    std::vector<double> roots;
    if (c.discriminant > 0.0) {
        const double amp = std::sqrt(-4.0 * c.psi / 3.0);
        const double arg = -c.varphi / 2.0 * std::pow(-c.psi / 3.0, -1.5);
        const double ang = std::acos(std::clamp(arg, -1.0, 1.0)) / 3.0;
        for (int j = 0; j < 3; ++j)
            roots.push_back(amp * std::cos(ang + 2.0 * std::numbers::pi * j / 3.0) + shift);
    } else {
        const double s = std::sqrt(std::max(0.0, -c.discriminant / 108.0));
        const double t1 = std::cbrt(-c.varphi / 2.0 + s);
        const double t2 = std::cbrt(-c.varphi / 2.0 - s);
        roots.push_back(t1 + t2 + shift);
        if (c.discriminant == 0.0) roots.push_back(-0.5 * (t1 + t2) + shift);
    }
    for (double& r : roots) r = polish(c, r, 2);
    std::sort(roots.begin(), roots.end());
    return roots;
}

namespace {

// Follows the feasible branch from beta = 0 to the target beta.
double homotopy_root(double R, double C, double K, double beta) {
    double x = qss_chasing_quadratic(R, C, K);
    constexpr int steps = 32;
    for (int s = 1; s <= steps; ++s) {
        const auto cc = intra_cubic_coefficients(R, C, K, beta * s / steps);
        for (int it = 0; it < 8; ++it) x = polish(cc, x, 1);
    }
    return x;
}

}  // namespace

namespace {

// Pair balance in the free resource u = R - x:
//   g(u) = C^F + (R - u) + 2 beta C^F^2 - C,  C^F = K (R - u) / u,
// strictly decreasing on (0, R]. Near x = R the cubic carries a factor (R - x)^2
// and is flat to rounding; g is not.
double balance_root(double R, double C, double K, double beta, double x) {
    double lo = R - std::min(R, C), hi = R;  // g(lo) >= 0 > g(hi)
    auto g = [&](double u, double& dg) {
        const double cf = K * (R - u) / u;
        dg = -K * R / (u * u) * (1.0 + 4.0 * beta * cf) - 1.0;
        return cf + (R - u) + 2.0 * beta * cf * cf - C;
    };
    double u = R - x;
    if (!(u > lo && u < hi)) u = 0.5 * (lo + hi);
    for (int it = 0; it < 200; ++it) {
        double dg = 0.0;
        const double f = g(u, dg);
        if (f == 0.0) break;
        if (f > 0.0) lo = u;
        else hi = u;
        double next = u - f / dg;
        if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
        const bool done = std::abs(next - u) <= 4e-16 * u;
        u = next;
        if (done || hi - lo <= 4e-16 * hi) break;
    }
    return std::clamp(R - u, 0.0, std::min(R, C));
}

}  // namespace

double qss_intra_cubic(double R, double C, double K, double beta) {
    require_nonneg(R, "R");
    require_nonneg(C, "C");
    require_nonneg(K, "K");
    require_nonneg(beta, "beta");
    if (C == 0.0 || R == 0.0) return 0.0;
    const auto coeffs = intra_cubic_coefficients(R, C, K, beta);
    const auto roots = real_cubic_roots(coeffs);
    const double upper = std::min(R, C);
    const double tol = 1e-9 * std::max(1.0, upper);
    std::vector<double> feasible;
    for (double r : roots)
        if (r >= -tol && r <= upper + tol) feasible.push_back(std::clamp(r, 0.0, upper));

    // The cubic is the pair balance times (R - x)^2, so exactly one root lies in
    // [0, min(R, C)]. Near a vanishing discriminant the closed forms can lose it to
    // cancellation; the bracketed balance both rescues and polishes.
    const bool bracket = K > 0.0 && cubic_value(coeffs, upper) >= 0.0;
    if (feasible.empty()) {
        if (!bracket) throw InfeasibleRoot("no cubic root in [0, min(R,C)]", roots);
        return balance_root(R, C, K, beta, qss_chasing_quadratic(R, C, K));
    }
    double x = feasible.front();
    if (feasible.size() > 1) {
        const double anchor = homotopy_root(R, C, K, beta);
        x = *std::min_element(feasible.begin(), feasible.end(), [&](double p, double q) {
            return std::abs(p - anchor) < std::abs(q - anchor);
        });
    }
    return bracket ? balance_root(R, C, K, beta, x) : x;
}

double qss_intra_approx(double R, double C, double K, double beta, IntraApprox variant) {
    if (C <= 0.0 || R <= 0.0) return 0.0;
    const double half = 0.5 * (K + R);
    switch (variant) {
        case IntraApprox::QuasiRigorous:
            return R * C / (std::sqrt(half * half + 2.0 * C * beta * K * K) + half);
        case IntraApprox::SmallBeta:
            return R * C / ((K + R) + 2.0 * K / (1.0 + R / K) * beta * C);
        case IntraApprox::LargeBeta: {
            const double s = K * std::sqrt(2.0 * C * beta);
            if (s == 0.0) return 0.0;
            return R * C / (s + (K + R) * (K + R) / (8.0 * s) + half);
        }
    }
    return 0.0;
}

std::pair<double, double> qss_inter_pair(double R, double C1, double C2, double K1, double K2,
                                         double gamma) {
    const double u1 = R / K1 + 1.0;
    const double u2 = R / K2 + 1.0;
    const double P = u1 * u2;
    auto one = [&](double Ci, double Cj, double uj, double Ki) {
        if (Ci <= 0.0) return 0.0;
        const double b = gamma * (Cj - Ci) + P;
        const double root = std::sqrt(b * b + 4.0 * gamma * Ci * P);
        // b + root never cancels: root >= |b|.
        return 2.0 * Ci * uj * (R / Ki) / (root + b);
    };
    return {one(C1, C2, u2, K1), one(C2, C1, u1, K2)};
}

std::pair<double, double> qss_inter_pair_first_order(double R, double C1, double C2, double K1,
                                                     double K2, double gamma) {
    const double P = (R / K1 + 1.0) * (R / K2 + 1.0);
    const double S = gamma * (C1 + C2) + P;
    const double cross = gamma * gamma * K1 * K2 * C1 * C2 / S;
    const double x1 = C1 * R / ((R + K1) + gamma * K1 * K2 * C2 / (R + K2) - cross / (R + K2));
    const double x2 = C2 * R / ((R + K2) + gamma * K1 * K2 * C1 / (R + K1) - cross / (R + K1));
    return {x1, x2};
}

QssSolution qss_generic_numeric(const Vec& C, const Vec& R, const ModelConfig& config,
                                const QssOptions& opts) {
    return qss_generic_numeric(C, R, config, derive_constants(config), opts);
}

namespace {

struct Residuals {
    Vec f;
    double scaled_max;
};

Residuals qss_residual(const Vec& cf, const Vec& rf, const Vec& C, const Vec& R,
                       const DerivedConstants& dc) {
    const auto M = C.size();
    const auto N = R.size();
    Residuals out{Vec(M + N), 0.0};
    const Vec bound = dc.inv_K * rf;     // sum_l R^F_l / K_il
    const Vec inter = dc.gamma * cf;     // sum_j gamma_ij C^F_j
    for (Eigen::Index i = 0; i < M; ++i) {
        out.f(i) = cf(i) * (1.0 + bound(i) + 2.0 * dc.beta(i) * cf(i) + inter(i)) - C(i);
        out.scaled_max = std::max(out.scaled_max, std::abs(out.f(i)) / std::max(1.0, C(i)));
    }
    const Vec load = dc.inv_K.transpose() * cf;  // sum_i C^F_i / K_il
    for (Eigen::Index l = 0; l < N; ++l) {
        out.f(M + l) = rf(l) * (1.0 + load(l)) - R(l);
        out.scaled_max = std::max(out.scaled_max, std::abs(out.f(M + l)) / std::max(1.0, R(l)));
    }
    return out;
}

// Positive root of 2 b c^2 + s c - C = 0 in a cancellation-free form.
double free_consumer(double Ci, double s, double b) {
    if (Ci <= 0.0) return 0.0;
    return 2.0 * Ci / (s + std::sqrt(s * s + 8.0 * b * Ci));
}

}  // namespace

QssSolution qss_generic_numeric(const Vec& C, const Vec& R, const ModelConfig& config,
                                const DerivedConstants& dc, const QssOptions& opts) {
    const auto M = C.size();
    const auto N = R.size();
    if (M != static_cast<Eigen::Index>(config.consumers()) ||
        N != static_cast<Eigen::Index>(config.resource_count()))
        throw DomainError("qss_generic_numeric: totals do not match config shape");
    for (Eigen::Index i = 0; i < M; ++i) require_nonneg(C(i), "C");
    for (Eigen::Index l = 0; l < N; ++l) require_nonneg(R(l), "R");

    Vec cf(M), rf = R;
    for (int sweep = 0; sweep < 30; ++sweep) {
        const Vec bound = dc.inv_K * rf;
        for (Eigen::Index i = 0; i < M; ++i) {
            double s = 1.0 + bound(i);
            if (sweep > 0)
                for (Eigen::Index j = 0; j < M; ++j)
                    if (j != i) s += dc.gamma(i, j) * cf(j);
            cf(i) = free_consumer(C(i), s, dc.beta(i));
        }
        const Vec load = dc.inv_K.transpose() * cf;
        for (Eigen::Index l = 0; l < N; ++l) rf(l) = R(l) / (1.0 + load(l));
    }

    auto res = qss_residual(cf, rf, C, R, dc);
    int it = 0;
    Mat J(M + N, M + N);
    while (res.scaled_max > opts.tolerance && it < opts.max_iterations) {
        ++it;
        J.setZero();
        const Vec bound = dc.inv_K * rf;
        const Vec inter = dc.gamma * cf;
        const Vec load = dc.inv_K.transpose() * cf;
        for (Eigen::Index i = 0; i < M; ++i) {
            J(i, i) = 1.0 + bound(i) + 4.0 * dc.beta(i) * cf(i) + inter(i);
            for (Eigen::Index j = 0; j < M; ++j)
                if (j != i) J(i, j) = dc.gamma(i, j) * cf(i);
            for (Eigen::Index l = 0; l < N; ++l) {
                J(i, M + l) = dc.inv_K(i, l) * cf(i);
                J(M + l, i) = dc.inv_K(i, l) * rf(l);
            }
        }
        for (Eigen::Index l = 0; l < N; ++l) J(M + l, M + l) = 1.0 + load(l);
        const Vec step = J.partialPivLu().solve(-res.f);
        if (!step.allFinite()) break;

        // Fraction to the boundary keeps free pools non-negative.
        double lambda = 1.0;
        for (Eigen::Index i = 0; i < M; ++i)
            if (step(i) < 0.0 && cf(i) > 0.0) lambda = std::min(lambda, -0.99 * cf(i) / step(i));
        for (Eigen::Index l = 0; l < N; ++l)
            if (step(M + l) < 0.0 && rf(l) > 0.0)
                lambda = std::min(lambda, -0.99 * rf(l) / step(M + l));
        Residuals trial;
        Vec cf_t, rf_t;
        for (int bt = 0; bt < 30; ++bt) {
            cf_t = (cf + lambda * step.head(M)).cwiseMax(0.0);
            rf_t = (rf + lambda * step.tail(N)).cwiseMax(0.0);
            trial = qss_residual(cf_t, rf_t, C, R, dc);
            if (trial.f.norm() < res.f.norm() || trial.scaled_max <= opts.tolerance) break;
            lambda *= 0.5;
        }
        if (!(trial.f.norm() < res.f.norm()) && trial.scaled_max > opts.tolerance) break;
        cf = cf_t;
        rf = rf_t;
        res = trial;
    }
    if (res.scaled_max > std::max(opts.tolerance, 1e-10)) {
        std::vector<double> last(cf.data(), cf.data() + M);
        last.insert(last.end(), rf.data(), rf.data() + N);
        throw ConvergenceError("qss_generic_numeric did not converge", std::move(last),
                               res.scaled_max);
    }

    QssSolution out;
    out.c_free = cf;
    out.r_free = rf;
    out.x = Mat::Zero(M, N);
    for (Eigen::Index i = 0; i < M; ++i)
        for (Eigen::Index l = 0; l < N; ++l) out.x(i, l) = dc.inv_K(i, l) * cf(i) * rf(l);
    out.y = (dc.beta.array() * cf.array().square()).matrix();
    out.z = Mat::Zero(M, M);
    for (Eigen::Index i = 0; i < M; ++i)
        for (Eigen::Index j = 0; j < M; ++j)
            if (i != j) out.z(i, j) = dc.gamma(i, j) * cf(i) * cf(j);
    out.residual = res.scaled_max;
    out.iterations = it;
    out.branch = "numeric";
    return out;
}

}  // namespace crm
