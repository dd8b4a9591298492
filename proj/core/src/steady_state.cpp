#include "crm/steady_state.hpp"

#include "crm/errors.hpp"
#include "crm/ode.hpp"
#include "crm/qss.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <string>

namespace crm {

std::string_view to_string(FixedPointMethod m) noexcept {
    switch (m) {
        case FixedPointMethod::ClosedFormDilute: return "ClosedFormDilute";
        case FixedPointMethod::MatrixSolve: return "MatrixSolve";
        case FixedPointMethod::NewtonRefined: return "NewtonRefined";
    }
    return "?";
}

namespace {

void require_shape(const ModelConfig& c, Scenario s, Eigen::Index M, Eigen::Index N,
                   const char* who) {
    c.validate();
    if (c.scenario != s)
        throw DomainError(std::string(who) + ": needs scenario " + std::string(to_string(s)));
    if ((M > 0 && c.a.rows() != M) || (N > 0 && c.a.cols() != N))
        throw DomainError(std::string(who) + ": wrong number of consumers or resources");
}

void require_kind(const ModelConfig& c, ResourceKind kind, const char* who) {
    for (const auto& r : c.resources)
        if (r.kind != kind)
            throw DomainError(std::string(who) + ": all resources must be " +
                              std::string(to_string(kind)));
}

// 1/alpha = w k / D; requires D > 0.
Mat inverse_alpha(const ModelConfig& c) {
    Mat out(c.a.rows(), c.a.cols());
    for (Eigen::Index i = 0; i < c.a.rows(); ++i) {
        if (!(c.D(i) > 0.0)) throw DomainError("closed forms need D_i > 0");
        for (Eigen::Index l = 0; l < c.a.cols(); ++l)
            out(i, l) = c.w(i, l) * c.k(i, l) / c.D(i);
    }
    return out;
}

void require_beta(const DerivedConstants& dc) {
    for (Eigen::Index i = 0; i < dc.beta.size(); ++i)
        if (!(dc.beta(i) > 0.0)) throw DomainError("closed forms need a'_ii > 0");
}

void check_feasible(const Vec& C, const Vec& R, const char* who) {
    std::vector<std::size_t> bad;
    for (Eigen::Index i = 0; i < C.size(); ++i)
        if (!(C(i) > 0.0)) bad.push_back(static_cast<std::size_t>(i));
    for (Eigen::Index l = 0; l < R.size(); ++l)
        if (!(R(l) > 0.0)) bad.push_back(static_cast<std::size_t>(C.size() + l));
    if (bad.empty()) return;
    std::string msg = std::string(who) + ": non-positive abundance for";
    for (auto s : bad) {
        msg += s < static_cast<std::size_t>(C.size())
                   ? " C" + std::to_string(s + 1)
                   : " R" + std::to_string(s - C.size() + 1);
    }
    throw InfeasibleRegime(msg, bad);
}

// Positive root of q2 R^2 + q1 R - q0 = 0, q0 > 0.
double positive_quadratic_root(double q2, double q1, double q0) {
    if (q2 == 0.0) {
        if (!(q1 > 0.0)) throw InfeasibleRegime("no positive resource root", {});
        return q0 / q1;
    }
    const double disc = q1 * q1 + 4.0 * q2 * q0;
    if (disc < 0.0) throw InfeasibleRegime("complex resource root", {});
    const double s = std::sqrt(disc);
    // stable evaluation of (-q1 + s) / (2 q2)
    return q1 >= 0.0 ? 2.0 * q0 / (q1 + s) : (-q1 + s) / (2.0 * q2);
}

struct Dilute1 {
    Vec C;
    double R;
};

// Explicit N = 1 forms: R from the logistic / supply balance, C_i from the
// consumer balance with R^F ~ R.
Dilute1 dilute_single_resource(const ModelConfig& c, const DerivedConstants& dc) {
    const auto M = c.a.rows();
    const auto& law = c.resources[0];
    double num = 0.0, den = 0.0;  // sum k/(2bK), sum k(1-a)/(2b a K^2)
    for (Eigen::Index i = 0; i < M; ++i) {
        const double K = dc.K(i, 0), a = dc.alpha(i, 0), b = dc.beta(i), k = c.k(i, 0);
        num += k / (2.0 * b * K);
        den += k * (1.0 - a) / (2.0 * b * a * K * K);
    }
    double R;
    if (law.kind == ResourceKind::Biotic) {
        const double R0 = law.intrinsic_rate, K0 = law.carrying_capacity;
        R = (R0 + num) / (den + R0 / K0);
    } else {
        const double Ra = law.intrinsic_rate, K0 = law.carrying_capacity;
        const double kappa1 = Ra / K0 - num;
        const double kappa2 = den;
        R = positive_quadratic_root(kappa2, kappa1, Ra);
    }
    Vec C(M);
    for (Eigen::Index i = 0; i < M; ++i) {
        const double K = dc.K(i, 0), a = dc.alpha(i, 0), b = dc.beta(i);
        C(i) = ((1.0 - a) * R * R - K * a * R) / (2.0 * b * (K * a) * (K * a));
    }
    return {C, R};
}

// C_i = sum_l R_l/(2 b alpha K) [-1 + sum_l' (1/alpha - 1) R_l'/K].
Vec general_consumers(const ModelConfig& c, const DerivedConstants& dc, const Mat& inv_alpha,
                      const Vec& R) {
    const auto M = c.a.rows(), N = c.a.cols();
    Vec C(M);
    for (Eigen::Index i = 0; i < M; ++i) {
        double bracket = -1.0, lead = 0.0;
        for (Eigen::Index l = 0; l < N; ++l) {
            bracket += (inv_alpha(i, l) - 1.0) * dc.inv_K(i, l) * R(l);
            lead += R(l) * inv_alpha(i, l) * dc.inv_K(i, l);
        }
        C(i) = lead * bracket / (2.0 * dc.beta(i));
    }
    return C;
}

// Biotic linear system A R = B.
void assemble_biotic(const ModelConfig& c, const DerivedConstants& dc, const Mat& inv_alpha,
                     const Vec& r0, Mat& A, Vec& B) {
    const auto M = c.a.rows(), N = c.a.cols();
    A = Mat::Zero(N, N);
    B = r0;
    for (Eigen::Index s = 0; s < N; ++s) {
        A(s, s) += r0(s) / c.resources[s].carrying_capacity;
        for (Eigen::Index i = 0; i < M; ++i) {
            const double ck = c.k(i, s) * dc.inv_K(i, s) / (2.0 * dc.beta(i));
            B(s) += ck;
            for (Eigen::Index q = 0; q < N; ++q)
                A(s, q) += ck * dc.inv_K(i, q) * (inv_alpha(i, q) - 1.0);
        }
    }
}

Vec solve_linear(const Mat& A, const Vec& B) {
    Eigen::FullPivLU<Mat> lu(A);
    if (!lu.isInvertible()) throw SingularSystem("resource matrix A is singular");
    return lu.solve(B);
}

double regime_ratio(const Vec& C, const Vec& R) {
    const double sc = C.cwiseMax(0.0).sum();
    if (sc <= 0.0) return std::numeric_limits<double>::infinity();
    return R.minCoeff() / sc;
}

}  // namespace

double rhs_residual(const ModelConfig& config, const SystemState& s) {
    ModelRhs rhs(config);
    const Vec u = rhs.layout().pack(s);
    Vec du(u.size());
    rhs(s.t, u.data(), du.data());
    return du.size() ? du.cwiseAbs().maxCoeff() : 0.0;
}

FixedPoint make_fixed_point(const ModelConfig& config, const Vec& C, const Vec& R,
                            FixedPointMethod method) {
    FixedPoint fp;
    fp.C = C;
    fp.R = R;
    fp.method = method;
    const auto q = qss_generic_numeric(C.cwiseMax(0.0), R.cwiseMax(0.0), config);
    fp.components = q.to_state();
    fp.qss_residual = q.residual;
    fp.rhs_residual = rhs_residual(config, fp.components);
    fp.regime_ratio = regime_ratio(C, R);
    return fp;
}

FixedPoint analytic_intra_2x1(const ModelConfig& config) {
    require_shape(config, Scenario::ChasingIntra, 2, 1, "analytic_intra_2x1");
    const auto dc = derive_constants(config);
    require_beta(dc);
    inverse_alpha(config);
    const auto sol = dilute_single_resource(config, dc);
    const Vec R = Vec::Constant(1, sol.R);
    check_feasible(sol.C, R, "analytic_intra_2x1");
    return make_fixed_point(config, sol.C, R, FixedPointMethod::ClosedFormDilute);
}

CoexistenceBound coexistence_delta_sup(const ModelConfig& config) {
    require_shape(config, Scenario::ChasingIntra, 2, 1, "coexistence_delta_sup");
    const auto same = [](double u, double v) {
        return std::abs(u - v) <= 1e-12 * std::max({1.0, std::abs(u), std::abs(v)});
    };
    if (!same(config.a(0, 0), config.a(1, 0)) || !same(config.d(0, 0), config.d(1, 0)) ||
        !same(config.k(0, 0), config.k(1, 0)) || !same(config.w(0, 0), config.w(1, 0)) ||
        !same(config.a_intra(0), config.a_intra(1)) || !same(config.d_intra(0), config.d_intra(1)))
        throw DomainError("coexistence_delta_sup: species must differ only in D");
    const auto dc = derive_constants(config);
    require_beta(dc);
    const double K = dc.K(1, 0), k = config.k(1, 0), b = dc.beta(1), a2 = dc.alpha(1, 0);
    const auto& law = config.resources[0];
    const double K0 = law.carrying_capacity;
    CoexistenceBound out;
    out.resource_kind = law.kind;
    if (law.kind == ResourceKind::Biotic) {
        const double R0 = law.intrinsic_rate;
        const double g = (K / K0 + 1.0) * a2;
        out.delta_sup = (1.0 - g) / (k / (2.0 * b * K * R0) + g);
    } else {
        const double Ra = law.intrinsic_rate;
        const double h = 1.0 / K0 - k / (2.0 * Ra * b * K);
        const double rho =
            0.5 * h + 0.5 * std::sqrt(h * h + 2.0 * k * (1.0 - a2) / (Ra * b * a2 * K * K));
        out.delta_sup = 1.0 / (a2 * (K * rho + 1.0)) - 1.0;
    }
    return out;
}

FixedPoint analytic_general_biotic(const ModelConfig& config) {
    require_shape(config, Scenario::ChasingIntra, 0, 0, "analytic_general_biotic");
    require_kind(config, ResourceKind::Biotic, "analytic_general_biotic");
    const auto dc = derive_constants(config);
    require_beta(dc);
    const Mat inv_alpha = inverse_alpha(config);
    const auto N = config.a.cols();
    Vec r0(N);
    for (Eigen::Index l = 0; l < N; ++l) r0(l) = config.resources[l].intrinsic_rate;
    Mat A;
    Vec B;
    assemble_biotic(config, dc, inv_alpha, r0, A, B);
    const Vec R = solve_linear(A, B);
    const Vec C = general_consumers(config, dc, inv_alpha, R);
    check_feasible(C, R, "analytic_general_biotic");
    return make_fixed_point(config, C, R, FixedPointMethod::MatrixSolve);
}

namespace {

// Abiotic balance per resource, blended by lambda with a biotic-shaped law:
// Ra(1 - R_l/K0) m_l - R_l sum_i c_il (-1 + sum_l' e_il' R_l'),  m_l = (1-lambda) R_l + lambda.
// lambda = 0 has the linear-system root; lambda = 1 is the abiotic balance.
struct AbioticSystem {
    Vec Ra, K0;
    Mat c, e;  // M x N
    double lambda = 1.0;

    Vec value(const Vec& R) const {
        const Vec bracket = (e * R).array() - 1.0;  // M
        Vec F(R.size());
        for (Eigen::Index l = 0; l < R.size(); ++l) {
            const double m = (1.0 - lambda) * R(l) + lambda;
            F(l) = Ra(l) * (1.0 - R(l) / K0(l)) * m - R(l) * c.col(l).dot(bracket);
        }
        return F;
    }
    Mat jacobian(const Vec& R) const {
        const auto N = R.size();
        const Vec bracket = (e * R).array() - 1.0;
        Mat J(N, N);
        for (Eigen::Index l = 0; l < N; ++l) {
            for (Eigen::Index m = 0; m < N; ++m) J(l, m) = -R(l) * c.col(l).dot(e.col(m));
            const double mult = (1.0 - lambda) * R(l) + lambda;
            J(l, l) += -Ra(l) / K0(l) * mult + Ra(l) * (1.0 - R(l) / K0(l)) * (1.0 - lambda) -
                       c.col(l).dot(bracket);
        }
        return J;
    }
};

bool newton_positive(const AbioticSystem& sys, Vec& R, double tol, int max_iter) {
    for (int it = 0; it < max_iter; ++it) {
        const Vec F = sys.value(R);
        const double f0 = F.norm();
        if (f0 <= tol * std::max(1.0, sys.Ra.maxCoeff())) return true;
        Eigen::PartialPivLU<Mat> lu(sys.jacobian(R));
        const Vec step = lu.solve(-F);
        if (!step.allFinite()) return false;
        double t = 1.0;
        for (Eigen::Index l = 0; l < R.size(); ++l)
            if (R(l) + step(l) <= 0.0) t = std::min(t, -0.9 * R(l) / step(l));
        bool accepted = false;
        for (int ls = 0; ls < 40; ++ls, t *= 0.5) {
            const Vec trial = R + t * step;
            if (sys.value(trial).norm() < (1.0 - 1e-4 * t) * f0) {
                R = trial;
                accepted = true;
                break;
            }
        }
        if (!accepted) return false;
    }
    return sys.value(R).norm() <= tol * std::max(1.0, sys.Ra.maxCoeff());
}

}  // namespace

FixedPoint analytic_general_abiotic(const ModelConfig& config) {
    require_shape(config, Scenario::ChasingIntra, 0, 0, "analytic_general_abiotic");
    require_kind(config, ResourceKind::Abiotic, "analytic_general_abiotic");
    const auto dc = derive_constants(config);
    require_beta(dc);
    const Mat inv_alpha = inverse_alpha(config);
    const auto M = config.a.rows(), N = config.a.cols();

    Vec R;
    if (N == 1) {
        R = Vec::Constant(1, dilute_single_resource(config, dc).R);
    } else {
        AbioticSystem sys;
        sys.Ra.resize(N);
        sys.K0.resize(N);
        for (Eigen::Index l = 0; l < N; ++l) {
            sys.Ra(l) = config.resources[l].intrinsic_rate;
            sys.K0(l) = config.resources[l].carrying_capacity;
        }
        sys.c.resize(M, N);
        sys.e.resize(M, N);
        for (Eigen::Index i = 0; i < M; ++i)
            for (Eigen::Index l = 0; l < N; ++l) {
                sys.c(i, l) = config.k(i, l) * dc.inv_K(i, l) / (2.0 * dc.beta(i));
                sys.e(i, l) = (inv_alpha(i, l) - 1.0) * dc.inv_K(i, l);
            }
        constexpr double tol = 1e-13;
        R = sys.K0 / 2.0;
        if (!newton_positive(sys, R, tol, 200)) {
            // Continuation from the biotic-shaped problem.
            Mat A;
            Vec B;
            assemble_biotic(config, dc, inv_alpha, sys.Ra, A, B);
            R = solve_linear(A, B);
            if (!(R.array() > 0.0).all()) R = sys.K0 / 2.0;
            bool ok = true;
            constexpr int stages = 50;
            for (int s = 1; s <= stages && ok; ++s) {
                AbioticSystem blend = sys;
                blend.lambda = static_cast<double>(s) / stages;
                ok = newton_positive(blend, R, tol, 200);
            }
            if (!ok || sys.value(R).norm() > 1e-10 * std::max(1.0, sys.Ra.maxCoeff()))
                throw ConvergenceError("analytic_general_abiotic: Newton did not converge",
                                       std::vector<double>(R.data(), R.data() + R.size()),
                                       sys.value(R).norm());
        }
    }
    const Vec C = general_consumers(config, dc, inv_alpha, R);
    check_feasible(C, R, "analytic_general_abiotic");
    return make_fixed_point(config, C, R,
                            N == 1 ? FixedPointMethod::ClosedFormDilute
                                   : FixedPointMethod::MatrixSolve);
}

FixedPoint analytic_inter_2x1(const ModelConfig& config) {
    require_shape(config, Scenario::ChasingInter, 2, 1, "analytic_inter_2x1");
    const auto dc = derive_constants(config);
    inverse_alpha(config);
    const double g = dc.gamma(0, 1);
    if (!(g > 0.0)) throw DomainError("analytic_inter_2x1: needs a'_12 > 0");
    const double K1 = dc.K(0, 0), K2 = dc.K(1, 0), a1 = dc.alpha(0, 0), a2 = dc.alpha(1, 0);
    const double k1 = config.k(0, 0), k2 = config.k(1, 0);
    const auto& law = config.resources[0];
    const double K0 = law.carrying_capacity;
    const double denom = g * K1 * a1 * K2 * a2;
    double R;
    if (law.kind == ResourceKind::Biotic) {
        const double R0 = law.intrinsic_rate;
        R = (R0 + k1 / (g * K1) + k2 / (g * K2)) /
            ((k1 * a1 + k2 * a2) / denom - (k1 + k2) / (g * K1 * K2) + R0 / K0);
    } else {
        const double Ra = law.intrinsic_rate;
        const double kappa1 = Ra / K0 - k1 / (g * K1) - k2 / (g * K2);
        const double kappa2 =
            k1 * (1.0 - a2) / (g * K1 * K2 * a2) + k2 * (1.0 - a1) / (g * K1 * K2 * a1);
        R = positive_quadratic_root(kappa2, kappa1, Ra);
    }
    Vec C(2);
    C(0) = ((1.0 - a2) * R * R - K2 * a2 * R) / denom;
    C(1) = ((1.0 - a1) * R * R - K1 * a1 * R) / denom;
    const Vec Rv = Vec::Constant(1, R);
    check_feasible(C, Rv, "analytic_inter_2x1");
    return make_fixed_point(config, C, Rv, FixedPointMethod::ClosedFormDilute);
}

FixedPoint analytic_both_2x1(const ModelConfig& config) {
    require_shape(config, Scenario::ChasingIntraInter, 2, 1, "analytic_both_2x1");
    const auto dc = derive_constants(config);
    require_beta(dc);
    inverse_alpha(config);
    const double g = dc.gamma(0, 1), b1 = dc.beta(0), b2 = dc.beta(1);
    const double E = 4.0 * b1 * b2 - g * g;
    if (std::abs(E) <= 1e-14 * std::max(1.0, 4.0 * b1 * b2))
        throw SingularSystem("analytic_both_2x1: 4 b1 b2 = g^2");
    const double K1 = dc.K(0, 0), K2 = dc.K(1, 0), a1 = dc.alpha(0, 0), a2 = dc.alpha(1, 0);
    const double k1 = config.k(0, 0), k2 = config.k(1, 0);
    const auto& law = config.resources[0];
    const double K0 = law.carrying_capacity;

    const double s0 = k1 * (g - 2.0 * b2) / (K1 * E) + k2 * (g - 2.0 * b1) / (K2 * E);
    const double s1 = k1 * 2.0 * b2 * (a1 - 1.0) / (K1 * K1 * a1 * E) +
                      k2 * 2.0 * b1 * (a2 - 1.0) / (K2 * K2 * a2 * E) -
                      k1 * g * (a2 - 1.0) / (K1 * K2 * a2 * E) -
                      k2 * g * (a1 - 1.0) / (K1 * K2 * a1 * E);
    double R;
    if (law.kind == ResourceKind::Biotic) {
        const double R0 = law.intrinsic_rate;
        R = (s0 - R0) / (s1 - R0 / K0);
    } else {
        const double Ra = law.intrinsic_rate;
        const double kp1 = -s1;
        const double kp2 = s0 + Ra / K0;
        R = positive_quadratic_root(kp1, kp2, Ra);
    }
    Vec C(2);
    C(0) = R *
           ((2.0 * b2 * K2 * a2 * (1.0 - a1) - g * K1 * a1 * (1.0 - a2)) * R +
            (g - 2.0 * b2) * K1 * a1 * K2 * a2) /
           (K1 * K1 * a1 * a1 * K2 * a2 * E);
    C(1) = R *
           ((2.0 * b1 * K1 * a1 * (1.0 - a2) - g * K2 * a2 * (1.0 - a1)) * R +
            (g - 2.0 * b1) * K1 * a1 * K2 * a2) /
           (K1 * a1 * K2 * K2 * a2 * a2 * E);
    const Vec Rv = Vec::Constant(1, R);
    check_feasible(C, Rv, "analytic_both_2x1");
    return make_fixed_point(config, C, Rv, FixedPointMethod::ClosedFormDilute);
}

namespace {

// Slow-variable residual with pairs at fast equilibrium.
Vec slow_residual(const ModelConfig& c, const DerivedConstants& dc, const Vec& C, const Vec& R,
                  const std::vector<bool>& frozen) {
    const auto M = c.a.rows(), N = c.a.cols();
    const auto q = qss_generic_numeric(C, R, c, dc);
    Vec G(M + N);
    for (Eigen::Index i = 0; i < M; ++i) {
        if (frozen[i]) {
            G(i) = C(i);
            continue;
        }
        double gain = 0.0;
        for (Eigen::Index l = 0; l < N; ++l) gain += c.w(i, l) * c.k(i, l) * q.x(i, l);
        G(i) = gain - c.D(i) * C(i);
    }
    for (Eigen::Index l = 0; l < N; ++l) {
        double loss = 0.0;
        for (Eigen::Index i = 0; i < M; ++i) loss += c.k(i, l) * q.x(i, l);
        G(M + l) = c.resources[l].growth(R(l)) - loss;
    }
    return G;
}

}  // namespace

FixedPoint refine_fixed_point(const ModelConfig& config, const FixedPoint& guess,
                              const RefineOptions& opts) {
    config.validate();
    const auto M = config.a.rows(), N = config.a.cols();
    if (guess.C.size() != M || guess.R.size() != N || !guess.C.allFinite() ||
        !guess.R.allFinite())
        throw DomainError("refine_fixed_point: guess has wrong shape or is not finite");
    const auto dc = derive_constants(config);

    // Already exact: hand it back untouched.
    if ((guess.C.array() >= 0.0).all() && (guess.R.array() >= 0.0).all() &&
        guess.components.c_free.size() == M) {
        try {
            if (rhs_residual(config, guess.components) <= opts.tolerance) {
                const double q =
                    qss_generic_numeric(guess.C, guess.R, config, dc).residual;
                const Vec G = slow_residual(config, dc, guess.C, guess.R,
                                            std::vector<bool>(M, false));
                if (G.cwiseAbs().maxCoeff() <= opts.tolerance && q <= 1e-8) {
                    FixedPoint fp = guess;
                    fp.method = FixedPointMethod::NewtonRefined;
                    fp.iterations = 0;
                    fp.rhs_residual = rhs_residual(config, guess.components);
                    return fp;
                }
            }
        } catch (const Error&) {
            // fall through to Newton
        }
    }

    Vec u(M + N);
    u << guess.C.cwiseMax(0.0), guess.R.cwiseMax(1e-12);
    std::vector<bool> frozen(M, false);
    for (Eigen::Index i = 0; i < M; ++i)
        if (u(i) < opts.extinct_below) {
            frozen[i] = true;
            u(i) = 0.0;
        }

    auto residual = [&](const Vec& v) {
        return slow_residual(config, dc, v.head(M), v.tail(N), frozen);
    };

    Vec G = residual(u);
    int it = 0;
    const double target = 0.1 * opts.tolerance;
    for (; it < opts.max_iterations && G.cwiseAbs().maxCoeff() > target; ++it) {
        Mat J(M + N, M + N);
        for (Eigen::Index j = 0; j < M + N; ++j) {
            const double h = 1e-7 * std::max(std::abs(u(j)), 1e-3);
            Vec up = u, um = u;
            up(j) += h;
            um(j) = std::max(0.0, um(j) - h);
            J.col(j) = (residual(up) - residual(um)) / (up(j) - um(j));
        }
        Eigen::FullPivLU<Mat> lu(J);
        Vec step = lu.solve(-G);
        if (!step.allFinite())
            throw ConvergenceError("refine_fixed_point: singular Jacobian",
                                   std::vector<double>(u.data(), u.data() + u.size()),
                                   G.norm());
        // Positivity: resources stay strictly positive, consumers may hit zero.
        double t = 1.0;
        for (Eigen::Index j = 0; j < M + N; ++j) {
            if (u(j) + step(j) < 0.0) {
                const double lim = j < M ? -u(j) / step(j) : -0.9 * u(j) / step(j);
                t = std::min(t, lim);
            }
        }
        const double g0 = G.norm();
        bool accepted = false;
        for (int ls = 0; ls < 30; ++ls, t *= 0.5) {
            Vec trial = (u + t * step).cwiseMax(0.0);
            const Vec Gt = residual(trial);
            if (Gt.norm() < (1.0 - 1e-4 * t) * g0 || ls == 29) {
                u = trial;
                G = Gt;
                accepted = Gt.norm() < g0;
                break;
            }
        }
        bool froze_any = false;
        for (Eigen::Index i = 0; i < M; ++i)
            if (!frozen[i] && u(i) < opts.extinct_below) {
                frozen[i] = true;
                u(i) = 0.0;
                froze_any = true;
            }
        if (froze_any) G = residual(u);
        if (!accepted && !froze_any && t < 1e-8)
            throw ConvergenceError("refine_fixed_point: line search stalled",
                                   std::vector<double>(u.data(), u.data() + u.size()),
                                   G.norm());
    }
    if (G.cwiseAbs().maxCoeff() > target)
        throw ConvergenceError("refine_fixed_point: no convergence",
                               std::vector<double>(u.data(), u.data() + u.size()),
                               G.cwiseAbs().maxCoeff());

    const Vec C = u.head(M), R = u.tail(N);
    // The residual tolerance is absolute, so a collapse towards the trivial state
    // also "converges". Anything far below the scale of the guess is extinct.
    const double floor = std::max(opts.extinct_below, 1e-6 * guess.C.cwiseAbs().maxCoeff());
    std::vector<std::size_t> extinct;
    for (Eigen::Index i = 0; i < M; ++i)
        if (frozen[i] || C(i) < floor) extinct.push_back(static_cast<std::size_t>(i));
    if (!extinct.empty()) {
        std::string msg = "refine_fixed_point: converged to a boundary with";
        for (auto i : extinct) msg += " C" + std::to_string(i + 1);
        msg += " = 0";
        throw BoundaryFixedPoint(msg, std::vector<double>(C.data(), C.data() + M),
                                 std::vector<double>(R.data(), R.data() + N), extinct);
    }
    FixedPoint fp = make_fixed_point(config, C, R, FixedPointMethod::NewtonRefined);
    fp.iterations = it;
    if (fp.rhs_residual > opts.tolerance)
        throw ConvergenceError("refine_fixed_point: full residual above tolerance",
                               std::vector<double>(u.data(), u.data() + u.size()),
                               fp.rhs_residual);
    return fp;
}

FixedPoint find_interior_fixed_point(const ModelConfig& config, const FixedPoint& guess,
                                     const RefineOptions& opts) {
    std::optional<BoundaryFixedPoint> first;
    auto attempt = [&](const Vec& C, const Vec& R) -> std::optional<FixedPoint> {
        FixedPoint g;
        g.C = C;
        g.R = R;
        try {
            return refine_fixed_point(config, g, opts);
        } catch (const BoundaryFixedPoint& e) {
            if (!first) first = e;
        } catch (const ConvergenceError&) {
        }
        return std::nullopt;
    };
    try {
        return refine_fixed_point(config, guess, opts);
    } catch (const BoundaryFixedPoint& e) {
        first = e;
    } catch (const ConvergenceError&) {
    }

    const auto M = guess.C.size();
    static constexpr double factors[] = {0.5, 0.8, 1.25, 2.0};
    static constexpr double r_factors[] = {1.0, 0.8, 1.25};
    if (M <= 3) {
        // Independent rescaling of every consumer.
        const int n = 1 << (2 * M);
        for (double rf : r_factors)
            for (int code = 0; code < n; ++code) {
                Vec C = guess.C;
                for (Eigen::Index i = 0; i < M; ++i) C(i) *= factors[(code >> (2 * i)) & 3];
                if (auto fp = attempt(C, guess.R * rf)) return *fp;
            }
    } else {
        for (double rf : r_factors)
            for (double f : factors)
                if (auto fp = attempt(guess.C * f, guess.R * rf)) return *fp;
    }
    if (first) throw *first;
    throw ConvergenceError("find_interior_fixed_point: no start converged",
                           std::vector<double>(guess.C.data(), guess.C.data() + M), 0.0);
}

}  // namespace crm
