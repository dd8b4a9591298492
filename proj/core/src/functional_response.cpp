#include "crm/functional_response.hpp"

#include "crm/errors.hpp"
#include "crm/qss.hpp"

#include <cmath>
#include <ostream>

namespace crm {

namespace {

double half_saturation(double a, double d, double k) {
    if (!(a > 0.0)) throw DomainError("encounter rate a must be > 0");
    return (d + k) / a;
}

Response from_F(double F, double R) { return {F, R > 0.0 ? F / R : 0.0}; }

void require_positive_R(double R) {
    if (!(R > 0.0)) throw DomainError("functional responses require R > 0");
}

}  // namespace

Response fr_chasing(double R, double C, double a, double d, double k, FrOrder order) {
    require_positive_R(R);
    if (C < 0.0) throw DomainError("C must be >= 0");
    const double K = half_saturation(a, d, k);
    const double S = R + C + K;
    switch (order) {
        case FrOrder::Exact: {
            const double q = 4.0 * R * C / (S * S);
            // The discriminant is non-negative by AM-GM.
            const double disc = std::max(0.0, 1.0 - q);
            return from_F(k * 2.0 * R / (S * (1.0 + std::sqrt(disc))), R);
        }
        case FrOrder::QuasiRigorous:
            return from_F(k * R / S, R);
        case FrOrder::FirstOrder:
            return from_F(k * R / (S - R * C / S), R);
        case FrOrder::DiluteLimit:
            return from_F(k * R / (R + K), R);
    }
    throw DomainError("unknown order");
}

Response fr_intra(double R, double C, double a, double d, double k, double a_intra,
                  double d_intra, FrOrder order) {
    require_positive_R(R);
    if (C < 0.0) throw DomainError("C must be >= 0");
    const double K = half_saturation(a, d, k);
    if (a_intra > 0.0 && !(d_intra > 0.0)) throw DomainError("d' must be > 0");
    const double beta = a_intra > 0.0 ? a_intra / d_intra : 0.0;
    if (C == 0.0) {
        if (order == FrOrder::DiluteLimit && beta > 0.0) return from_F(0.0, R);
        return from_F(k * R / (R + K), R);
    }
    switch (order) {
        case FrOrder::Exact:
            return from_F(k * qss_intra_cubic(R, C, K, beta) / C, R);
        case FrOrder::QuasiRigorous:
            return from_F(k * qss_intra_approx(R, C, K, beta, IntraApprox::QuasiRigorous) / C, R);
        case FrOrder::FirstOrder:
            return from_F(k * qss_intra_approx(R, C, K, beta, IntraApprox::SmallBeta) / C, R);
        case FrOrder::DiluteLimit:
            return from_F(k * qss_intra_approx(R, C, K, beta, IntraApprox::LargeBeta) / C, R);
    }
    throw DomainError("unknown order");
}

PairResponse fr_inter(double R, double C1, double C2, double a1, double a2, double d1, double d2,
                      double k1, double k2, double gamma, FrOrder order) {
    require_positive_R(R);
    if (C1 < 0.0 || C2 < 0.0 || gamma < 0.0) throw DomainError("abundances and gamma must be >= 0");
    const double K1 = half_saturation(a1, d1, k1);
    const double K2 = half_saturation(a2, d2, k2);
    const double u1 = R / K1 + 1.0;
    const double u2 = R / K2 + 1.0;
    const double P = u1 * u2;
    PairResponse out;
    if (order == FrOrder::QuasiRigorous) {
        auto per_capita = [&](double Ci, double Cj, double uj, double Ki) {
            const double b = gamma * (Cj - Ci) + P;
            const double root = std::sqrt(b * b + 4.0 * gamma * Ci * P);
            return 2.0 * uj * (R / Ki) / (root + b);
        };
        out.F1 = k1 * per_capita(C1, C2, u2, K1);
        out.F2 = k2 * per_capita(C2, C1, u1, K2);
    } else if (order == FrOrder::FirstOrder) {
        const double S = gamma * (C1 + C2) + P;
        const double cross = gamma * gamma * K1 * K2 * C1 * C2 / S;
        out.F1 = k1 * R / ((R + K1) + gamma * K1 * K2 * C2 / (R + K2) - cross / (R + K2));
        out.F2 = k2 * R / ((R + K2) + gamma * K1 * K2 * C1 / (R + K1) - cross / (R + K1));
    } else {
        throw DomainError("interspecific responses exist only for QuasiRigorous and FirstOrder");
    }
    out.Xi1 = out.F1 / R;
    out.Xi2 = out.F2 / R;
    return out;
}

Response fr_beddington(double R, double C, const BdRates& r) {
    if (R < 0.0 || C < 0.0) throw DomainError("abundances must be >= 0");
    if (!(r.a > 0.0) || !(r.k > 0.0)) throw DomainError("B-D requires a > 0 and k > 0");
    double interference = 0.0;
    if (r.a_prime > 0.0) {
        if (!(r.d_prime > 0.0)) throw DomainError("B-D requires d' > 0");
        const double Cp = r.c_minus_one ? std::max(0.0, C - 1.0) : C;
        interference = r.a_prime / r.d_prime * Cp;
    }
    const double Xi = r.a / (1.0 + r.a * R / r.k + interference);
    return {Xi * R, Xi};
}

PairResponse fr_beddington_inter(double R, double C1, double C2, double a1, double a2, double k1,
                                 double k2, double a12, double d12) {
    if (!(a1 > 0.0 && a2 > 0.0 && k1 > 0.0 && k2 > 0.0)) throw DomainError("B-D requires a, k > 0");
    const double gamma = a12 > 0.0 ? a12 / d12 : 0.0;
    PairResponse out;
    out.Xi1 = a1 / (1.0 + a1 * R / k1 + gamma * C2);
    out.Xi2 = a2 / (1.0 + a2 * R / k2 + gamma * C1);
    out.F1 = out.Xi1 * R;
    out.F2 = out.Xi2 * R;
    return out;
}

namespace {

std::string order_tag(FrOrder o) { return std::to_string(static_cast<int>(o)); }

}  // namespace

FrEvaluator chasing_variant(double a, double d, double k, FrOrder order) {
    return {"CP" + order_tag(order),
            [=](double R, double C) { return fr_chasing(R, C, a, d, k, order); }};
}

FrEvaluator intra_variant(double a, double d, double k, double a_intra, double d_intra,
                          FrOrder order) {
    return {"A" + order_tag(order), [=](double R, double C) {
                return fr_intra(R, C, a, d, k, a_intra, d_intra, order);
            }};
}

FrEvaluator inter_variant(double a, double d, double k, double gamma, double own_abundance,
                          FrOrder order) {
    const int tag = order == FrOrder::QuasiRigorous ? 1 : 2;
    return {"I" + std::to_string(tag), [=](double R, double C) {
                const auto p = fr_inter(R, own_abundance, C, a, a, d, d, k, k, gamma, order);
                return Response{p.F1, p.Xi1};
            }};
}

FrEvaluator beddington_variant(const BdRates& rates) {
    return {"BD", [=](double R, double C) { return fr_beddington(R, C, rates); }};
}

FrEvaluator beddington_inter_variant(double a, double k, double a12, double d12,
                                     double own_abundance) {
    return {"BD", [=](double R, double C) {
                const auto p = fr_beddington_inter(R, own_abundance, C, a, a, k, k, a12, d12);
                return Response{p.F1, p.Xi1};
            }};
}

std::vector<double> logspace(double lo, double hi, std::size_t n) {
    if (!(lo > 0.0 && hi > 0.0)) throw DomainError("logspace bounds must be > 0");
    std::vector<double> out(n);
    if (n == 1) {
        out[0] = lo;
        return out;
    }
    const double a = std::log10(lo), b = std::log10(hi);
    for (std::size_t i = 0; i < n; ++i)
        out[i] = std::pow(10.0, a + (b - a) * static_cast<double>(i) / static_cast<double>(n - 1));
    return out;
}

FrSurface evaluate_surface(const FrEvaluator& ev, const std::vector<double>& r_grid,
                           const std::vector<double>& c_grid, FrQuantity q) {
    FrSurface s;
    s.r_grid = r_grid;
    s.c_grid = c_grid;
    s.variant = ev.name;
    s.values.resize(static_cast<Eigen::Index>(r_grid.size()),
                    static_cast<Eigen::Index>(c_grid.size()));
    for (std::size_t i = 0; i < r_grid.size(); ++i)
        for (std::size_t j = 0; j < c_grid.size(); ++j) {
            const auto r = ev.eval(r_grid[i], c_grid[j]);
            s.values(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
                q == FrQuantity::F ? r.F : r.Xi;
        }
    return s;
}

FrDiscrepancy fr_discrepancy_surface(const FrEvaluator& va, const FrEvaluator& vb,
                                     const std::vector<double>& r_grid,
                                     const std::vector<double>& c_grid, FrQuantity q) {
    const auto sa = evaluate_surface(va, r_grid, c_grid, q);
    const auto sb = evaluate_surface(vb, r_grid, c_grid, q);
    FrDiscrepancy out;
    out.absolute = sa;
    out.absolute.variant = va.name + "-" + vb.name + ":abs";
    out.absolute.values = (sa.values - sb.values).cwiseAbs();
    out.relative = out.absolute;
    out.relative.variant = va.name + "-" + vb.name + ":rel";
    for (Eigen::Index i = 0; i < sa.values.rows(); ++i)
        for (Eigen::Index j = 0; j < sa.values.cols(); ++j) {
            const double ref = std::abs(sb.values(i, j));
            const double diff = out.absolute.values(i, j);
            out.relative.values(i, j) = ref > 0.0 ? diff / ref : (diff > 0.0 ? INFINITY : 0.0);
        }
    out.max_absolute = out.absolute.values.size() ? out.absolute.values.maxCoeff() : 0.0;
    out.max_relative = out.relative.values.size() ? out.relative.values.maxCoeff() : 0.0;
    return out;
}

void write_surface_csv(std::ostream& os, const std::vector<FrSurface>& surfaces) {
    os << "R,C,value,variant\n";
    const auto old = os.precision(17);
    for (const auto& s : surfaces)
        for (std::size_t i = 0; i < s.r_grid.size(); ++i)
            for (std::size_t j = 0; j < s.c_grid.size(); ++j)
                os << s.r_grid[i] << ',' << s.c_grid[j] << ','
                   << s.values(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) << ','
                   << s.variant << '\n';
    os.precision(old);
}

}  // namespace crm
