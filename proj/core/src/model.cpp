#include "crm/model.hpp"

#include "crm/errors.hpp"

#include <cmath>
#include <sstream>

namespace crm {

bool has_intra(Scenario s) noexcept {
    return s == Scenario::ChasingIntra || s == Scenario::ChasingIntraInter;
}

bool has_inter(Scenario s) noexcept {
    return s == Scenario::ChasingInter || s == Scenario::ChasingIntraInter;
}

std::string_view to_string(Scenario s) noexcept {
    switch (s) {
        case Scenario::ChasingOnly: return "ChasingOnly";
        case Scenario::ChasingIntra: return "ChasingIntra";
        case Scenario::ChasingInter: return "ChasingInter";
        case Scenario::ChasingIntraInter: return "ChasingIntraInter";
    }
    return "?";
}

Scenario scenario_from_string(std::string_view name) {
    for (auto s : {Scenario::ChasingOnly, Scenario::ChasingIntra, Scenario::ChasingInter,
                   Scenario::ChasingIntraInter})
        if (to_string(s) == name) return s;
    throw InvalidConfig("unknown scenario '" + std::string(name) + "'");
}

std::string_view to_string(ResourceKind k) noexcept {
    return k == ResourceKind::Biotic ? "Biotic" : "Abiotic";
}

ResourceKind resource_kind_from_string(std::string_view name) {
    if (name == "Biotic" || name == "biotic") return ResourceKind::Biotic;
    if (name == "Abiotic" || name == "abiotic") return ResourceKind::Abiotic;
    throw InvalidConfig("unknown resource kind '" + std::string(name) + "'");
}

ModelConfig ModelConfig::zeros(Scenario s, std::size_t M, std::size_t N) {
    const auto m = static_cast<Eigen::Index>(M);
    const auto n = static_cast<Eigen::Index>(N);
    ModelConfig c;
    c.scenario = s;
    c.a = c.d = c.k = c.w = Mat::Zero(m, n);
    c.D = c.a_intra = c.d_intra = Vec::Zero(m);
    c.a_inter = c.d_inter = Mat::Zero(m, m);
    c.resources.assign(N, ResourceLaw{});
    return c;
}

namespace {

void fail(const std::string& field, const std::string& msg) {
    throw InvalidConfig(field + ": " + msg);
}

template <class Derived>
void require_nonneg(const Eigen::MatrixBase<Derived>& m, const char* field) {
    for (Eigen::Index i = 0; i < m.rows(); ++i)
        for (Eigen::Index j = 0; j < m.cols(); ++j) {
            const double v = m(i, j);
            if (!std::isfinite(v) || v < 0.0) {
                std::ostringstream os;
                os << "entry (" << i << "," << j << ") = " << v << " must be finite and >= 0";
                fail(field, os.str());
            }
        }
}

}  // namespace

void ModelConfig::validate() const {
    const auto M = D.size();
    const auto N = static_cast<Eigen::Index>(resources.size());
    if (M == 0) fail("M", "at least one consumer species required");
    if (N == 0) fail("N", "at least one resource species required");
    auto shape = [&](const Mat& m, Eigen::Index r, Eigen::Index c, const char* f) {
        if (m.rows() != r || m.cols() != c) {
            std::ostringstream os;
            os << "expected " << r << "x" << c << ", got " << m.rows() << "x" << m.cols();
            fail(f, os.str());
        }
    };
    shape(a, M, N, "a");
    shape(d, M, N, "d");
    shape(k, M, N, "k");
    shape(w, M, N, "w");
    shape(a_inter, M, M, "a_inter");
    shape(d_inter, M, M, "d_inter");
    if (a_intra.size() != M) fail("a_intra", "length must equal M");
    if (d_intra.size() != M) fail("d_intra", "length must equal M");

    require_nonneg(a, "a");
    require_nonneg(d, "d");
    require_nonneg(k, "k");
    require_nonneg(w, "w");
    require_nonneg(D, "D");
    require_nonneg(a_intra, "a_intra");
    require_nonneg(d_intra, "d_intra");
    require_nonneg(a_inter, "a_inter");
    require_nonneg(d_inter, "d_inter");

    for (Eigen::Index i = 0; i < M; ++i)
        for (Eigen::Index l = 0; l < N; ++l) {
            if (a(i, l) > 0.0) {
                if (!(k(i, l) > 0.0)) fail("k", "must be > 0 wherever a > 0");
                if (!(w(i, l) > 0.0 && w(i, l) <= 1.0)) fail("w", "must lie in (0,1] wherever a > 0");
            }
        }

    for (Eigen::Index i = 0; i < M; ++i) {
        if (a_intra(i) > 0.0 && !(d_intra(i) > 0.0))
            fail("d_intra", "must be > 0 wherever a_intra > 0");
        if (a_inter(i, i) != 0.0 || d_inter(i, i) != 0.0)
            fail("a_inter", "diagonal must be zero (use a_intra)");
        for (Eigen::Index j = 0; j < M; ++j) {
            if (a_inter(i, j) != a_inter(j, i)) fail("a_inter", "must be symmetric");
            if (d_inter(i, j) != d_inter(j, i)) fail("d_inter", "must be symmetric");
            if (i != j && a_inter(i, j) > 0.0 && !(d_inter(i, j) > 0.0))
                fail("d_inter", "must be > 0 wherever a_inter > 0");
        }
    }

    if (!has_intra(scenario) && a_intra.cwiseAbs().maxCoeff() > 0.0)
        fail("a_intra", std::string("must be zero for scenario ") + std::string(to_string(scenario)));
    if (!has_inter(scenario) && a_inter.cwiseAbs().maxCoeff() > 0.0)
        fail("a_inter", std::string("must be zero for scenario ") + std::string(to_string(scenario)));

    for (std::size_t l = 0; l < resources.size(); ++l) {
        const auto& r = resources[l];
        const std::string f = "resources[" + std::to_string(l) + "]";
        if (!(r.intrinsic_rate > 0.0) || !std::isfinite(r.intrinsic_rate))
            fail(f, "intrinsic_rate must be > 0");
        if (!(r.carrying_capacity > 0.0) || !std::isfinite(r.carrying_capacity))
            fail(f, "carrying_capacity must be > 0");
    }
}

DerivedConstants derive_constants(const ModelConfig& c) {
    const auto M = c.a.rows();
    const auto N = c.a.cols();
    DerivedConstants out;
    out.K = Mat::Zero(M, N);
    out.inv_K = Mat::Zero(M, N);
    out.alpha = Mat::Zero(M, N);
    out.beta = Vec::Zero(M);
    out.gamma = Mat::Zero(M, M);
    for (Eigen::Index i = 0; i < M; ++i) {
        for (Eigen::Index l = 0; l < N; ++l) {
            const double dk = c.d(i, l) + c.k(i, l);
            if (c.a(i, l) > 0.0) {
                out.K(i, l) = dk / c.a(i, l);
                out.inv_K(i, l) = dk > 0.0 ? c.a(i, l) / dk : 0.0;
            } else if (dk > 0.0) {
                throw InvalidConfig("a(" + std::to_string(i) + "," + std::to_string(l) +
                                    ") = 0 with d+k > 0: K undefined");
            }
            const double wk = c.w(i, l) * c.k(i, l);
            if (wk > 0.0) out.alpha(i, l) = c.D(i) / wk;
        }
        if (c.a_intra(i) > 0.0) {
            if (!(c.d_intra(i) > 0.0)) throw InvalidConfig("d_intra must be > 0 where a_intra > 0");
            out.beta(i) = c.a_intra(i) / c.d_intra(i);
        }
        for (Eigen::Index j = 0; j < M; ++j) {
            if (i == j || !(c.a_inter(i, j) > 0.0)) continue;
            if (!(c.d_inter(i, j) > 0.0)) throw InvalidConfig("d_inter must be > 0 where a_inter > 0");
            out.gamma(i, j) = c.a_inter(i, j) / c.d_inter(i, j);
        }
    }
    return out;
}

SystemState SystemState::zeros(std::size_t M, std::size_t N) {
    const auto m = static_cast<Eigen::Index>(M);
    const auto n = static_cast<Eigen::Index>(N);
    SystemState s;
    s.c_free = Vec::Zero(m);
    s.r_free = Vec::Zero(n);
    s.x = Mat::Zero(m, n);
    s.y = Vec::Zero(m);
    s.z = Mat::Zero(m, m);
    return s;
}

SystemState SystemState::from_totals(const Vec& C, const Vec& R, double t) {
    auto s = zeros(static_cast<std::size_t>(C.size()), static_cast<std::size_t>(R.size()));
    s.c_free = C;
    s.r_free = R;
    s.t = t;
    return s;
}

double SystemState::consumer_total(std::size_t i) const {
    const auto ii = static_cast<Eigen::Index>(i);
    double total = c_free(ii) + x.row(ii).sum() + 2.0 * y(ii);
    for (Eigen::Index j = 0; j < z.cols(); ++j)
        if (j != ii) total += z(ii, j);
    return total;
}

double SystemState::resource_total(std::size_t l) const {
    const auto ll = static_cast<Eigen::Index>(l);
    return r_free(ll) + x.col(ll).sum();
}

Vec SystemState::consumer_totals() const {
    Vec C(c_free.size());
    for (Eigen::Index i = 0; i < C.size(); ++i) C(i) = consumer_total(static_cast<std::size_t>(i));
    return C;
}

Vec SystemState::resource_totals() const {
    Vec R(r_free.size());
    for (Eigen::Index l = 0; l < R.size(); ++l) R(l) = resource_total(static_cast<std::size_t>(l));
    return R;
}

StateLayout::StateLayout(Scenario s, std::size_t M, std::size_t N)
    : M_(M), N_(N), intra_(has_intra(s)), inter_(has_inter(s)) {
    y_off_ = M_ + N_ + M_ * N_;
    z_off_ = y_off_ + (intra_ ? M_ : 0);
    size_ = z_off_ + (inter_ ? M_ * (M_ - 1) / 2 : 0);
}

StateLayout::StateLayout(const ModelConfig& config)
    : StateLayout(config.scenario, config.consumers(), config.resource_count()) {}

std::size_t StateLayout::z(std::size_t i, std::size_t j) const noexcept {
    if (i > j) std::swap(i, j);
    // Row-major upper triangle without the diagonal.
    return z_off_ + i * (2 * M_ - i - 1) / 2 + (j - i - 1);
}

Vec StateLayout::pack(const SystemState& s) const {
    Vec u = Vec::Zero(static_cast<Eigen::Index>(size_));
    for (std::size_t i = 0; i < M_; ++i) u(c_free(i)) = s.c_free(i);
    for (std::size_t l = 0; l < N_; ++l) u(r_free(l)) = s.r_free(l);
    for (std::size_t i = 0; i < M_; ++i)
        for (std::size_t l = 0; l < N_; ++l) u(x(i, l)) = s.x(i, l);
    if (intra_)
        for (std::size_t i = 0; i < M_; ++i) u(y(i)) = s.y(i);
    if (inter_)
        for (std::size_t i = 0; i < M_; ++i)
            for (std::size_t j = i + 1; j < M_; ++j) u(z(i, j)) = s.z(i, j);
    return u;
}

SystemState StateLayout::unpack(const Vec& u, double t) const { return unpack(u.data(), t); }

SystemState StateLayout::unpack(const double* u, double t) const {
    auto s = SystemState::zeros(M_, N_);
    s.t = t;
    for (std::size_t i = 0; i < M_; ++i) s.c_free(i) = u[c_free(i)];
    for (std::size_t l = 0; l < N_; ++l) s.r_free(l) = u[r_free(l)];
    for (std::size_t i = 0; i < M_; ++i)
        for (std::size_t l = 0; l < N_; ++l) s.x(i, l) = u[x(i, l)];
    if (intra_)
        for (std::size_t i = 0; i < M_; ++i) s.y(i) = u[y(i)];
    if (inter_)
        for (std::size_t i = 0; i < M_; ++i)
            for (std::size_t j = i + 1; j < M_; ++j) s.z(i, j) = s.z(j, i) = u[z(i, j)];
    return s;
}

Vec StateLayout::consumer_totals(const double* u) const {
    Vec C(static_cast<Eigen::Index>(M_));
    for (std::size_t i = 0; i < M_; ++i) {
        double c = u[c_free(i)];
        for (std::size_t l = 0; l < N_; ++l) c += u[x(i, l)];
        if (intra_) c += 2.0 * u[y(i)];
        if (inter_)
            for (std::size_t j = 0; j < M_; ++j)
                if (j != i) c += u[z(i, j)];
        C(static_cast<Eigen::Index>(i)) = c;
    }
    return C;
}

Vec StateLayout::resource_totals(const double* u) const {
    Vec R(static_cast<Eigen::Index>(N_));
    for (std::size_t l = 0; l < N_; ++l) {
        double r = u[r_free(l)];
        for (std::size_t i = 0; i < M_; ++i) r += u[x(i, l)];
        R(static_cast<Eigen::Index>(l)) = r;
    }
    return R;
}

std::vector<std::string> StateLayout::component_names() const {
    std::vector<std::string> names(size_);
    for (std::size_t i = 0; i < M_; ++i) names[c_free(i)] = "CF" + std::to_string(i + 1);
    for (std::size_t l = 0; l < N_; ++l) names[r_free(l)] = "RF" + std::to_string(l + 1);
    for (std::size_t i = 0; i < M_; ++i)
        for (std::size_t l = 0; l < N_; ++l)
            names[x(i, l)] = "x" + std::to_string(i + 1) + "_" + std::to_string(l + 1);
    if (intra_)
        for (std::size_t i = 0; i < M_; ++i) names[y(i)] = "y" + std::to_string(i + 1);
    if (inter_)
        for (std::size_t i = 0; i < M_; ++i)
            for (std::size_t j = i + 1; j < M_; ++j)
                names[z(i, j)] = "z" + std::to_string(i + 1) + "_" + std::to_string(j + 1);
    return names;
}

void KineticGeometry::validate() const {
    if (!(L > 0.0)) throw InvalidConfig("geometry.L must be > 0");
    const auto M = v_c.size();
    const auto N = v_r.size();
    if (r_chase.rows() != M || r_chase.cols() != N)
        throw InvalidConfig("geometry.r_chase must be M x N");
    if (r_intra.size() != M) throw InvalidConfig("geometry.r_intra must have length M");
    if (r_inter.rows() != M || r_inter.cols() != M)
        throw InvalidConfig("geometry.r_inter must be M x M");
    if ((v_c.array() < 0.0).any() || (v_r.array() < 0.0).any())
        throw InvalidConfig("geometry speeds must be >= 0");
    auto radius_ok = [&](double r) { return r > 0.0 && r < L / 2.0; };
    for (Eigen::Index i = 0; i < M; ++i) {
        for (Eigen::Index l = 0; l < N; ++l)
            if (!radius_ok(r_chase(i, l))) throw InvalidConfig("geometry.r_chase must lie in (0, L/2)");
        if (!radius_ok(r_intra(i))) throw InvalidConfig("geometry.r_intra must lie in (0, L/2)");
        for (Eigen::Index j = 0; j < M; ++j)
            if (i != j && !radius_ok(r_inter(i, j)))
                throw InvalidConfig("geometry.r_inter must lie in (0, L/2)");
    }
}

MeanFieldRates mean_field_rates(const KineticGeometry& g) {
    g.validate();
    const auto M = g.v_c.size();
    const auto N = g.v_r.size();
    const double inv_area = 1.0 / (g.L * g.L);
    MeanFieldRates out;
    out.a = Mat::Zero(M, N);
    out.a_intra = Vec::Zero(M);
    out.a_inter = Mat::Zero(M, M);
    for (Eigen::Index i = 0; i < M; ++i) {
        for (Eigen::Index l = 0; l < N; ++l)
            out.a(i, l) = 2.0 * g.r_chase(i, l) * inv_area * std::hypot(g.v_c(i), g.v_r(l));
        out.a_intra(i) = 2.0 * std::sqrt(2.0) * g.v_c(i) * g.r_intra(i) * inv_area;
        for (Eigen::Index j = 0; j < M; ++j)
            if (i != j)
                out.a_inter(i, j) = 2.0 * g.r_inter(i, j) * inv_area * std::hypot(g.v_c(i), g.v_c(j));
    }
    return out;
}

}  // namespace crm
