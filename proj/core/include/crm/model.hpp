#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace crm {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

enum class Scenario { ChasingOnly, ChasingIntra, ChasingInter, ChasingIntraInter };

bool has_intra(Scenario s) noexcept;
bool has_inter(Scenario s) noexcept;
std::string_view to_string(Scenario s) noexcept;
Scenario scenario_from_string(std::string_view name);

enum class ResourceKind { Biotic, Abiotic };

std::string_view to_string(ResourceKind k) noexcept;
ResourceKind resource_kind_from_string(std::string_view name);

struct ResourceLaw {
    ResourceKind kind = ResourceKind::Biotic;
    double intrinsic_rate = 0.0;      // R0 (biotic) or Ra (abiotic)
    double carrying_capacity = 0.0;   // K0

    // Net intrinsic production at total abundance R.
    double growth(double R) const noexcept {
        const double logistic = 1.0 - R / carrying_capacity;
        return kind == ResourceKind::Biotic ? intrinsic_rate * R * logistic
                                            : intrinsic_rate * logistic;
    }
};

// Dense parameterization. Absent channels carry zeros.
struct ModelConfig {
    Scenario scenario = Scenario::ChasingOnly;
    Mat a, d, k, w;       // M x N
    Vec D;                // M
    Vec a_intra, d_intra; // M
    Mat a_inter, d_inter; // M x M, symmetric, zero diagonal
    std::vector<ResourceLaw> resources;

    std::size_t consumers() const noexcept { return static_cast<std::size_t>(D.size()); }
    std::size_t resource_count() const noexcept { return resources.size(); }

    // Zero-filled config of the given shape.
    static ModelConfig zeros(Scenario s, std::size_t M, std::size_t N);

    // Throws InvalidConfig describing the first violated invariant.
    void validate() const;
};

struct DerivedConstants {
    Mat K;       // (d+k)/a
    Mat inv_K;   // a/(d+k); finite even when K is not
    Mat alpha;   // D/(w k)
    Vec beta;    // a'/d'
    Mat gamma;   // a'_ij/d'_ij
};

DerivedConstants derive_constants(const ModelConfig& config);

struct SystemState {
    Vec c_free;  // M
    Vec r_free;  // N
    Mat x;       // M x N
    Vec y;       // M
    Mat z;       // M x M symmetric, zero diagonal
    double t = 0.0;

    static SystemState zeros(std::size_t M, std::size_t N);
    // All individuals free.
    static SystemState from_totals(const Vec& C, const Vec& R, double t = 0.0);

    std::size_t consumers() const noexcept { return static_cast<std::size_t>(c_free.size()); }
    std::size_t resource_count() const noexcept { return static_cast<std::size_t>(r_free.size()); }

    double consumer_total(std::size_t i) const;
    double resource_total(std::size_t l) const;
    Vec consumer_totals() const;
    Vec resource_totals() const;
};

// Maps a SystemState onto a flat vector: [c_free | r_free | x (row-major) | y | z (i<j)].
// y and z are present only for scenarios that carry them.
class StateLayout {
public:
    StateLayout() = default;
    StateLayout(Scenario s, std::size_t M, std::size_t N);
    explicit StateLayout(const ModelConfig& config);

    std::size_t M() const noexcept { return M_; }
    std::size_t N() const noexcept { return N_; }
    bool intra() const noexcept { return intra_; }
    bool inter() const noexcept { return inter_; }
    std::size_t size() const noexcept { return size_; }

    std::size_t c_free(std::size_t i) const noexcept { return i; }
    std::size_t r_free(std::size_t l) const noexcept { return M_ + l; }
    std::size_t x(std::size_t i, std::size_t l) const noexcept { return M_ + N_ + i * N_ + l; }
    std::size_t y(std::size_t i) const noexcept { return y_off_ + i; }
    // Requires i != j.
    std::size_t z(std::size_t i, std::size_t j) const noexcept;

    Vec pack(const SystemState& s) const;
    SystemState unpack(const Vec& u, double t = 0.0) const;
    SystemState unpack(const double* u, double t = 0.0) const;

    Vec consumer_totals(const double* u) const;
    Vec resource_totals(const double* u) const;
    std::vector<std::string> component_names() const;

private:
    std::size_t M_ = 0, N_ = 0;
    bool intra_ = false, inter_ = false;
    std::size_t y_off_ = 0, z_off_ = 0, size_ = 0;
};

struct KineticGeometry {
    double L = 0.0;
    Vec v_c;        // M
    Vec v_r;        // N
    Mat r_chase;    // M x N
    Vec r_intra;    // M
    Mat r_inter;    // M x M

    void validate() const;
};

struct MeanFieldRates {
    Mat a;        // M x N
    Vec a_intra;  // M
    Mat a_inter;  // M x M, zero diagonal
};

MeanFieldRates mean_field_rates(const KineticGeometry& geom);

}  // namespace crm
