#pragma once

#include "crm/ode.hpp"
#include "crm/steady_state.hpp"

#include <complex>
#include <optional>
#include <string_view>
#include <utility>
#include <vector>

namespace crm {

// Central differences, h_j = max(1e-6, 1e-6 |u_j|).
Mat jacobian_fd(const OdeSystem& sys, const Vec& u, double t = 0.0);

// Jacobian of the full right-hand side over the flat state (see StateLayout).
Mat jacobian_at(const ModelConfig& config, const FixedPoint& point);

enum class Stability { Stable, Unstable, Marginal };

std::string_view to_string(Stability s) noexcept;

struct StabilityReport {
    FixedPoint fixed_point;
    std::vector<std::complex<double>> eigenvalues;  // sorted by descending real part
    Stability classification = Stability::Marginal;
    double leading_real_part = 0.0;
};

Stability classify_eigenvalues(const std::vector<std::complex<double>>& ev,
                               double tol_marginal = 1e-7);
std::vector<std::complex<double>> eigenvalues_of(const Mat& J);

StabilityReport classify(const ModelConfig& config, const FixedPoint& point,
                         double tol_marginal = 1e-7);

struct HopfOptions {
    int resolution = 40;            // grid points for bracketing
    double bisection_rel_tol = 1e-6;
    int amplitude_points = 8;
    double amplitude_span = 0.1;    // samples at d'_c (1 + f), f in (0, span]
    double settle_time = 4e4;       // integration per amplitude sample
    std::size_t amplitude_consumer = 0;
    IntegratorControls integrator;  // tolerances for the attractor runs
    RefineOptions refine;
};

struct HopfResult {
    double d_prime_critical = 0.0;
    bool oscillatory_above = true;  // side of d'_c that carries the limit cycle
    std::vector<std::pair<double, double>> amplitude_samples;  // (d', amplitude)
    double fit_slope = 0.0;
    double fit_intercept = 0.0;
    double fit_r2 = 0.0;
};

// Sweeps the intraspecific separation rate d' (all species jointly).
// Throws NoCrossing if the leading real part keeps its sign over the range.
HopfResult hopf_scan(const ModelConfig& config, std::pair<double, double> d_prime_range,
                     const HopfOptions& opts = {});

// Leading real part at a given d', with the fixed point refined from the closed form
// (or from `seed` when given).
StabilityReport intra_point_at(const ModelConfig& config, double d_prime,
                               const FixedPoint* seed = nullptr,
                               const RefineOptions& refine = {});

struct LyapunovSpectrum {
    std::vector<double> exponents;  // descending
    double integration_time = 0.0;
    double renorm_interval = 0.0;
};

struct LyapunovOptions {
    double transient = 0.0;  // discarded before averaging starts
    IntegratorControls integrator;
};

// Tangent-space (Benettin) method with Jacobian-vector products by central differences.
LyapunovSpectrum lyapunov_spectrum(const OdeSystem& sys, const Vec& initial, double t_total,
                                   double renorm_dt, const LyapunovOptions& opts = {});
LyapunovSpectrum lyapunov_spectrum(const ModelConfig& config, const SystemState& initial,
                                   double t_total, double renorm_dt,
                                   const LyapunovOptions& opts = {});

enum class CrossingDirection { Increasing, Decreasing, Both };

struct SectionPlane {
    std::size_t component = 0;
    double value = 0.0;
    CrossingDirection direction = CrossingDirection::Increasing;
};

// Linear-interpolated crossings of a sampled path. Throws NoCrossing if there are none.
std::vector<Vec> poincare_section(const std::vector<double>& times, const std::vector<Vec>& path,
                                  const SectionPlane& plane);

// Totals [C_1..C_M, R_1..R_N] per sample.
std::vector<Vec> totals_path(const Trajectory& traj);

std::vector<Vec> poincare_section(const Trajectory& traj, const SectionPlane& plane);

struct SectionShape {
    double diameter = 0.0;         // max pairwise distance of crossings
    double orbit_size = 0.0;       // diameter of the sampled path
    double max_angular_gap = 0.0;  // radians, around the crossings' centroid
    double radius_spread = 0.0;    // (max r - min r) / mean r around the centroid
    std::size_t count = 0;
};

// Shape of crossings projected onto two coordinates.
SectionShape section_shape(const std::vector<Vec>& crossings, const std::vector<Vec>& path,
                           std::size_t u, std::size_t v);

}  // namespace crm
