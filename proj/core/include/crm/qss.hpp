#pragma once

#include "crm/model.hpp"

#include <string>
#include <utility>
#include <vector>

namespace crm {

struct QssSolution {
    Mat x;       // M x N
    Vec y;       // M
    Mat z;       // M x M symmetric
    Vec c_free;  // M
    Vec r_free;  // N
    double residual = 0.0;
    std::string branch;
    int iterations = 0;

    SystemState to_state(double t = 0.0) const;
};

struct CubicCoefficients {
    double phi0 = 0, phi1 = 0, phi2 = 0;
    double psi = 0, varphi = 0;
    double discriminant = 0;
};

// Smaller root of x^2 - (R+C+K)x + RC = 0.
double qss_chasing_quadratic(double R, double C, double K);

CubicCoefficients intra_cubic_coefficients(double R, double C, double K, double beta);

// Real roots of x^3 + phi2 x^2 + phi1 x + phi0, each polished by two Newton steps.
std::vector<double> real_cubic_roots(const CubicCoefficients& c);

double cubic_value(const CubicCoefficients& c, double x) noexcept;

double qss_intra_cubic(double R, double C, double K, double beta);

enum class IntraApprox { QuasiRigorous, SmallBeta, LargeBeta };

double qss_intra_approx(double R, double C, double K, double beta, IntraApprox variant);

std::pair<double, double> qss_inter_pair(double R, double C1, double C2, double K1, double K2,
                                         double gamma);

// First-order expansion of qss_inter_pair.
std::pair<double, double> qss_inter_pair_first_order(double R, double C1, double C2, double K1,
                                                     double K2, double gamma);

struct QssOptions {
    double tolerance = 1e-12;
    int max_iterations = 200;
};

// Full nonlinear fast equilibrium for totals C (M) and R (N).
QssSolution qss_generic_numeric(const Vec& C, const Vec& R, const ModelConfig& config,
                                const QssOptions& opts = {});
QssSolution qss_generic_numeric(const Vec& C, const Vec& R, const ModelConfig& config,
                                const DerivedConstants& dc, const QssOptions& opts = {});

}  // namespace crm
