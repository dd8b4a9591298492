#pragma once

#include "crm/model.hpp"

#include <string_view>

namespace crm {

enum class FixedPointMethod { ClosedFormDilute, MatrixSolve, NewtonRefined };

std::string_view to_string(FixedPointMethod m) noexcept;

struct FixedPoint {
    Vec C;                    // consumer totals
    Vec R;                    // resource totals
    SystemState components;   // free pools and pairs at QSS
    FixedPointMethod method = FixedPointMethod::ClosedFormDilute;
    double qss_residual = 0.0;
    double rhs_residual = 0.0;   // max |f| of the full right-hand side
    double regime_ratio = 0.0;   // min_l R_l / sum_i C_i; >= 100 is the dilute regime
    int iterations = 0;
};

struct CoexistenceBound {
    double delta_sup = 0.0;
    ResourceKind resource_kind = ResourceKind::Biotic;
};

// Closed forms below assume R^F ~ R. All throw InfeasibleRegime naming the species
// driven non-positive.

// M = 2, N = 1, ChasingIntra.
FixedPoint analytic_intra_2x1(const ModelConfig& config);

// Species 1 and 2 identical except D; uses species 2 as the reference.
CoexistenceBound coexistence_delta_sup(const ModelConfig& config);

// General M x N, all resources biotic. A R = B by LU.
FixedPoint analytic_general_biotic(const ModelConfig& config);

// General M x N, all resources abiotic. N = 1 explicit; N > 1 damped Newton.
FixedPoint analytic_general_abiotic(const ModelConfig& config);

// M = 2, N = 1, ChasingInter.
FixedPoint analytic_inter_2x1(const ModelConfig& config);

// M = 2, N = 1, ChasingIntraInter. Throws SingularSystem when 4 b1 b2 = g^2.
FixedPoint analytic_both_2x1(const ModelConfig& config);

// Builds a FixedPoint from totals: components from the numeric fast equilibrium,
// residuals from the full right-hand side.
FixedPoint make_fixed_point(const ModelConfig& config, const Vec& C, const Vec& R,
                            FixedPointMethod method);

struct RefineOptions {
    double tolerance = 1e-9;     // on max |f| of the full right-hand side
    int max_iterations = 100;
    double extinct_below = 1e-9; // consumer totals frozen at zero below this
};

// Newton on the slow totals (C, R) with pairs slaved to their fast equilibrium.
// Throws BoundaryFixedPoint if the iteration settles with some C_i = 0.
FixedPoint refine_fixed_point(const ModelConfig& config, const FixedPoint& guess,
                              const RefineOptions& opts = {});

// refine_fixed_point from the guess, then from rescaled copies of it, returning the
// first interior point. Throws the first BoundaryFixedPoint seen if none is found.
FixedPoint find_interior_fixed_point(const ModelConfig& config, const FixedPoint& guess,
                                     const RefineOptions& opts = {});

// Max |f| of the full right-hand side at a state.
double rhs_residual(const ModelConfig& config, const SystemState& s);

}  // namespace crm
