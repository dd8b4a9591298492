#pragma once

#include "crm/model.hpp"

#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

namespace crm {

// Subscript of the closed form: 1 exact, 2 quasi-rigorous, 3 first order, 4 dilute.
// For the intraspecific family order 4 is the large-beta expansion, and the
// interspecific family only has orders 2 (quasi-rigorous) and 3 (first order).
enum class FrOrder { Exact = 1, QuasiRigorous = 2, FirstOrder = 3, DiluteLimit = 4 };

struct Response {
    double F = 0.0;
    double Xi = 0.0;
};

struct PairResponse {
    double F1 = 0.0, F2 = 0.0;
    double Xi1 = 0.0, Xi2 = 0.0;
};

Response fr_chasing(double R, double C, double a, double d, double k, FrOrder order);

Response fr_intra(double R, double C, double a, double d, double k, double a_intra,
                  double d_intra, FrOrder order);

PairResponse fr_inter(double R, double C1, double C2, double a1, double a2, double d1, double d2,
                      double k1, double k2, double gamma, FrOrder order);

struct BdRates {
    double a = 0.0;
    double k = 0.0;
    double a_prime = 0.0;  // zero for the chasing-only form
    double d_prime = 1.0;
    bool c_minus_one = false;  // use C-1 instead of C in the interference term
};

// Single consumer species; handling time 1/k, wasting time 1/d'.
Response fr_beddington(double R, double C, const BdRates& rates);

PairResponse fr_beddington_inter(double R, double C1, double C2, double a1, double a2, double k1,
                                 double k2, double a12, double d12);

struct FrEvaluator {
    std::string name;
    std::function<Response(double R, double C)> eval;
};

FrEvaluator chasing_variant(double a, double d, double k, FrOrder order);
FrEvaluator intra_variant(double a, double d, double k, double a_intra, double d_intra,
                          FrOrder order);
// Species 1 response with its own abundance fixed; the C axis is the opposite species.
FrEvaluator inter_variant(double a, double d, double k, double gamma, double own_abundance,
                          FrOrder order);
FrEvaluator beddington_variant(const BdRates& rates);
FrEvaluator beddington_inter_variant(double a, double k, double a12, double d12,
                                     double own_abundance);

enum class FrQuantity { F, Xi };

struct FrSurface {
    std::vector<double> r_grid;
    std::vector<double> c_grid;
    Mat values;  // rows follow r_grid, columns follow c_grid
    std::string variant;
};

std::vector<double> logspace(double lo, double hi, std::size_t n);

FrSurface evaluate_surface(const FrEvaluator& ev, const std::vector<double>& r_grid,
                           const std::vector<double>& c_grid, FrQuantity q = FrQuantity::Xi);

struct FrDiscrepancy {
    FrSurface absolute;
    FrSurface relative;  // relative to variant_b
    double max_absolute = 0.0;
    double max_relative = 0.0;
};

FrDiscrepancy fr_discrepancy_surface(const FrEvaluator& variant_a, const FrEvaluator& variant_b,
                                     const std::vector<double>& r_grid,
                                     const std::vector<double>& c_grid,
                                     FrQuantity q = FrQuantity::Xi);

// Long format: R,C,value,variant
void write_surface_csv(std::ostream& os, const std::vector<FrSurface>& surfaces);

}  // namespace crm
