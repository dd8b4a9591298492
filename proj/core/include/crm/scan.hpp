#pragma once

#include "crm/experiment.hpp"
#include "crm/ode.hpp"
#include "crm/steady_state.hpp"

#include <string>
#include <string_view>
#include <vector>

namespace crm {

enum class CellOutcome { StableCoexistence, OscillatoryCoexistence, Extinction, Undetermined };

std::string_view to_string(CellOutcome c) noexcept;

struct ScanOptions {
    double t_end = 1e5;           // ODE fallback horizon
    std::size_t samples = 4001;
    double window = 1e4;          // classify_outcome window
    IntegratorControls integrator;
    RefineOptions refine;
    OutcomeOptions outcome;
    Vec initial_C, initial_R;     // ODE start when no fixed point is available
    bool overlay_bound = false;
    unsigned threads = 0;
};

struct CellResult {
    double x1 = 0.0, x2 = 0.0;
    CellOutcome outcome = CellOutcome::Undetermined;
    std::string detail;
    double leading_real_part = 0.0;  // NaN when no interior fixed point was found
    double delta_bar = 0.0;          // NaN unless overlay_bound
};

struct ScanResult {
    std::array<ScanAxis, 2> axes;
    std::vector<CellResult> cells;  // axis 1 outer, axis 2 inner
    double t_end = 0.0, rel_tol = 0.0, abs_tol = 0.0, refine_tol = 0.0;

    const CellResult& at(std::size_t i1, std::size_t i2) const {
        return cells[i1 * axes[1].values().size() + i2];
    }
};

// Refine the interior fixed point, classify it, and integrate when it is not stable.
CellResult classify_cell(const ModelConfig& config, const ScanOptions& opts = {});

// ChasingIntra or ChasingIntraInter only. Per-cell errors mark the cell Undetermined.
ScanResult scan_coexistence(const ModelConfig& base, const std::array<ScanAxis, 2>& axes,
                            const ScanOptions& opts = {});

// Bisects `parameter` between a coexisting value `lo` and an excluding value `hi`.
double coexistence_boundary(const ModelConfig& base, std::string_view parameter, double lo,
                            double hi, const ScanOptions& opts = {}, double rel_tol = 1e-3);

struct RankEntry {
    std::size_t rank = 0;     // 1 = most abundant
    std::size_t species = 0;  // 0-based consumer index
    double abundance = 0.0;
};

// Descending abundance; survivors_only drops species at or below `threshold`.
std::vector<RankEntry> rank_abundance(const Vec& abundances, bool survivors_only = false,
                                      double threshold = 1e-3);

}  // namespace crm
