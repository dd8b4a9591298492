#pragma once

#include "crm/ibm.hpp"
#include "crm/model.hpp"

#include <array>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace crm {

enum class Engine { Ode, Ssa, Ibm, Analytic, Stability, Hopf, Lyapunov, FrSurface, Scan };

std::string_view to_string(Engine e) noexcept;
Engine engine_from_string(std::string_view name);

struct RunControls {
    double t_end = 1e5;
    std::size_t samples = 1001;   // uniform output grid including both ends
    double rel_tol = 1e-8;
    double abs_tol = 1e-10;
    double extinction_threshold = 1e-3;
    double window = 0.0;          // outcome window; 0 = t_end / 10
    std::uint64_t seed = 1;
    std::size_t runs = 1;         // SSA seeds seed, seed+1, ...
    unsigned threads = 0;         // 0 = hardware concurrency
};

struct HopfControls {
    double lo = 0.0, hi = 0.0;    // d' range
    int resolution = 40;
    int points = 8;
    double span = 0.1;
    double settle_time = 4e4;
};

struct LyapunovControls {
    double t_total = 2e5;
    double renorm_dt = 10.0;
    double transient = 5e4;
    double section_time = 2e5;    // Poincare run after the transient
};

// Functional-response surface over (R, C).
struct SurfaceControls {
    std::string family = "chasing";     // chasing | intra | inter
    std::vector<int> orders{1, 2, 3, 4};
    bool include_bd = true;
    std::array<double, 2> r_range{1e-2, 1e4};
    std::array<double, 2> c_range{1e-2, 1e4};
    std::size_t points = 41;
    bool searching_efficiency = true;   // Xi, otherwise F
    double own_abundance = 1.0;         // inter family: fixed C_1
};

struct ScanAxis {
    std::string parameter;
    double lo = 0.0, hi = 0.0;
    std::size_t points = 11;
    bool log = false;

    std::vector<double> values() const;
};

struct ScanControls {
    std::array<ScanAxis, 2> axes;
    bool overlay_bound = false;
};

struct IbmSetup {
    IbmParams params;
    std::array<std::size_t, 2> consumers{0, 0};
    std::size_t resources = 0;
    double sample_dt = 10.0;
};

struct ExperimentSpec {
    std::string name;
    std::string description;
    Engine engine = Engine::Ode;
    ModelConfig config;
    Vec initial_C;   // totals; empty = engine default
    Vec initial_R;
    RunControls run;
    std::optional<HopfControls> hopf;
    std::optional<LyapunovControls> lyapunov;
    std::optional<SurfaceControls> surface;
    std::optional<ScanControls> scan;
    std::optional<IbmSetup> ibm;
    std::filesystem::path output_dir;  // empty = <output root>/<name>
};

// Throws InvalidConfig naming the offending field.
void validate(const ExperimentSpec& spec);

// Names accepted by set_parameter: delta (D_1 = D_2 (1 + v), M = 2), D1..DM,
// a, d, k, w (every channel), a_intra, d_intra (every species), a_inter, d_inter
// (every off-diagonal pair), K0, rate (every resource).
bool is_parameter(std::string_view name, const ModelConfig& config);
void set_parameter(ModelConfig& config, std::string_view name, double value);
double get_parameter(const ModelConfig& config, std::string_view name);

struct RunSummary {
    std::filesystem::path directory;
    std::vector<std::filesystem::path> files;
    double wall_seconds = 0.0;
};

// Dispatches to the engine and writes CSV/JSON outputs plus manifest.json.
RunSummary run_experiment(const ExperimentSpec& spec);

// Default output root: $CRM_OUTPUT_ROOT, else ./crm-out.
std::filesystem::path default_output_root();

}  // namespace crm
