#pragma once

#include "crm/model.hpp"

#include <functional>
#include <iosfwd>
#include <limits>
#include <string>
#include <vector>

namespace crm {

// du = f(t, u); u and du have length dim.
using OdeFunction = std::function<void(double t, const double* u, double* du)>;

struct OdeSystem {
    std::size_t dim = 0;
    OdeFunction f;
};

// Right-hand side over the flat (free pools + pairs) state of a model.
class ModelRhs {
public:
    explicit ModelRhs(ModelConfig config);

    void operator()(double t, const double* u, double* du) const;

    const ModelConfig& config() const noexcept { return config_; }
    const StateLayout& layout() const noexcept { return layout_; }
    std::size_t dim() const noexcept { return layout_.size(); }

    SystemState derivative(const SystemState& s) const;
    OdeSystem system() const;

private:
    ModelConfig config_;
    StateLayout layout_;
    Mat kd_;  // k + d
    Mat wk_;  // w * k
};

ModelRhs build_rhs(const ModelConfig& config);

enum class EventKind { ExtinctionBelowThreshold, SteadyStateReached, NegativityClipped, Stopped };

std::string_view to_string(EventKind k) noexcept;

struct Event {
    double time = 0.0;
    int species = -1;  // consumer index, or component index for clipping events
    EventKind kind = EventKind::Stopped;
};

struct IntegratorControls {
    double rel_tol = 1e-8;
    double abs_tol = 1e-10;
    double initial_step = 0.0;  // 0 selects automatically
    double max_step = std::numeric_limits<double>::infinity();
    std::size_t max_steps = 200'000'000;
    std::vector<double> sample_times;  // dense output; empty records only the endpoints
    bool record_every_step = false;
    bool clip_negative = true;
    double extinction_threshold = 1e-3;
    bool stop_at_steady_state = false;
    double steady_state_tol = 1e-12;  // max |f| relative to max(1, max |u|)
    // Called after every accepted step; returning false ends the run.
    std::function<bool(double t, const double* u)> on_step;
};

std::vector<double> uniform_samples(double t0, double t_end, std::size_t n);

struct IntegratorStats {
    std::size_t accepted = 0;
    std::size_t rejected = 0;
    std::size_t evaluations = 0;
    double last_step = 0.0;
};

struct FlatTrajectory {
    std::vector<double> times;
    std::vector<Vec> states;
    std::vector<Event> events;
    IntegratorStats stats;
    double end_time = 0.0;
    Vec end_state;
};

// Adaptive Dormand-Prince 5(4) with fourth-order dense output.
FlatTrajectory integrate(const OdeSystem& sys, const Vec& u0, double t0, double t_end,
                         const IntegratorControls& controls = {});

struct Trajectory {
    StateLayout layout;
    std::vector<double> times;
    std::vector<Vec> data;  // flat states, see StateLayout
    std::vector<Event> events;
    IntegratorStats stats;

    std::size_t size() const noexcept { return times.size(); }
    SystemState state(std::size_t k) const { return layout.unpack(data[k], times[k]); }
    SystemState final_state() const { return state(size() - 1); }
    Vec consumer_totals(std::size_t k) const { return layout.consumer_totals(data[k].data()); }
    Vec resource_totals(std::size_t k) const { return layout.resource_totals(data[k].data()); }
};

// Extinction events are logged for consumer totals crossing controls.extinction_threshold.
Trajectory integrate(const ModelRhs& rhs, const SystemState& initial, double t_end,
                     const IntegratorControls& controls = {});

// Long format: time,species,value with species C1..CM, R1..RN.
void write_trajectory_csv(std::ostream& os, const Trajectory& traj);

enum class ConsumerFate { Persists, Extinct };
enum class DynamicsClass { StableFixedPoint, LimitCycle, QuasiPeriodic, Undetermined };

std::string_view to_string(ConsumerFate f) noexcept;
std::string_view to_string(DynamicsClass d) noexcept;

struct OutcomeOptions {
    double extinction_threshold = 1e-3;
    double fixed_point_tol = 1e-4;   // relative peak-to-peak in the tail
    double amplitude_drift = 0.01;   // limit-cycle amplitude stationarity
    double peak_fraction = 0.1;      // spectral peaks above this share of the maximum
};

struct OutcomeClass {
    std::vector<ConsumerFate> fates;
    DynamicsClass dynamics = DynamicsClass::Undetermined;
    double relative_oscillation = 0.0;
    double amplitude_drift = 0.0;
    std::vector<double> frequencies;  // detected spectral peaks, cycles per unit time
};

// Uses the last 2*window of the trajectory; needs uniform sampling over that span.
OutcomeClass classify_outcome(const Trajectory& traj, double window,
                              const OutcomeOptions& opts = {});

}  // namespace crm
