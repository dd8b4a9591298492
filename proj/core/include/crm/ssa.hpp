#pragma once

#include "crm/model.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace crm {

enum class ReactionKind {
    Encounter,      // C_i^F + R_l^F -> x_il
    Escape,         // x_il -> C_i^F + R_l^F
    Capture,        // x_il -> C_i^F (+ one C_i^F with probability w_il)
    IntraForm,      // 2 C_i^F -> y_i
    IntraSplit,     // y_i -> 2 C_i^F
    InterForm,      // C_i^F + C_j^F -> z_ij
    InterSplit,     // z_ij -> C_i^F + C_j^F
    Death,          // one C_i individual, free or paired
    ResourceBirth,  // biotic: R0 R
    ResourceDeath,  // biotic: R0 R^2 / K0, free resources only
    ResourceInflux, // abiotic: Ra
    ResourceDecay,  // abiotic: Ra R / K0, free resources only
};

std::string_view to_string(ReactionKind k) noexcept;

struct Reaction {
    ReactionKind kind;
    std::size_t i = 0, j = 0, l = 0;
    double rate = 0.0;
    // Deterministic part of the state change (flat indices, see StateLayout).
    std::vector<std::pair<std::size_t, int>> stoichiometry;
    // Flat indices the propensity reads.
    std::vector<std::size_t> reads;
    // Flat indices a firing may change (superset of stoichiometry for side effects).
    std::vector<std::size_t> writes;
};

using Counts = std::vector<std::int64_t>;

class ReactionNetwork {
public:
    explicit ReactionNetwork(const ModelConfig& config);

    const StateLayout& layout() const noexcept { return layout_; }
    const ModelConfig& config() const noexcept { return config_; }
    const std::vector<Reaction>& reactions() const noexcept { return reactions_; }
    // Reactions whose propensity reads a given flat index.
    const std::vector<std::size_t>& dependents(std::size_t species) const {
        return dependents_[species];
    }
    // Reactions whose propensity may change when reaction r fires (r included).
    const std::vector<std::size_t>& affected(std::size_t r) const { return affected_[r]; }

    double propensity(std::size_t r, const Counts& n) const;
    double total_propensity(const Counts& n) const;

    std::int64_t consumer_total(const Counts& n, std::size_t i) const;
    std::int64_t resource_total(const Counts& n, std::size_t l) const;

    // All individuals free, totals rounded to the nearest integer.
    Counts from_totals(const Vec& C, const Vec& R) const;

private:
    ModelConfig config_;
    StateLayout layout_;
    std::vector<Reaction> reactions_;
    std::vector<std::vector<std::size_t>> dependents_;
    std::vector<std::vector<std::size_t>> affected_;
};

ReactionNetwork build_reactions(const ModelConfig& config);

struct SsaOptions {
    std::vector<double> sample_times;  // counts recorded at these times
    bool stop_on_extinction = false;   // end once any consumer total reaches 0
    std::uint64_t max_events = 0;      // 0 = unlimited
    bool check_bookkeeping = false;    // assert pair identities after every event
};

struct SsaRun {
    std::uint64_t seed = 0;
    std::uint64_t event_count = 0;
    std::vector<double> times;
    std::vector<Counts> samples;
    Counts final_state;
    double end_time = 0.0;
    // First time each consumer total hit zero; negative if it never did.
    std::vector<double> extinction_time;

    bool lost_consumer() const;
};

SsaRun run_ssa(const ReactionNetwork& net, const Counts& initial, double t_end,
               std::uint64_t seed, const SsaOptions& opts = {});

// Independent seeds seed0, seed0+1, ...; runs spread over `threads` workers
// (0 = hardware concurrency).
std::vector<SsaRun> run_ensemble(const ReactionNetwork& net, const Counts& initial, double t_end,
                                 std::uint64_t seed0, std::size_t runs, const SsaOptions& opts = {},
                                 unsigned threads = 0);

struct EnsembleSummary {
    std::vector<double> times;
    Mat mean;      // samples x (M + N) totals
    Mat variance;  // unbiased
    std::size_t runs = 0;
};

// Requires every run to share sample_times.
EnsembleSummary summarize(const ReactionNetwork& net, const std::vector<SsaRun>& runs);

}  // namespace crm
