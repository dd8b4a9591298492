#pragma once

#include "crm/model.hpp"

#include <array>
#include <cstdint>
#include <iosfwd>
#include <random>
#include <vector>

namespace crm {

// Two consumer species and one resource on an L x L periodic lattice.
struct IbmParams {
    int L = 120;
    std::array<double, 2> v_c{1.0, 1.0};
    double v_r = 1.0;
    std::array<double, 2> r_chase{5.0, 5.0};
    Eigen::Matrix2d r_inter = Eigen::Matrix2d::Zero();  // diagonal: intraspecific
    std::array<double, 2> d{0.0, 0.0}, k{0.0, 0.0}, w{0.0, 0.0}, D{0.0, 0.0};
    Eigen::Matrix2d d_inter = Eigen::Matrix2d::Zero();  // diagonal: d'_ii
    ResourceLaw resource;
    double dt = 0.1;

    // Largest of v dt, (d+k) dt, d' dt, D dt set to `target`.
    void choose_dt(double target = 0.1);
    // Throws InvalidConfig on bad values or when a per-step probability exceeds 0.1.
    void validate() const;
};

enum class IbmStatus : std::uint8_t { Free, InChasingPair, InInterferencePair };

struct Individual {
    int species = 0;  // 0, 1 consumers; kResource for the resource
    int x = 0, y = 0;
    IbmStatus status = IbmStatus::Free;
    int partner = -1;  // index into World::individuals
};

inline constexpr int kResource = -1;

struct World {
    int L = 0;
    std::vector<Individual> individuals;
    double time = 0.0;
    std::mt19937_64 rng;
    std::array<double, 2> birth_acc{0.0, 0.0}, death_acc{0.0, 0.0};
    double resource_birth_acc = 0.0, resource_death_acc = 0.0;
    std::uint64_t captures = 0;

    std::size_t consumers(int species) const;
    std::size_t resources() const;
};

// Uniformly placed, all free.
World make_world(const IbmParams& p, std::array<std::size_t, 2> consumers, std::size_t resources,
                 std::uint64_t seed);

// Minimum-image Euclidean distance on the torus.
double torus_distance(int L, int x0, int y0, int x1, int y1) noexcept;

// One dt: movement, pair formation, dissociation / capture, demographics.
void step(World& world, const IbmParams& p);

// Throws Error if positions or partner links are inconsistent.
void check_world(const World& world);

struct IbmSeries {
    std::vector<double> times;
    std::vector<std::array<std::size_t, 3>> counts;  // C1, C2, R
};

IbmSeries run_ibm(World& world, const IbmParams& p, double t_end, double sample_dt);

struct EncounterEstimate {
    double rate = 0.0;       // entries per unit time per (consumer x resource) pair
    double std_error = 0.0;  // Poisson
    std::uint64_t events = 0;
    double mean_field = 0.0; // 2 r sqrt(v_c^2 + v_r^2) / L^2
};

// Count-only mode: no pairing, no demographics. Counts entries of resources into the
// chase radius of consumers of `species`. Throws StatisticalPower below 100 events.
EncounterEstimate estimate_encounter_rate(const IbmParams& p, int species,
                                          std::size_t n_consumers, std::size_t n_resources,
                                          double t_total, std::uint64_t seed);

// CSV: time,id,species,x,y,status
void write_snapshot_csv(std::ostream& os, const World& world, bool header = true);

}  // namespace crm
