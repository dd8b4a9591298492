#include "crm/ibm.hpp"

#include "crm/errors.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <ostream>

namespace crm {

void IbmParams::choose_dt(double target) {
    double fastest = 0.0;
    for (int s = 0; s < 2; ++s) {
        fastest = std::max({fastest, v_c[s], d[s] + k[s], D[s]});
        for (int t = 0; t < 2; ++t) fastest = std::max(fastest, d_inter(s, t));
    }
    fastest = std::max(fastest, v_r);
    if (!(fastest > 0.0)) throw InvalidConfig("IbmParams: every rate is zero");
    dt = target / fastest;
}

void IbmParams::validate() const {
    if (L < 2) throw InvalidConfig("IbmParams: L must be >= 2");
    if (!(dt > 0.0)) throw InvalidConfig("IbmParams: dt must be > 0");
    auto nonneg = [](double v, const char* what) {
        if (!(v >= 0.0) || !std::isfinite(v))
            throw InvalidConfig(std::string("IbmParams: ") + what + " must be finite and >= 0");
    };
    constexpr double cfl = 0.1 + 1e-12;
    auto cap = [&](double p, const char* what) {
        if (p > cfl)
            throw InvalidConfig(std::string("IbmParams: ") + what + " * dt = " +
                                std::to_string(p) + " exceeds 0.1");
    };
    nonneg(v_r, "v_r");
    cap(v_r * dt, "v_r");
    for (int s = 0; s < 2; ++s) {
        nonneg(v_c[s], "v_c");
        nonneg(r_chase[s], "r_chase");
        nonneg(d[s], "d");
        nonneg(k[s], "k");
        nonneg(D[s], "D");
        if (!(w[s] >= 0.0 && w[s] <= 1.0)) throw InvalidConfig("IbmParams: w must lie in [0, 1]");
        cap(v_c[s] * dt, "v_c");
        cap((d[s] + k[s]) * dt, "d + k");
        cap(D[s] * dt, "D");
        for (int t = 0; t < 2; ++t) {
            nonneg(r_inter(s, t), "r_inter");
            nonneg(d_inter(s, t), "d_inter");
            cap(d_inter(s, t) * dt, "d'");
        }
    }
    if (r_inter(0, 1) != r_inter(1, 0) || d_inter(0, 1) != d_inter(1, 0))
        throw InvalidConfig("IbmParams: interspecific radius and rate must be symmetric");
    nonneg(resource.intrinsic_rate, "resource rate");
    if (!(resource.carrying_capacity > 0.0)) throw InvalidConfig("IbmParams: K0 must be > 0");
}

std::size_t World::consumers(int species) const {
    return static_cast<std::size_t>(std::count_if(
        individuals.begin(), individuals.end(), [&](const auto& a) { return a.species == species; }));
}

std::size_t World::resources() const { return consumers(kResource); }

double torus_distance(int L, int x0, int y0, int x1, int y1) noexcept {
    auto wrap = [L](int dx) {
        dx %= L;
        if (dx > L / 2) dx -= L;
        if (dx < -L / 2) dx += L;
        return dx;
    };
    const double dx = wrap(x1 - x0), dy = wrap(y1 - y0);
    return std::hypot(dx, dy);
}

namespace {

double uniform(std::mt19937_64& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

int uniform_int(std::mt19937_64& rng, int n) {
    return static_cast<int>(uniform(rng) * n) % n;
}

int wrap(int v, int L) {
    v %= L;
    return v < 0 ? v + L : v;
}

// Cell list rebuilt on demand. Cells are at least `reach` wide so neighbours
// lie in the 3 x 3 block around a cell.
class Grid {
public:
    Grid(int L, double reach) : L_(L) {
        const int width = std::max(1, static_cast<int>(std::ceil(reach)));
        n_ = std::max(1, L / width);
        head_.assign(static_cast<std::size_t>(n_ * n_), -1);
    }
    void build(const std::vector<Individual>& ind) {
        std::fill(head_.begin(), head_.end(), -1);
        next_.assign(ind.size(), -1);
        for (int i = static_cast<int>(ind.size()) - 1; i >= 0; --i) {
            const int c = cell(ind[static_cast<std::size_t>(i)].x, ind[static_cast<std::size_t>(i)].y);
            next_[static_cast<std::size_t>(i)] = head_[static_cast<std::size_t>(c)];
            head_[static_cast<std::size_t>(c)] = i;
        }
    }
    template <class F>
    void for_near(int x, int y, F&& f) const {
        const int cx = x * n_ / L_, cy = y * n_ / L_;
        const int span = n_ >= 3 ? 1 : 0;
        if (n_ < 3) {
            for (int c = 0; c < n_ * n_; ++c)
                for (int j = head_[static_cast<std::size_t>(c)]; j >= 0; j = next_[static_cast<std::size_t>(j)]) f(j);
            return;
        }
        for (int ox = -span; ox <= span; ++ox)
            for (int oy = -span; oy <= span; ++oy) {
                const int c = wrap(cx + ox, n_) * n_ + wrap(cy + oy, n_);
                for (int j = head_[static_cast<std::size_t>(c)]; j >= 0; j = next_[static_cast<std::size_t>(j)]) f(j);
            }
    }

private:
    int cell(int x, int y) const { return (x * n_ / L_) * n_ + (y * n_ / L_); }
    int L_, n_;
    std::vector<int> head_, next_;
};

double max_reach(const IbmParams& p) {
    double r = std::max(p.r_chase[0], p.r_chase[1]);
    return std::max(r, p.r_inter.maxCoeff());
}

void move(World& w, const IbmParams& p) {
    static constexpr int dx[4] = {1, -1, 0, 0};
    static constexpr int dy[4] = {0, 0, 1, -1};
    for (auto& a : w.individuals) {
        if (a.status != IbmStatus::Free) continue;
        const double v = a.species == kResource ? p.v_r : p.v_c[static_cast<std::size_t>(a.species)];
        if (uniform(w.rng) >= v * p.dt) continue;
        const int dir = uniform_int(w.rng, 4);
        a.x = wrap(a.x + dx[dir], w.L);
        a.y = wrap(a.y + dy[dir], w.L);
    }
}

// Places b just outside radius r around a, at a uniform angle.
void place_outside(World& w, const Individual& a, Individual& b, double r) {
    const double th = 2.0 * std::numbers::pi * uniform(w.rng);
    const double rr = std::floor(r) + 1.0;
    for (int tries = 0; tries < 8; ++tries) {
        const int nx = wrap(a.x + static_cast<int>(std::lround(rr * std::cos(th))), w.L);
        const int ny = wrap(a.y + static_cast<int>(std::lround(rr * std::sin(th))), w.L);
        b.x = nx;
        b.y = ny;
        if (torus_distance(w.L, a.x, a.y, nx, ny) > r) return;
    }
}

void form_pairs(World& w, const IbmParams& p, Grid& grid) {
    grid.build(w.individuals);
    std::vector<int> order;
    for (int i = 0; i < static_cast<int>(w.individuals.size()); ++i)
        if (w.individuals[static_cast<std::size_t>(i)].species != kResource) order.push_back(i);
    std::shuffle(order.begin(), order.end(), w.rng);
    std::vector<int> cand;
    for (int i : order) {
        auto& a = w.individuals[static_cast<std::size_t>(i)];
        if (a.status != IbmStatus::Free) continue;
        const auto s = static_cast<std::size_t>(a.species);
        cand.clear();
        grid.for_near(a.x, a.y, [&](int j) {
            if (j == i) return;
            const auto& b = w.individuals[static_cast<std::size_t>(j)];
            if (b.status != IbmStatus::Free) return;
            const double r = b.species == kResource
                                 ? p.r_chase[s]
                                 : p.r_inter(static_cast<Eigen::Index>(s), b.species);
            if (r > 0.0 && torus_distance(w.L, a.x, a.y, b.x, b.y) <= r) cand.push_back(j);
        });
        if (cand.empty()) continue;
        const int j = cand[static_cast<std::size_t>(uniform_int(w.rng, static_cast<int>(cand.size())))];
        auto& b = w.individuals[static_cast<std::size_t>(j)];
        const auto st = b.species == kResource ? IbmStatus::InChasingPair : IbmStatus::InInterferencePair;
        a.status = b.status = st;
        a.partner = j;
        b.partner = i;
    }
}

void free_individual(Individual& a) {
    a.status = IbmStatus::Free;
    a.partner = -1;
}

// Removes flagged individuals, freeing their partners in place, and reindexes links.
void compact(World& w, const std::vector<char>& dead) {
    auto& ind = w.individuals;
    for (std::size_t i = 0; i < ind.size(); ++i)
        if (dead[i] && ind[i].partner >= 0 && !dead[static_cast<std::size_t>(ind[i].partner)])
            free_individual(ind[static_cast<std::size_t>(ind[i].partner)]);
    std::vector<int> remap(ind.size(), -1);
    std::size_t n = 0;
    for (std::size_t i = 0; i < ind.size(); ++i)
        if (!dead[i]) remap[i] = static_cast<int>(n++);
    std::vector<Individual> out;
    out.reserve(n);
    for (std::size_t i = 0; i < ind.size(); ++i) {
        if (dead[i]) continue;
        Individual a = ind[i];
        if (a.partner >= 0) a.partner = remap[static_cast<std::size_t>(a.partner)];
        out.push_back(a);
    }
    ind.swap(out);
}

void dissolve_or_capture(World& w, const IbmParams& p, std::vector<char>& dead) {
    auto& ind = w.individuals;
    for (std::size_t i = 0; i < ind.size(); ++i) {
        auto& a = ind[i];
        if (a.species == kResource || a.partner < 0) continue;
        auto& b = ind[static_cast<std::size_t>(a.partner)];
        const auto s = static_cast<std::size_t>(a.species);
        if (a.status == IbmStatus::InChasingPair) {
            const double u = uniform(w.rng);
            if (u < p.d[s] * p.dt) {
                place_outside(w, a, b, p.r_chase[s]);
                free_individual(a);
                free_individual(b);
            } else if (u < (p.d[s] + p.k[s]) * p.dt) {
                dead[static_cast<std::size_t>(a.partner)] = 1;
                free_individual(b);
                free_individual(a);
                w.birth_acc[s] += p.w[s];
                ++w.captures;
            }
        } else if (static_cast<int>(i) < a.partner) {
            const auto t = static_cast<Eigen::Index>(b.species);
            const auto si = static_cast<Eigen::Index>(s);
            if (uniform(w.rng) < p.d_inter(si, t) * p.dt) {
                place_outside(w, a, b, p.r_inter(si, t));
                free_individual(a);
                free_individual(b);
            }
        }
    }
}

void spawn(World& w, int species) {
    Individual a;
    a.species = species;
    a.x = uniform_int(w.rng, w.L);
    a.y = uniform_int(w.rng, w.L);
    w.individuals.push_back(a);
}

// Kills `count` uniformly chosen members of `species`; free_only restricts to free ones.
void kill(World& w, std::vector<char>& dead, int species, std::size_t count, bool free_only) {
    std::vector<std::size_t> pool;
    for (std::size_t i = 0; i < w.individuals.size(); ++i) {
        const auto& a = w.individuals[i];
        if (!dead[i] && a.species == species && (!free_only || a.status == IbmStatus::Free))
            pool.push_back(i);
    }
    for (std::size_t c = 0; c < count && !pool.empty(); ++c) {
        const auto k = static_cast<std::size_t>(uniform_int(w.rng, static_cast<int>(pool.size())));
        dead[pool[k]] = 1;
        pool[k] = pool.back();
        pool.pop_back();
    }
}

void demographics(World& w, const IbmParams& p, std::vector<char>& dead) {
    std::array<std::size_t, 2> C{0, 0};
    std::size_t R = 0, R_free = 0;
    for (std::size_t i = 0; i < w.individuals.size(); ++i) {
        if (dead[i]) continue;
        const auto& a = w.individuals[i];
        if (a.species == kResource) {
            ++R;
            if (a.status == IbmStatus::Free) ++R_free;
        } else {
            ++C[static_cast<std::size_t>(a.species)];
        }
    }
    for (int s = 0; s < 2; ++s) {
        const auto su = static_cast<std::size_t>(s);
        w.death_acc[su] += p.D[su] * double(C[su]) * p.dt;
        const auto deaths = static_cast<std::size_t>(std::floor(w.death_acc[su]));
        if (deaths > 0) {
            kill(w, dead, s, deaths, false);
            w.death_acc[su] -= double(deaths);
        }
    }
    const double rate = p.resource.intrinsic_rate, K0 = p.resource.carrying_capacity;
    const double Rd = double(R);
    if (p.resource.kind == ResourceKind::Biotic) {
        w.resource_birth_acc += rate * Rd * p.dt;
        w.resource_death_acc += rate * Rd * Rd / K0 * p.dt;
    } else {
        w.resource_birth_acc += rate * p.dt;
        w.resource_death_acc += rate * Rd / K0 * p.dt;
    }
    const auto rdeaths = static_cast<std::size_t>(std::floor(w.resource_death_acc));
    if (rdeaths > 0 && R_free > 0) {
        const std::size_t n = std::min(rdeaths, R_free);
        kill(w, dead, kResource, n, true);
        w.resource_death_acc -= double(n);
    }
    compact(w, dead);
    for (int s = 0; s < 2; ++s) {
        auto& acc = w.birth_acc[static_cast<std::size_t>(s)];
        for (; acc >= 1.0; acc -= 1.0) spawn(w, s);
    }
    for (; w.resource_birth_acc >= 1.0; w.resource_birth_acc -= 1.0) spawn(w, kResource);
}

}  // namespace

World make_world(const IbmParams& p, std::array<std::size_t, 2> consumers, std::size_t resources,
                 std::uint64_t seed) {
    p.validate();
    World w;
    w.L = p.L;
    w.rng.seed(seed);
    for (int s = 0; s < 2; ++s)
        for (std::size_t c = 0; c < consumers[static_cast<std::size_t>(s)]; ++c) spawn(w, s);
    for (std::size_t c = 0; c < resources; ++c) spawn(w, kResource);
    return w;
}

void step(World& world, const IbmParams& p) {
    p.validate();
    if (world.L != p.L) throw DomainError("step: world and params disagree on L");
    Grid grid(world.L, max_reach(p));
    move(world, p);
    form_pairs(world, p, grid);
    std::vector<char> dead(world.individuals.size(), 0);
    dissolve_or_capture(world, p, dead);
    demographics(world, p, dead);
    world.time += p.dt;
}

void check_world(const World& w) {
    const auto n = static_cast<int>(w.individuals.size());
    for (int i = 0; i < n; ++i) {
        const auto& a = w.individuals[static_cast<std::size_t>(i)];
        if (a.x < 0 || a.x >= w.L || a.y < 0 || a.y >= w.L)
            throw Error("check_world: position outside the lattice");
        if (a.species != kResource && a.species != 0 && a.species != 1)
            throw Error("check_world: unknown species");
        if (a.status == IbmStatus::Free) {
            if (a.partner != -1) throw Error("check_world: free individual with a partner");
            continue;
        }
        if (a.partner < 0 || a.partner >= n) throw Error("check_world: dangling partner");
        const auto& b = w.individuals[static_cast<std::size_t>(a.partner)];
        if (b.partner != i || b.status != a.status)
            throw Error("check_world: partner link not reciprocal");
        const bool chasing = a.species == kResource || b.species == kResource;
        if (chasing != (a.status == IbmStatus::InChasingPair))
            throw Error("check_world: pair type does not match members");
    }
}

IbmSeries run_ibm(World& world, const IbmParams& p, double t_end, double sample_dt) {
    if (!(sample_dt > 0.0)) throw DomainError("run_ibm: sample_dt must be > 0");
    IbmSeries out;
    double next = world.time;
    auto record = [&] {
        out.times.push_back(world.time);
        out.counts.push_back({world.consumers(0), world.consumers(1), world.resources()});
    };
    while (world.time < t_end - 0.5 * p.dt) {
        if (world.time >= next - 1e-9) {
            record();
            next += sample_dt;
        }
        step(world, p);
    }
    record();
    return out;
}

EncounterEstimate estimate_encounter_rate(const IbmParams& p, int species,
                                          std::size_t n_consumers, std::size_t n_resources,
                                          double t_total, std::uint64_t seed) {
    p.validate();
    if (species != 0 && species != 1) throw DomainError("estimate_encounter_rate: bad species");
    const auto s = static_cast<std::size_t>(species);
    const double r = p.r_chase[s];
    EncounterEstimate est;
    est.mean_field = 2.0 * r * std::hypot(p.v_c[s], p.v_r) / (double(p.L) * double(p.L));

    std::array<std::size_t, 2> counts{0, 0};
    counts[s] = n_consumers;
    World w = make_world(p, counts, n_resources, seed);
    Grid grid(w.L, r);
    const std::size_t n = w.individuals.size();
    std::vector<std::vector<int>> inside(n), now(n);

    auto scan = [&](std::vector<std::vector<int>>& sets) {
        grid.build(w.individuals);
        for (std::size_t i = 0; i < n; ++i) {
            sets[i].clear();
            const auto& a = w.individuals[i];
            if (a.species == kResource) continue;
            grid.for_near(a.x, a.y, [&](int j) {
                const auto& b = w.individuals[static_cast<std::size_t>(j)];
                if (b.species == kResource && torus_distance(w.L, a.x, a.y, b.x, b.y) <= r)
                    sets[i].push_back(j);
            });
            std::sort(sets[i].begin(), sets[i].end());
        }
    };
    scan(inside);
    const auto steps = static_cast<std::uint64_t>(std::llround(t_total / p.dt));
    std::vector<int> fresh;
    for (std::uint64_t k = 0; k < steps; ++k) {
        move(w, p);
        scan(now);
        for (std::size_t i = 0; i < n; ++i) {
            fresh.clear();
            std::set_difference(now[i].begin(), now[i].end(), inside[i].begin(), inside[i].end(),
                                std::back_inserter(fresh));
            est.events += fresh.size();
        }
        inside.swap(now);
    }
    const double T = double(steps) * p.dt;
    const double norm = T * double(n_consumers) * double(n_resources);
    if (est.events < 100)
        throw StatisticalPower("estimate_encounter_rate: only " + std::to_string(est.events) +
                               " entry events");
    est.rate = double(est.events) / norm;
    est.std_error = std::sqrt(double(est.events)) / norm;
    return est;
}

void write_snapshot_csv(std::ostream& os, const World& world, bool header) {
    if (header) os << "time,id,species,x,y,status\n";
    for (std::size_t i = 0; i < world.individuals.size(); ++i) {
        const auto& a = world.individuals[i];
        os << world.time << ',' << i << ','
           << (a.species == kResource ? std::string("R") : "C" + std::to_string(a.species + 1))
           << ',' << a.x << ',' << a.y << ','
           << (a.status == IbmStatus::Free
                   ? "Free"
                   : a.status == IbmStatus::InChasingPair ? "InChasingPair" : "InInterferencePair")
           << '\n';
    }
}

}  // namespace crm
