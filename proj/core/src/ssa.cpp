#include "crm/ssa.hpp"

#include "crm/errors.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <mutex>
#include <random>
#include <thread>

namespace crm {

std::string_view to_string(ReactionKind k) noexcept {
    switch (k) {
        case ReactionKind::Encounter: return "Encounter";
        case ReactionKind::Escape: return "Escape";
        case ReactionKind::Capture: return "Capture";
        case ReactionKind::IntraForm: return "IntraForm";
        case ReactionKind::IntraSplit: return "IntraSplit";
        case ReactionKind::InterForm: return "InterForm";
        case ReactionKind::InterSplit: return "InterSplit";
        case ReactionKind::Death: return "Death";
        case ReactionKind::ResourceBirth: return "ResourceBirth";
        case ReactionKind::ResourceDeath: return "ResourceDeath";
        case ReactionKind::ResourceInflux: return "ResourceInflux";
        case ReactionKind::ResourceDecay: return "ResourceDecay";
    }
    return "?";
}

ReactionNetwork::ReactionNetwork(const ModelConfig& config)
    : config_(config), layout_(config) {
    config_.validate();
    const std::size_t M = layout_.M(), N = layout_.N();
    const auto& L = layout_;

    // Everything a consumer total reads: free, chasing pairs, intra and inter pairs.
    auto consumer_reads = [&](std::size_t i) {
        std::vector<std::size_t> v{L.c_free(i)};
        for (std::size_t l = 0; l < N; ++l) v.push_back(L.x(i, l));
        if (L.intra()) v.push_back(L.y(i));
        if (L.inter())
            for (std::size_t j = 0; j < M; ++j)
                if (j != i) v.push_back(L.z(i, j));
        return v;
    };
    auto resource_reads = [&](std::size_t l) {
        std::vector<std::size_t> v{L.r_free(l)};
        for (std::size_t i = 0; i < M; ++i) v.push_back(L.x(i, l));
        return v;
    };
    auto add = [&](Reaction r) {
        if (r.rate > 0.0) reactions_.push_back(std::move(r));
    };

    for (std::size_t i = 0; i < M; ++i)
        for (std::size_t l = 0; l < N; ++l) {
            const auto ii = static_cast<Eigen::Index>(i), ll = static_cast<Eigen::Index>(l);
            const std::size_t cf = L.c_free(i), rf = L.r_free(l), x = L.x(i, l);
            add({ReactionKind::Encounter, i, 0, l, config.a(ii, ll), {{cf, -1}, {rf, -1}, {x, 1}},
                 {cf, rf}, {cf, rf, x}});
            add({ReactionKind::Escape, i, 0, l, config.d(ii, ll), {{x, -1}, {cf, 1}, {rf, 1}},
                 {x}, {cf, rf, x}});
            add({ReactionKind::Capture, i, 0, l, config.k(ii, ll), {{x, -1}, {cf, 1}}, {x}, {cf, x}});
        }
    if (L.intra())
        for (std::size_t i = 0; i < M; ++i) {
            const auto ii = static_cast<Eigen::Index>(i);
            const std::size_t cf = L.c_free(i), y = L.y(i);
            add({ReactionKind::IntraForm, i, i, 0, config.a_intra(ii), {{cf, -2}, {y, 1}}, {cf},
                 {cf, y}});
            add({ReactionKind::IntraSplit, i, i, 0, config.d_intra(ii), {{y, -1}, {cf, 2}}, {y},
                 {cf, y}});
        }
    if (L.inter())
        for (std::size_t i = 0; i < M; ++i)
            for (std::size_t j = i + 1; j < M; ++j) {
                const auto ii = static_cast<Eigen::Index>(i), jj = static_cast<Eigen::Index>(j);
                const std::size_t ci = L.c_free(i), cj = L.c_free(j), z = L.z(i, j);
                add({ReactionKind::InterForm, i, j, 0, config.a_inter(ii, jj),
                     {{ci, -1}, {cj, -1}, {z, 1}}, {ci, cj}, {ci, cj, z}});
                add({ReactionKind::InterSplit, i, j, 0, config.d_inter(ii, jj),
                     {{z, -1}, {ci, 1}, {cj, 1}}, {z}, {ci, cj, z}});
            }
    for (std::size_t i = 0; i < M; ++i) {
        auto reads = consumer_reads(i);
        auto writes = reads;
        for (std::size_t l = 0; l < N; ++l) writes.push_back(L.r_free(l));
        for (std::size_t j = 0; j < M; ++j)
            if (j != i) writes.push_back(L.c_free(j));
        add({ReactionKind::Death, i, 0, 0, config.D(static_cast<Eigen::Index>(i)), {},
             std::move(reads), std::move(writes)});
    }
    for (std::size_t l = 0; l < N; ++l) {
        const auto& law = config.resources[l];
        const std::size_t rf = L.r_free(l);
        if (law.kind == ResourceKind::Biotic) {
            add({ReactionKind::ResourceBirth, 0, 0, l, law.intrinsic_rate, {{rf, 1}},
                 resource_reads(l), {rf}});
            add({ReactionKind::ResourceDeath, 0, 0, l,
                 law.intrinsic_rate / law.carrying_capacity, {{rf, -1}}, resource_reads(l), {rf}});
        } else {
            add({ReactionKind::ResourceInflux, 0, 0, l, law.intrinsic_rate, {{rf, 1}}, {}, {rf}});
            add({ReactionKind::ResourceDecay, 0, 0, l,
                 law.intrinsic_rate / law.carrying_capacity, {{rf, -1}}, resource_reads(l), {rf}});
        }
    }

    dependents_.assign(L.size(), {});
    for (std::size_t r = 0; r < reactions_.size(); ++r)
        for (std::size_t s : reactions_[r].reads) {
            auto& d = dependents_[s];
            if (d.empty() || d.back() != r) d.push_back(r);
        }
    affected_.resize(reactions_.size());
    for (std::size_t r = 0; r < reactions_.size(); ++r) {
        auto& a = affected_[r];
        for (std::size_t s : reactions_[r].writes)
            a.insert(a.end(), dependents_[s].begin(), dependents_[s].end());
        std::sort(a.begin(), a.end());
        a.erase(std::unique(a.begin(), a.end()), a.end());
    }
}

ReactionNetwork build_reactions(const ModelConfig& config) { return ReactionNetwork(config); }

std::int64_t ReactionNetwork::consumer_total(const Counts& n, std::size_t i) const {
    const auto& L = layout_;
    std::int64_t c = n[L.c_free(i)];
    for (std::size_t l = 0; l < L.N(); ++l) c += n[L.x(i, l)];
    if (L.intra()) c += 2 * n[L.y(i)];
    if (L.inter())
        for (std::size_t j = 0; j < L.M(); ++j)
            if (j != i) c += n[L.z(i, j)];
    return c;
}

std::int64_t ReactionNetwork::resource_total(const Counts& n, std::size_t l) const {
    std::int64_t r = n[layout_.r_free(l)];
    for (std::size_t i = 0; i < layout_.M(); ++i) r += n[layout_.x(i, l)];
    return r;
}

double ReactionNetwork::propensity(std::size_t r, const Counts& n) const {
    const auto& re = reactions_[r];
    const auto& L = layout_;
    switch (re.kind) {
        case ReactionKind::Encounter:
            return re.rate * double(n[L.c_free(re.i)]) * double(n[L.r_free(re.l)]);
        case ReactionKind::Escape:
        case ReactionKind::Capture: return re.rate * double(n[L.x(re.i, re.l)]);
        case ReactionKind::IntraForm: {
            const double c = double(n[L.c_free(re.i)]);
            return c > 1.0 ? re.rate * c * (c - 1.0) : 0.0;
        }
        case ReactionKind::IntraSplit: return re.rate * double(n[L.y(re.i)]);
        case ReactionKind::InterForm:
            return re.rate * double(n[L.c_free(re.i)]) * double(n[L.c_free(re.j)]);
        case ReactionKind::InterSplit: return re.rate * double(n[L.z(re.i, re.j)]);
        case ReactionKind::Death: return re.rate * double(consumer_total(n, re.i));
        case ReactionKind::ResourceBirth: return re.rate * double(resource_total(n, re.l));
        case ReactionKind::ResourceDeath: {
            if (n[L.r_free(re.l)] <= 0) return 0.0;
            const double R = double(resource_total(n, re.l));
            return re.rate * R * R;
        }
        case ReactionKind::ResourceInflux: return re.rate;
        case ReactionKind::ResourceDecay:
            return n[L.r_free(re.l)] > 0 ? re.rate * double(resource_total(n, re.l)) : 0.0;
    }
    return 0.0;
}

double ReactionNetwork::total_propensity(const Counts& n) const {
    double a = 0.0;
    for (std::size_t r = 0; r < reactions_.size(); ++r) a += propensity(r, n);
    return a;
}

Counts ReactionNetwork::from_totals(const Vec& C, const Vec& R) const {
    if (static_cast<std::size_t>(C.size()) != layout_.M() ||
        static_cast<std::size_t>(R.size()) != layout_.N())
        throw DomainError("from_totals: wrong shape");
    Counts n(layout_.size(), 0);
    for (std::size_t i = 0; i < layout_.M(); ++i)
        n[layout_.c_free(i)] = std::llround(std::max(0.0, C(static_cast<Eigen::Index>(i))));
    for (std::size_t l = 0; l < layout_.N(); ++l)
        n[layout_.r_free(l)] = std::llround(std::max(0.0, R(static_cast<Eigen::Index>(l))));
    return n;
}

bool SsaRun::lost_consumer() const {
    return std::any_of(extinction_time.begin(), extinction_time.end(),
                       [](double t) { return t >= 0.0; });
}

namespace {

// Propensity store with categorical selection: a flat scan for small networks,
// a binary tree of partial sums otherwise.
class Selector {
public:
    explicit Selector(std::size_t n) : n_(n), flat_(n <= 48), props_(n, 0.0) {
        size_ = 1;
        while (size_ < n) size_ <<= 1;
        if (!flat_) tree_.assign(2 * size_, 0.0);
    }
    void set(std::size_t i, double v) {
        if (flat_) {
            total_ += v - props_[i];
            props_[i] = v;
            return;
        }
        std::size_t k = i + size_;
        tree_[k] = v;
        for (k >>= 1; k >= 1; k >>= 1) tree_[k] = tree_[2 * k] + tree_[2 * k + 1];
    }
    // Re-sums the flat total to shed accumulated rounding.
    void refresh() {
        if (!flat_) return;
        total_ = 0.0;
        for (double p : props_) total_ += p;
    }
    double total() const { return flat_ ? total_ : tree_[1]; }
    // Index whose cumulative interval contains u in [0, total).
    std::size_t find(double u) const {
        if (flat_) {
            std::size_t last = 0;
            for (std::size_t i = 0; i < n_; ++i) {
                if (props_[i] <= 0.0) continue;
                last = i;
                if (u < props_[i]) return i;
                u -= props_[i];
            }
            return last;
        }
        std::size_t k = 1;
        while (k < size_) {
            if (u < tree_[2 * k] || tree_[2 * k + 1] <= 0.0) {
                k = 2 * k;
            } else {
                u -= tree_[2 * k];
                k = 2 * k + 1;
            }
        }
        return k - size_;
    }

private:
    std::size_t n_;
    bool flat_;
    std::vector<double> props_;
    double total_ = 0.0;
    std::size_t size_ = 1;
    std::vector<double> tree_;
};

// Flat propensity table: rate * f(n[a], n[b]) or rate * (weighted sum)^power.
struct FastReaction {
    ReactionKind kind;
    double rate;
    std::size_t a, b;          // free-pool / pair indices
    std::uint32_t sum_begin, sum_end;
};

struct FastTable {
    std::vector<FastReaction> rx;
    std::vector<std::pair<std::size_t, std::int64_t>> terms;  // (index, weight)
    std::vector<std::uint32_t> affected_begin, affected;

    explicit FastTable(const ReactionNetwork& net) {
        const auto& L = net.layout();
        const auto& src = net.reactions();
        for (std::size_t r = 0; r < src.size(); ++r) {
            const auto& re = src[r];
            FastReaction f{re.kind, re.rate, 0, 0, 0, 0};
            f.sum_begin = static_cast<std::uint32_t>(terms.size());
            switch (re.kind) {
                case ReactionKind::Encounter: f.a = L.c_free(re.i); f.b = L.r_free(re.l); break;
                case ReactionKind::Escape:
                case ReactionKind::Capture: f.a = L.x(re.i, re.l); break;
                case ReactionKind::IntraForm: f.a = L.c_free(re.i); break;
                case ReactionKind::IntraSplit: f.a = L.y(re.i); break;
                case ReactionKind::InterForm: f.a = L.c_free(re.i); f.b = L.c_free(re.j); break;
                case ReactionKind::InterSplit: f.a = L.z(re.i, re.j); break;
                case ReactionKind::Death:
                    for (std::size_t s : re.reads)
                        terms.emplace_back(s, L.intra() && s == L.y(re.i) ? 2 : 1);
                    break;
                case ReactionKind::ResourceBirth:
                case ReactionKind::ResourceDeath:
                case ReactionKind::ResourceDecay:
                    f.a = L.r_free(re.l);
                    for (std::size_t s : re.reads) terms.emplace_back(s, 1);
                    break;
                case ReactionKind::ResourceInflux: break;
            }
            f.sum_end = static_cast<std::uint32_t>(terms.size());
            rx.push_back(f);
            affected_begin.push_back(static_cast<std::uint32_t>(affected.size()));
            for (auto d : net.affected(r)) affected.push_back(static_cast<std::uint32_t>(d));
        }
        affected_begin.push_back(static_cast<std::uint32_t>(affected.size()));
    }

    double sum(const FastReaction& f, const std::int64_t* n) const {
        std::int64_t acc = 0;
        for (auto k = f.sum_begin; k < f.sum_end; ++k) acc += terms[k].second * n[terms[k].first];
        return double(acc);
    }

    double propensity(std::size_t r, const std::int64_t* n) const {
        const auto& f = rx[r];
        switch (f.kind) {
            case ReactionKind::Encounter:
            case ReactionKind::InterForm: return f.rate * double(n[f.a]) * double(n[f.b]);
            case ReactionKind::Escape:
            case ReactionKind::Capture:
            case ReactionKind::IntraSplit:
            case ReactionKind::InterSplit: return f.rate * double(n[f.a]);
            case ReactionKind::IntraForm: {
                const double c = double(n[f.a]);
                return c > 1.0 ? f.rate * c * (c - 1.0) : 0.0;
            }
            case ReactionKind::Death:
            case ReactionKind::ResourceBirth: return f.rate * sum(f, n);
            case ReactionKind::ResourceDeath: {
                if (n[f.a] <= 0) return 0.0;
                const double R = sum(f, n);
                return f.rate * R * R;
            }
            case ReactionKind::ResourceInflux: return f.rate;
            case ReactionKind::ResourceDecay: return n[f.a] > 0 ? f.rate * sum(f, n) : 0.0;
        }
        return 0.0;
    }
};

inline double uniform01(std::mt19937_64& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

}  // namespace

SsaRun run_ssa(const ReactionNetwork& net, const Counts& initial, double t_end,
               std::uint64_t seed, const SsaOptions& opts) {
    const auto& L = net.layout();
    const auto& rx = net.reactions();
    const std::size_t M = L.M(), N = L.N();
    if (initial.size() != L.size()) throw DomainError("run_ssa: initial state has wrong size");
    for (auto v : initial)
        if (v < 0) throw DomainError("run_ssa: negative count in initial state");
    if (!std::is_sorted(opts.sample_times.begin(), opts.sample_times.end()))
        throw DomainError("run_ssa: sample_times must be sorted");

    SsaRun run;
    run.seed = seed;
    run.extinction_time.assign(M, -1.0);
    Counts n = initial;
    for (std::size_t i = 0; i < M; ++i)
        if (net.consumer_total(n, i) == 0) run.extinction_time[i] = 0.0;

    std::mt19937_64 rng(seed);
    auto unif = [&rng](std::mt19937_64&) { return uniform01(rng); };

    const FastTable fast(net);
    Selector tree(std::max<std::size_t>(1, rx.size()));
    for (std::size_t r = 0; r < rx.size(); ++r) tree.set(r, fast.propensity(r, n.data()));
    tree.refresh();
    std::size_t next_sample = 0;
    auto record_until = [&](double t) {
        while (next_sample < opts.sample_times.size() && opts.sample_times[next_sample] <= t) {
            run.times.push_back(opts.sample_times[next_sample]);
            run.samples.push_back(n);
            ++next_sample;
        }
    };

    double t = 0.0;
    bool stopped = false;
    while (true) {
        const double a0 = tree.total();
        if (!(a0 > 0.0)) break;
        double u1 = unif(rng);
        while (u1 <= 0.0) u1 = unif(rng);
        const double t_next = t - std::log(u1) / a0;
        if (t_next > t_end) break;
        // samples strictly before the jump see the current state
        while (next_sample < opts.sample_times.size() && opts.sample_times[next_sample] < t_next) {
            run.times.push_back(opts.sample_times[next_sample]);
            run.samples.push_back(n);
            ++next_sample;
        }
        t = t_next;
        const std::size_t r = std::min(tree.find(unif(rng) * a0), rx.size() - 1);
        const auto& re = rx[r];
        for (const auto& [s, dv] : re.stoichiometry) n[s] += dv;

        if (re.kind == ReactionKind::Capture) {
            if (unif(rng) < net.config().w(static_cast<Eigen::Index>(re.i),
                                           static_cast<Eigen::Index>(re.l)))
                n[L.c_free(re.i)] += 1;
        } else if (re.kind == ReactionKind::Death) {
            const std::size_t i = re.i;
            const std::int64_t total = net.consumer_total(n, i);
            auto pick = static_cast<std::int64_t>(unif(rng) * double(total));
            pick = std::min(pick, total - 1);
            bool done = false;
            if (pick < n[L.c_free(i)]) {
                n[L.c_free(i)] -= 1;
                done = true;
            } else {
                pick -= n[L.c_free(i)];
            }
            for (std::size_t l = 0; !done && l < N; ++l) {
                if (pick < n[L.x(i, l)]) {
                    n[L.x(i, l)] -= 1;
                    n[L.r_free(l)] += 1;  // the chased resource escapes
                    done = true;
                } else {
                    pick -= n[L.x(i, l)];
                }
            }
            if (!done && L.intra()) {
                if (pick < 2 * n[L.y(i)]) {
                    n[L.y(i)] -= 1;
                    n[L.c_free(i)] += 1;
                    done = true;
                } else {
                    pick -= 2 * n[L.y(i)];
                }
            }
            for (std::size_t j = 0; !done && L.inter() && j < M; ++j) {
                if (j == i) continue;
                if (pick < n[L.z(i, j)]) {
                    n[L.z(i, j)] -= 1;
                    n[L.c_free(j)] += 1;
                    done = true;
                } else {
                    pick -= n[L.z(i, j)];
                }
            }
            if (net.consumer_total(n, i) == 0 && run.extinction_time[i] < 0.0) {
                run.extinction_time[i] = t;
                if (opts.stop_on_extinction) stopped = true;
            }
        }
        ++run.event_count;

        for (auto k = fast.affected_begin[r]; k < fast.affected_begin[r + 1]; ++k)
            tree.set(fast.affected[k], fast.propensity(fast.affected[k], n.data()));
        if ((run.event_count & 0xfff) == 0) tree.refresh();

        if (opts.check_bookkeeping) {
            for (auto v : n)
                if (v < 0) throw Error("run_ssa: negative count after event");
        }
        if (stopped || (opts.max_events && run.event_count >= opts.max_events)) break;
    }
    if (!stopped && !(opts.max_events && run.event_count >= opts.max_events)) t = t_end;
    record_until(t);
    run.final_state = n;
    run.end_time = t;
    return run;
}

std::vector<SsaRun> run_ensemble(const ReactionNetwork& net, const Counts& initial, double t_end,
                                 std::uint64_t seed0, std::size_t runs, const SsaOptions& opts,
                                 unsigned threads) {
    std::vector<SsaRun> out(runs);
    if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
    threads = static_cast<unsigned>(std::min<std::size_t>(threads, std::max<std::size_t>(1, runs)));
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    auto worker = [&] {
        for (std::size_t k = next++; k < runs; k = next++) {
            try {
                out[k] = run_ssa(net, initial, t_end, seed0 + k, opts);
            } catch (...) {
                std::lock_guard<std::mutex> lock(failure_mutex);
                if (!failure) failure = std::current_exception();
            }
        }
    };
    if (threads == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (unsigned w = 0; w < threads; ++w) pool.emplace_back(worker);
        for (auto& th : pool) th.join();
    }
    if (failure) std::rethrow_exception(failure);
    return out;
}

EnsembleSummary summarize(const ReactionNetwork& net, const std::vector<SsaRun>& runs) {
    if (runs.empty()) throw DomainError("summarize: no runs");
    const std::size_t M = net.layout().M(), N = net.layout().N();
    const std::size_t S = runs.front().times.size();
    for (const auto& r : runs)
        if (r.times != runs.front().times)
            throw DomainError("summarize: runs do not share sample times");
    EnsembleSummary s;
    s.times = runs.front().times;
    s.runs = runs.size();
    s.mean = Mat::Zero(static_cast<Eigen::Index>(S), static_cast<Eigen::Index>(M + N));
    s.variance = s.mean;
    for (std::size_t k = 0; k < S; ++k) {
        for (std::size_t c = 0; c < M + N; ++c) {
            double sum = 0, sq = 0;
            for (const auto& r : runs) {
                const double v = c < M ? double(net.consumer_total(r.samples[k], c))
                                       : double(net.resource_total(r.samples[k], c - M));
                sum += v;
                sq += v * v;
            }
            const double n = double(runs.size());
            const double m = sum / n;
            const auto kk = static_cast<Eigen::Index>(k), cc = static_cast<Eigen::Index>(c);
            s.mean(kk, cc) = m;
            s.variance(kk, cc) = n > 1 ? std::max(0.0, (sq - n * m * m) / (n - 1.0)) : 0.0;
        }
    }
    return s;
}

}  // namespace crm
