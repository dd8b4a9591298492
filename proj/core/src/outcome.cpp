#include "crm/errors.hpp"
#include "crm/ode.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace crm {

std::string_view to_string(ConsumerFate f) noexcept {
    return f == ConsumerFate::Persists ? "Persists" : "Extinct";
}

std::string_view to_string(DynamicsClass d) noexcept {
    switch (d) {
        case DynamicsClass::StableFixedPoint: return "StableFixedPoint";
        case DynamicsClass::LimitCycle: return "LimitCycle";
        case DynamicsClass::QuasiPeriodic: return "QuasiPeriodic";
        case DynamicsClass::Undetermined: return "Undetermined";
    }
    return "?";
}

namespace {

struct Series {
    std::vector<double> t, v;
};

double amplitude(const Series& s) {
    const auto [lo, hi] = std::minmax_element(s.v.begin(), s.v.end());
    return 0.5 * (*hi - *lo);
}

double mean(const std::vector<double>& v) {
    double acc = 0.0;
    for (double x : v) acc += x;
    return v.empty() ? 0.0 : acc / double(v.size());
}

// Resamples onto a uniform grid, removes the mean and applies a Hann taper.
std::vector<double> prepare(const Series& s, std::size_t n) {
    std::vector<double> out(n);
    const double t0 = s.t.front(), t1 = s.t.back();
    std::size_t j = 0;
    for (std::size_t k = 0; k < n; ++k) {
        const double t = t0 + (t1 - t0) * double(k) / double(n - 1);
        while (j + 1 < s.t.size() - 1 && s.t[j + 1] < t) ++j;
        const double dt = s.t[j + 1] - s.t[j];
        const double th = dt > 0.0 ? std::clamp((t - s.t[j]) / dt, 0.0, 1.0) : 0.0;
        out[k] = s.v[j] + th * (s.v[j + 1] - s.v[j]);
    }
    const double m = mean(out);
    for (std::size_t k = 0; k < n; ++k)
        out[k] = (out[k] - m) * 0.5 * (1.0 - std::cos(2.0 * std::numbers::pi * double(k) / double(n - 1)));
    return out;
}

std::vector<double> amplitude_spectrum(const std::vector<double>& x) {
    const std::size_t n = x.size();
    std::vector<double> amp(n / 2 + 1);
    for (std::size_t f = 0; f < amp.size(); ++f) {
        double re = 0.0, im = 0.0;
        const double w = -2.0 * std::numbers::pi * double(f) / double(n);
        for (std::size_t k = 0; k < n; ++k) {
            re += x[k] * std::cos(w * double(k));
            im += x[k] * std::sin(w * double(k));
        }
        amp[f] = std::hypot(re, im);
    }
    return amp;
}

}  // namespace

OutcomeClass classify_outcome(const Trajectory& traj, double window, const OutcomeOptions& opts) {
    if (!(window > 0.0)) throw DomainError("classify_outcome: window must be > 0");
    if (traj.size() < 8 || traj.times.back() - traj.times.front() < 2.0 * window)
        throw DomainError("classify_outcome: trajectory shorter than two windows");
    const double t_end = traj.times.back();
    const std::size_t M = traj.layout.M(), N = traj.layout.N();

    std::vector<Series> tail(M + N), prev(M + N);
    for (std::size_t k = 0; k < traj.size(); ++k) {
        const double t = traj.times[k];
        if (t < t_end - 2.0 * window) continue;
        const Vec C = traj.consumer_totals(k);
        const Vec R = traj.resource_totals(k);
        auto& bucket = t >= t_end - window ? tail : prev;
        for (std::size_t i = 0; i < M; ++i) {
            bucket[i].t.push_back(t);
            bucket[i].v.push_back(C(static_cast<Eigen::Index>(i)));
        }
        for (std::size_t l = 0; l < N; ++l) {
            bucket[M + l].t.push_back(t);
            bucket[M + l].v.push_back(R(static_cast<Eigen::Index>(l)));
        }
    }
    if (tail.front().v.size() < 4 || prev.front().v.size() < 4)
        throw DomainError("classify_outcome: too few samples per window");

    OutcomeClass out;
    std::vector<std::size_t> live;
    for (std::size_t i = 0; i < M; ++i) {
        const double hi = *std::max_element(tail[i].v.begin(), tail[i].v.end());
        const bool gone = hi < opts.extinction_threshold;
        out.fates.push_back(gone ? ConsumerFate::Extinct : ConsumerFate::Persists);
        if (!gone) live.push_back(i);
    }
    for (std::size_t l = 0; l < N; ++l) live.push_back(M + l);

    std::size_t lead = live.front();
    for (std::size_t c : live) {
        const double m = mean(tail[c].v);
        const double rel = m > 0.0 ? 2.0 * amplitude(tail[c]) / m : 0.0;
        if (rel > out.relative_oscillation) {
            out.relative_oscillation = rel;
            lead = c;
        }
        const double a_tail = amplitude(tail[c]);
        if (a_tail > 0.0)
            out.amplitude_drift =
                std::max(out.amplitude_drift, std::abs(a_tail - amplitude(prev[c])) / a_tail);
    }
    if (out.relative_oscillation < opts.fixed_point_tol) {
        out.dynamics = DynamicsClass::StableFixedPoint;
        return out;
    }

    const std::size_t n = std::min<std::size_t>(4096, std::max<std::size_t>(256, tail[lead].v.size()));
    const auto spec = amplitude_spectrum(prepare(tail[lead], n));
    const double span = tail[lead].t.back() - tail[lead].t.front();
    const double df = 1.0 / span;
    const double top = *std::max_element(spec.begin() + 1, spec.end());
    std::vector<double> peaks;
    for (std::size_t f = 2; f + 1 < spec.size(); ++f) {
        if (!(spec[f] >= opts.peak_fraction * top && spec[f] > spec[f - 1] && spec[f] >= spec[f + 1]))
            continue;
        // parabolic interpolation on log amplitude
        const double a = std::log(spec[f - 1]), b = std::log(spec[f]), c = std::log(spec[f + 1]);
        const double den = a - 2.0 * b + c;
        const double shift = den < 0.0 ? std::clamp(0.5 * (a - c) / den, -0.5, 0.5) : 0.0;
        peaks.push_back((double(f) + shift) * df);
    }
    out.frequencies = peaks;
    if (peaks.empty() || peaks.front() < 3.0 * df) return out;

    // Harmonics of the lowest peak, to within one bin.
    const double f0 = peaks.front();
    bool commensurate = true;
    for (double f : peaks) {
        const double m = std::round(f / f0);
        if (std::abs(f - m * f0) > df) commensurate = false;
    }
    if (!commensurate)
        out.dynamics = DynamicsClass::QuasiPeriodic;
    else if (out.amplitude_drift < opts.amplitude_drift)
        out.dynamics = DynamicsClass::LimitCycle;
    return out;
}

}  // namespace crm
