#pragma once

#include <algorithm>
#include <chrono>
#include <functional>
#include <vector>

namespace parobs {
namespace timing {

using clock = std::chrono::steady_clock;

inline double seconds_since(clock::time_point start) {
    return std::chrono::duration<double>(clock::now() - start).count();
}

/// Measured timer baseline: the median cost of one now()/now() pair. Reported
/// as the effective clock resolution in run metadata.
inline double resolution() {
    std::vector<double> samples;
    samples.reserve(101);
    for (int i = 0; i < 101; ++i) {
        const auto a = clock::now();
        const auto b = clock::now();
        samples.push_back(std::chrono::duration<double>(b - a).count());
    }
    std::nth_element(samples.begin(), samples.begin() + samples.size() / 2,
                     samples.end());
    return samples[samples.size() / 2];
}

/// Median-of-reps duration of fn, one discarded warm-up run first. Closures
/// cheaper than ~0.2 ms are batched inside one timed region and the per-call
/// cost is reported.
inline double median_seconds(const std::function<void()>& fn, int reps = 5) {
    fn();  // warm-up, discarded

    const double min_window = 2e-4;
    const auto probe_start = clock::now();
    fn();
    double probe = seconds_since(probe_start);
    long long batch = 1;
    if (probe < min_window)
        batch = static_cast<long long>(min_window / std::max(probe, 1e-9)) + 1;

    std::vector<double> samples;
    samples.reserve(reps);
    for (int r = 0; r < reps; ++r) {
        const auto start = clock::now();
        for (long long i = 0; i < batch; ++i) fn();
        samples.push_back(seconds_since(start) / static_cast<double>(batch));
    }
    std::nth_element(samples.begin(), samples.begin() + samples.size() / 2,
                     samples.end());
    return samples[samples.size() / 2];
}

}  // namespace timing
}  // namespace parobs
