#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

namespace dallysim {

// Deterministic draws on top of mt19937_64 (whose output sequence is fixed by
// the standard). Distribution shaping is done by hand because the std
// distribution classes are implementation-defined.

inline double uniform01(std::mt19937_64& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

// Exponential with the given rate (events per second).
inline double exp_draw(std::mt19937_64& rng, double rate) {
    const double u = uniform01(rng);
    return -std::log1p(-u) / rate;
}

inline long long uniform_int(std::mt19937_64& rng, long long lo, long long hi) {
    const double u = uniform01(rng);
    const long long span = hi - lo + 1;
    long long v = lo + static_cast<long long>(u * static_cast<double>(span));
    if (v > hi) v = hi;
    return v;
}

inline double uniform_real(std::mt19937_64& rng, double lo, double hi) {
    return lo + uniform01(rng) * (hi - lo);
}

// Index drawn proportionally to weights (weights need not be normalized).
inline size_t weighted_pick(std::mt19937_64& rng, const std::vector<double>& weights) {
    double total = 0.0;
    for (double w : weights) total += w;
    double u = uniform01(rng) * total;
    for (size_t i = 0; i < weights.size(); ++i) {
        u -= weights[i];
        if (u < 0.0) return i;
    }
    return weights.size() - 1;
}

} // namespace dallysim
