#pragma once

#include <cmath>
#include <cstdint>
#include <limits>

#include "qmarkov/errors.hpp"

namespace qmarkov {

// Splittable counter-based stream built on SplitMix64. A stream is keyed by
// (seed, a, b) — for Monte Carlo, (master seed, start state, sample index) —
// so any sample can be regenerated independently of scheduling order, which
// is what makes parallel runs bit-reproducible.
class RngStream {
public:
    explicit RngStream(std::uint64_t seed, std::uint64_t a = 0, std::uint64_t b = 0)
        : state_(combine(combine(mix(seed), a), b)) {}

    std::uint64_t next_u64() {
        state_ += 0x9e3779b97f4a7c15ULL;
        std::uint64_t z = state_;
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    // Uniform on the open interval (0, 1): ((x >> 11) + 0.5) * 2^-53.
    double open01() {
        return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
    }

    // Exponential holding time by inverse transform; rate 0 means "never".
    double exponential(double rate) {
        if (rate < 0.0) throw ValidationError("RngStream::exponential: negative rate");
        if (rate == 0.0) return std::numeric_limits<double>::infinity();
        return -std::log(open01()) / rate;
    }

    // Categorical draw by cumulative-sum inversion over `row` (length n).
    // A draw exactly equal to a boundary selects the lower index.
    int categorical(const double* row, int n) {
        double u = open01();
        double acc = 0.0;
        int last_positive = -1;
        for (int j = 0; j < n; ++j) {
            if (row[j] > 0.0) last_positive = j;
            acc += row[j];
            if (u <= acc) return j;
        }
        // Cumulative rounding can leave acc slightly below 1; fall back to the
        // last index with positive mass.
        if (last_positive < 0) throw ValidationError("RngStream::categorical: empty row");
        return last_positive;
    }

private:
    static std::uint64_t mix(std::uint64_t z) {
        z += 0x9e3779b97f4a7c15ULL;
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }
    static std::uint64_t combine(std::uint64_t h, std::uint64_t v) {
        return mix(h ^ (v + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2)));
    }

    std::uint64_t state_;
};

}  // namespace qmarkov
