#pragma once

#include <cstdint>
#include <vector>

namespace proxynas {

/// Deterministic 64-bit generator (splitmix64).  Every randomized routine in
/// the library derives an independent stream from (seed, stream ids) so that
/// results are reproducible bit-for-bit regardless of evaluation order or
/// worker count.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next_u64() {
        std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    /// Uniform double in [0, 1).
    double next_double() {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

    /// Uniform double in [lo, hi).
    double next_double(double lo, double hi) {
        return lo + (hi - lo) * next_double();
    }

    /// Uniform integer in [0, n).  Rejection sampling keeps the draw unbiased.
    std::uint64_t next_below(std::uint64_t n) {
        if (n <= 1) return 0;
        const std::uint64_t bound = (~std::uint64_t{0}) - (~std::uint64_t{0}) % n;
        std::uint64_t v;
        do {
            v = next_u64();
        } while (v >= bound);
        return v % n;
    }

    int next_index(int n) { return static_cast<int>(next_below(static_cast<std::uint64_t>(n))); }

    bool next_bool(double p) { return next_double() < p; }

private:
    std::uint64_t state_;
};

/// Mixes stream identifiers into a seed; used to key per-item generators.
inline std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t a) {
    Rng r(seed ^ (a * 0xd1342543de82ef95ULL + 0x2545f4914f6cdd1dULL));
    return r.next_u64();
}

inline std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t a, std::uint64_t b) {
    return mix_seed(mix_seed(seed, a), b);
}

inline std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t a, std::uint64_t b, std::uint64_t c) {
    return mix_seed(mix_seed(seed, a, b), c);
}

/// First k entries of a seeded permutation of {0, ..., n-1}
/// (partial Fisher-Yates; k == n yields a full shuffle).
inline std::vector<int> sample_indices(int n, int k, Rng& rng) {
    std::vector<int> idx(n);
    for (int i = 0; i < n; ++i) idx[i] = i;
    for (int i = 0; i < k && i < n - 1; ++i) {
        const int j = i + rng.next_index(n - i);
        std::swap(idx[i], idx[j]);
    }
    idx.resize(k);
    return idx;
}

/// Accumulating hash for structural fingerprints (population digests,
/// accuracy jitter keys).
class HashFold {
public:
    explicit HashFold(std::uint64_t seed = 0x9e3779b97f4a7c15ULL) : h_(seed) {}

    void add(std::uint64_t v) {
        h_ ^= v + 0x9e3779b97f4a7c15ULL + (h_ << 6) + (h_ >> 2);
        Rng r(h_);
        h_ = r.next_u64();
    }

    void add_int(int v) { add(static_cast<std::uint64_t>(static_cast<std::int64_t>(v))); }

    std::uint64_t value() const { return h_; }

private:
    std::uint64_t h_;
};

} // namespace proxynas
