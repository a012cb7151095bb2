#pragma once

#include <cstdint>
#include <map>
#include <string>

#include "proxynas/search_space.hpp"

namespace proxynas {

/// Saturating-in-FLOPs synthetic accuracy:
///   acc(g) = a_max * (1 - exp(-flops(g) / f0)) + jitter(g),
/// clamped to [0, 1].  jitter(g) is uniform in [-sigma, sigma], keyed by
/// (seed, canonical genotype), so an architecture always scores the same.
struct SyntheticAccuracyConfig {
    double a_max = 0.80;
    double f0 = 0.0; // 0 selects the space default (median FLOPs of 1000 samples)
    double jitter_sigma = 0.005;
    std::uint64_t seed = 0;
};

/// Accuracy source: synthetic surrogate or an exact lookup table.
/// Default-constructed instances are unusable placeholders; build one with
/// synthetic() or from_table_csv() before predicting.
class AccuracyPredictor {
public:
    AccuracyPredictor() = default;

    /// Synthetic mode.  When cfg.f0 == 0 it is replaced by the median FLOPs
    /// of 1000 seeded random samples from the space.
    static AccuracyPredictor synthetic(const SearchSpaceSpec& space,
                                       SyntheticAccuracyConfig cfg);

    /// Tabular mode over a CSV with header `genotype_json,accuracy`.
    /// Throws ParseError (bad rows or duplicates) and OutOfRangeAccuracy.
    static AccuracyPredictor from_table_csv(const SearchSpaceSpec& space,
                                            const std::string& csv_text);

    /// Tabular lookups throw UnknownArchitecture for genotypes not listed.
    double predict_accuracy(const SearchSpaceSpec& space, const Genotype& g) const;

    bool is_tabular() const { return tabular_; }
    const SyntheticAccuracyConfig& config() const { return cfg_; }

private:
    bool tabular_ = false;
    SyntheticAccuracyConfig cfg_;
    std::map<std::uint64_t, double> table_; // fingerprint -> accuracy
};

/// Median FLOPs over `count` seeded uniform samples; the default f0 scale.
double median_sample_flops(const SearchSpaceSpec& space, int count, std::uint64_t seed);

} // namespace proxynas
