#include "proxynas/accuracy_model.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "proxynas/csv.hpp"
#include "proxynas/errors.hpp"
#include "proxynas/rng.hpp"

namespace proxynas {

namespace {

constexpr std::uint64_t kF0SampleStream = 0x66306d6564696e00ULL; // f0 sampling stream tag
constexpr std::uint64_t kJitterStream = 0x6a69747465720000ULL;   // jitter stream tag

} // namespace

double median_sample_flops(const SearchSpaceSpec& space, int count, std::uint64_t seed) {
    std::vector<double> flops(static_cast<std::size_t>(count));
    for (int i = 0; i < count; ++i) {
        const Genotype g =
            random_sample(space, mix_seed(seed, kF0SampleStream, static_cast<std::uint64_t>(i)));
        flops[static_cast<std::size_t>(i)] = arch_stats(space, g).flops;
    }
    std::sort(flops.begin(), flops.end());
    const std::size_t n = flops.size();
    if (n % 2 == 1) return flops[n / 2];
    return 0.5 * (flops[n / 2 - 1] + flops[n / 2]);
}

AccuracyPredictor AccuracyPredictor::synthetic(const SearchSpaceSpec& space,
                                               SyntheticAccuracyConfig cfg) {
    if (cfg.a_max <= 0.0 || cfg.a_max > 1.0)
        throw OutOfRangeAccuracy("a_max must be in (0, 1]");
    if (cfg.jitter_sigma < 0.0) throw OutOfRangeAccuracy("jitter_sigma must be >= 0");
    if (cfg.f0 == 0.0) cfg.f0 = median_sample_flops(space, 1000, cfg.seed);
    if (!(cfg.f0 > 0.0)) throw OutOfRangeAccuracy("f0 must be positive");
    AccuracyPredictor p;
    p.tabular_ = false;
    p.cfg_ = cfg;
    return p;
}

AccuracyPredictor AccuracyPredictor::from_table_csv(const SearchSpaceSpec& space,
                                                    const std::string& csv_text) {
    const auto rows = csv::parse(csv_text);
    if (rows.empty()) throw ParseError("row 1: missing header");
    if (rows[0] != csv::Row{"genotype_json", "accuracy"})
        throw ParseError("row 1: header must be genotype_json,accuracy");

    AccuracyPredictor p;
    p.tabular_ = true;
    for (std::size_t r = 1; r < rows.size(); ++r) {
        const std::string row_label = "row " + std::to_string(r + 1);
        const csv::Row& row = rows[r];
        if (row.size() != 2) throw ParseError(row_label + ": expected 2 fields");
        Genotype g;
        try {
            g = genotype_from_json(space, row[0]);
        } catch (const Error& e) {
            throw ParseError(row_label + ": " + e.what());
        }
        double acc = 0.0;
        try {
            std::size_t pos = 0;
            acc = std::stod(row[1], &pos);
            if (pos != row[1].size()) throw std::invalid_argument("trailing characters");
        } catch (const std::exception&) {
            throw ParseError(row_label + ": accuracy is not a number: " + row[1]);
        }
        if (!(acc >= 0.0 && acc <= 1.0) || !std::isfinite(acc))
            throw OutOfRangeAccuracy(row_label + ": accuracy " + row[1]);
        const std::uint64_t fp = genotype_fingerprint(space, g);
        if (!p.table_.emplace(fp, acc).second)
            throw ParseError(row_label + ": duplicate genotype");
    }
    return p;
}

double AccuracyPredictor::predict_accuracy(const SearchSpaceSpec& space,
                                           const Genotype& g) const {
    if (tabular_) {
        const auto it = table_.find(genotype_fingerprint(space, g));
        if (it == table_.end())
            throw UnknownArchitecture("genotype not present in accuracy table");
        return it->second;
    }
    if (cfg_.f0 <= 0.0)
        throw DegenerateInput("accuracy predictor was never initialized");
    const double flops = arch_stats(space, g).flops;
    double acc = cfg_.a_max * (1.0 - std::exp(-flops / cfg_.f0));
    if (cfg_.jitter_sigma > 0.0) {
        Rng rng(mix_seed(cfg_.seed, kJitterStream, genotype_fingerprint(space, g)));
        acc += rng.next_double(-cfg_.jitter_sigma, cfg_.jitter_sigma);
    }
    return std::clamp(acc, 0.0, 1.0);
}

} // namespace proxynas
