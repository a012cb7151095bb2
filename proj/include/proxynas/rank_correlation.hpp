#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace proxynas {

/// Spearman rank correlation.  Ties receive average (fractional) ranks; the
/// coefficient is the Pearson correlation of the two rank vectors, which
/// reduces to 1 - 6*sum(d^2)/(n(n^2-1)) when no ties are present.
/// Throws LengthMismatch on unequal lengths and DegenerateInput when either
/// list is constant (or shorter than 2).
double srcc(std::span<const double> a, std::span<const double> b);

/// Average ranks (1-based, ties averaged).
std::vector<double> average_ranks(std::span<const double> values);

struct SrccEstimate {
    double mean = 0.0;
    double std_dev = 0.0; // population standard deviation over runs
    int sample_size = 0;
    int runs = 0;
};

/// Monte-Carlo SRCC estimate: `runs` subsamples of `sample_size` indices
/// drawn without replacement.  A draw whose subsample is degenerate is
/// redrawn (up to 100 retries per run) before failing with DegenerateInput.
/// Deterministic for a fixed seed; run r uses a stream keyed by (seed, r).
SrccEstimate estimate_srcc(std::span<const double> a, std::span<const double> b,
                           int sample_size, int runs, std::uint64_t seed);

struct SrccMatrix {
    std::vector<std::string> device_ids;
    std::vector<std::vector<double>> values; // symmetric, unit diagonal
};

/// Pairwise SRCC over per-device latency lists (aligned by index).
SrccMatrix srcc_matrix(const std::vector<std::string>& device_ids,
                       const std::vector<std::vector<double>>& latencies);

/// CSV rendering with device ids on both axes.
std::string srcc_matrix_to_csv(const SrccMatrix& matrix);

/// Device best connected to the rest: most partners with SRCC >= threshold,
/// ties broken by higher mean off-diagonal SRCC, then by lower device id.
std::string select_proxy(const SrccMatrix& matrix, double threshold = 0.9);

} // namespace proxynas
