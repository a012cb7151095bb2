#pragma once

#include <string>
#include <vector>

#include "proxynas/search_space.hpp"

namespace proxynas {

/// Operator-level linear latency model: latency = weights . features, where
/// features are the binary block-choice indicators plus the trailing bias.
struct LatencyPredictor {
    std::string space_id;
    std::vector<double> weights; // length == space.encoding_length()
};

struct MeasurementSample {
    Genotype genotype;
    double latency_ms = 0.0;
};

struct MeasurementSet {
    std::string device_id;
    std::vector<MeasurementSample> samples;
};

struct EvalReport {
    double rmse_ms = 0.0;
    double srcc_vs_actual = 0.0;
};

/// Inner product; throws DimensionMismatch when lengths differ.
double predict(const LatencyPredictor& predictor, const ArchEncoding& encoding);

double predict_genotype(const LatencyPredictor& predictor, const SearchSpaceSpec& space,
                        const Genotype& g);

/// Ridge-regularized least squares over encoded samples (normal equations,
/// Cholesky-family factorization).  Underdetermined systems are permitted;
/// ridge != 0 keeps them well posed.  Throws TooFewSamples for < 2 samples
/// and DegenerateDesign when the factorization fails.
LatencyPredictor fit(const SearchSpaceSpec& space,
                     const std::vector<MeasurementSample>& samples,
                     double ridge = 1e-8);

/// Holdout evaluation: RMSE and rank correlation against measured latencies.
/// Requires at least 3 samples.
EvalReport evaluate(const LatencyPredictor& predictor, const SearchSpaceSpec& space,
                    const std::vector<MeasurementSample>& holdout);

// --- Serialization ------------------------------------------------------------

std::string predictor_to_json(const LatencyPredictor& predictor);
LatencyPredictor predictor_from_json(const std::string& json_text);

/// CSV with header `device_id,genotype_json,latency_ms`.
std::string measurements_to_csv(const SearchSpaceSpec& space, const MeasurementSet& set);

/// Parses and validates a measurement CSV against a space.  Row numbers in
/// errors are 1-based and count the header.  Throws ParseError,
/// DuplicateGenotype, or NonpositiveLatency.
MeasurementSet ingest_measurements(const SearchSpaceSpec& space, const std::string& csv_text);

} // namespace proxynas
