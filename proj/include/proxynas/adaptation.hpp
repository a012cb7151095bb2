#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "proxynas/latency_model.hpp"
#include "proxynas/search_space.hpp"

namespace proxynas {

/// Sparse rescaling of a proxy predictor: adapted weights are
/// (alpha * 1 + b) o w, i.e. one global scale plus a per-operator correction
/// that an L1 term keeps sparse.  Fitting minimizes
///   (1/N) sum_i (adapted(x_i) - y_i)^2 + lambda * |b|_1
/// over (alpha, b), by proximal gradient descent with soft-thresholding and
/// a backtracking line search; the objective never increases across
/// iterations.
struct AdaptationParams {
    double alpha = 1.0;
    std::vector<double> b; // length == base weight count, zero-initialized

    int nonzero_count() const;
};

struct BacktrackingRule {
    double initial_step = 1.0;
    double shrink = 0.5;
    double grow = 2.0;
};

struct AdaptationConfig {
    std::vector<double> lambda_grid; // empty selects default_lambda_grid()
    BacktrackingRule step;
    double rel_tol = 1e-8; // relative objective-decrease stopping threshold
    int max_iter = 50000;
    int train_count = 0;       // 0: every sample not held out for validation
    int validation_count = 20; // validation split for lambda tuning
    std::uint64_t seed = 0;    // keys the train/validation shuffle
};

/// 11 logarithmically spaced values from 1e-4 to 1e1.
std::vector<double> default_lambda_grid();

struct SparseRescaleResult {
    AdaptationParams params;
    bool converged = false;
    bool monotone = true; // objective never increased
    int iterations = 0;
    double objective = 0.0;
};

struct LambdaTuneResult {
    double lambda = 0.0;
    AdaptationParams params;
    double validation_srcc = 0.0;
    bool all_converged = true;
};

double soft_threshold(double v, double t);

/// Adapted effective weights (alpha * 1 + b) o w.
std::vector<double> adapted_weights(const AdaptationParams& params,
                                    std::span<const double> base_weights);

/// Prediction with adapted weights; checks dimensions.
double adapted_predict(const AdaptationParams& params, const LatencyPredictor& base,
                       const ArchEncoding& encoding);

LatencyPredictor adapted_predictor(const AdaptationParams& params,
                                   const LatencyPredictor& base);

/// Training objective at a given point (test and diagnostic hook).
double rescale_objective(const SearchSpaceSpec& space, const LatencyPredictor& base,
                         const std::vector<MeasurementSample>& samples,
                         const AdaptationParams& params, double lambda);

/// Solves the sparse-rescaling problem for one lambda.  Starts at
/// (alpha, b) = (1, 0).  Returns the final iterate with converged = false
/// when max_iter is reached first.  Deterministic.
SparseRescaleResult solve_sparse_rescale(const SearchSpaceSpec& space,
                                         const LatencyPredictor& base,
                                         const std::vector<MeasurementSample>& samples,
                                         double lambda, const AdaptationConfig& cfg);

/// Grid search over lambda: fits on the train split, scores SRCC of adapted
/// predictions against measured latencies on the validation split, prefers
/// the larger lambda on ties.  The split is a seeded shuffle of the sample
/// list.  Throws TooFewSamples when the list cannot cover both splits.
LambdaTuneResult tune_lambda(const SearchSpaceSpec& space, const LatencyPredictor& base,
                             const std::vector<MeasurementSample>& samples,
                             const AdaptationConfig& cfg, int workers = 1);

// --- Serialization ------------------------------------------------------------

std::string adaptation_to_json(const LambdaTuneResult& result);
LambdaTuneResult adaptation_from_json(const std::string& json_text);

} // namespace proxynas
