#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "proxynas/accuracy_model.hpp"
#include "proxynas/adaptation.hpp"
#include "proxynas/evolution.hpp"
#include "proxynas/latency_model.hpp"
#include "proxynas/pareto.hpp"
#include "proxynas/roofline.hpp"
#include "proxynas/search_space.hpp"

namespace proxynas {

/// Everything already known about the proxy device: its operator-level
/// latency predictor and the architecture front found on it.
struct ProxyState {
    std::string proxy_device_id;
    LatencyPredictor proxy_predictor;
    ParetoSet proxy_pareto; // may be empty unless reuse_mode == ReuseSet
    SearchSpaceSpec space;
    AccuracyPredictor acc_pred;
};

/// What to do when the target tracks the proxy closely enough:
/// ReuseSet hands over the proxy front as-is; ResearchOnProxy re-runs the
/// evolutionary search on the proxy predictor (denser front, no extra
/// measurements).
enum class ReuseMode { ReuseSet, ResearchOnProxy };

struct PipelineConfig {
    double srcc_threshold = 0.9;
    int initial_sample_count = 50;
    int validation_count = 20;
    /// Cap on total target measurements across the whole run.  When the cap
    /// blocks a step, the run finishes best-effort and sets
    /// report.budget_exhausted instead of throwing.
    int adaptation_budget = 200;
    int incremental_batch = 25; // extra measurements per re-adaptation round
    double epsilon_accuracy = 0.001; // final-front similarity margin
    ReuseMode reuse_mode = ReuseMode::ResearchOnProxy;
    EvoConfig evo;
    AdaptationConfig adaptation;
    std::vector<double> t_grid; // empty selects default_tradeoff_grid()
    std::uint64_t seed = 0;
};

/// 11 evenly spaced tradeoff coefficients 0.0, 0.1, ..., 1.0.
std::vector<double> default_tradeoff_grid();

/// The only gateway to target-device latencies.  Every query moves a
/// counter, so a run's measurement cost is auditable.  Queries are issued
/// serially.
class TargetOracle {
public:
    using MeasureFn = std::function<double(const Genotype&)>;

    TargetOracle(std::string device_id, MeasureFn fn);

    static TargetOracle from_simulator(const RooflineDevice& device,
                                       const SearchSpaceSpec& space);
    /// Exact linear device (e.g. a synthetic family member).
    static TargetOracle from_predictor(std::string device_id,
                                       const SearchSpaceSpec& space,
                                       const LatencyPredictor& predictor);
    /// Measurement-file-backed; throws UnknownArchitecture for genotypes the
    /// table does not list.
    static TargetOracle from_table(const SearchSpaceSpec& space,
                                   const MeasurementSet& table);

    double measure(const Genotype& g);
    int query_count() const { return queries_; }
    const std::string& device_id() const { return device_id_; }

private:
    std::string device_id_;
    MeasureFn fn_;
    int queries_ = 0;
};

/// One SRCC evaluation against target measurements, with the total
/// measurement count at the time of the check.
struct SrccCheck {
    int measurements_total = 0;
    double srcc = 0.0;
};

struct PipelineReport {
    std::string branch; // "reuse" or "adapt"
    std::string proxy_device_id;
    std::string target_device_id;
    double srcc_threshold = 0.9;
    SrccCheck initial_check;
    std::vector<SrccCheck> rechecks; // adapt branch only, one per tuning round
    bool adapted = false;
    double lambda = 0.0;            // adapt branch: chosen penalty
    double validation_srcc = 0.0;   // adapt branch: tuning-time validation SRCC
    AdaptationParams adaptation;    // adapt branch: chosen rescaling
    int initial_measurements = 0;
    int adaptation_measurements = 0; // recheck samples + incremental batches
    int final_measurements = 0;      // final candidate set
    int total_measurements = 0;      // always equals the oracle counter
    bool budget_exhausted = false;
    int candidate_count = 0;
    int removed_candidates = 0; // dropped by the final similarity filter
    int front_size = 0;
};

struct PipelineResult {
    ParetoSet pareto;
    ParetoSet candidates; // final candidate set before similarity filtering
    PipelineReport report;
};

/// One-proxy search against a new target device:
///   1. measure initial_sample_count sampled architectures on the target and
///      compare their ranking with the proxy predictor's;
///   2. rank agreement at or above srcc_threshold takes the reuse branch
///      (per reuse_mode); otherwise the proxy predictor is adapted by sparse
///      rescaling, re-checked on a fresh measured sample, and re-tuned with
///      incremental_batch extra measurements per round until the re-check
///      passes or the measurement budget runs out;
///   3. the tradeoff sweep runs on the operative predictor, the resulting
///      candidates are measured on the target, and similarity filtering
///      yields the final front.
/// When the budget blocks the final measurements the front keeps its
/// predicted latencies and the similarity filter is skipped (best effort,
/// flagged).  Deterministic for fixed (state, cfg, workers ignored for
/// ordering): worker count never changes the result.
PipelineResult one_proxy_nas(const ProxyState& state, TargetOracle& target,
                             const PipelineConfig& cfg, int workers = 1);

// --- Serialization ------------------------------------------------------------

std::string report_to_json(const PipelineReport& report);

/// CSV of every SRCC check: header `check,measurements_total,srcc` with rows
/// `initial` then `recheck_1`, `recheck_2`, ...
std::string srcc_trace_to_csv(const PipelineReport& report);

} // namespace proxynas
