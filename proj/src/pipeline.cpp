#include "proxynas/pipeline.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <utility>

#include <json.hpp>

#include "proxynas/csv.hpp"
#include "proxynas/errors.hpp"
#include "proxynas/rank_correlation.hpp"
#include "proxynas/rng.hpp"

namespace proxynas {

namespace {

constexpr std::uint64_t kSampleStream = 0x73616d706c6500ULL;
constexpr std::uint64_t kTuneStream = 0x74756e6500ULL;
constexpr std::uint64_t kEvoStream = 0x65766f00ULL;

} // namespace

std::vector<double> default_tradeoff_grid() {
    std::vector<double> grid;
    grid.reserve(11);
    for (int i = 0; i <= 10; ++i) grid.push_back(static_cast<double>(i) / 10.0);
    return grid;
}

TargetOracle::TargetOracle(std::string device_id, MeasureFn fn)
    : device_id_(std::move(device_id)), fn_(std::move(fn)) {
    if (!fn_) throw EmptyInput("target oracle needs a measurement function");
}

TargetOracle TargetOracle::from_simulator(const RooflineDevice& device,
                                          const SearchSpaceSpec& space) {
    validate_device(device);
    return TargetOracle(device.device_id, [device, space](const Genotype& g) {
        return simulate_latency(device, space, g);
    });
}

TargetOracle TargetOracle::from_predictor(std::string device_id,
                                          const SearchSpaceSpec& space,
                                          const LatencyPredictor& predictor) {
    return TargetOracle(std::move(device_id), [space, predictor](const Genotype& g) {
        return predict_genotype(predictor, space, g);
    });
}

TargetOracle TargetOracle::from_table(const SearchSpaceSpec& space,
                                      const MeasurementSet& table) {
    std::map<std::uint64_t, double> lookup;
    for (const auto& sample : table.samples)
        lookup[genotype_fingerprint(space, sample.genotype)] = sample.latency_ms;
    return TargetOracle(table.device_id, [space, lookup](const Genotype& g) {
        const auto it = lookup.find(genotype_fingerprint(space, g));
        if (it == lookup.end())
            throw UnknownArchitecture("measurement table has no entry for " +
                                      genotype_to_json(space, g));
        return it->second;
    });
}

double TargetOracle::measure(const Genotype& g) {
    ++queries_;
    return fn_(g);
}

namespace {

/// Sequential sampler that avoids repeating a genotype until the space is
/// exhausted; every pipeline draw comes from this one stream, so the sampled
/// sequence depends only on the pipeline seed.
class Sampler {
public:
    Sampler(const SearchSpaceSpec& space, std::uint64_t seed)
        : space_(space), rng_(seed), cardinality_(space_cardinality(space)) {}

    std::vector<Genotype> draw(int count) {
        std::vector<Genotype> out;
        out.reserve(static_cast<std::size_t>(count));
        long attempts = 0;
        const long cap = 1000L * count + 1000L;
        while (static_cast<int>(out.size()) < count && attempts < cap) {
            ++attempts;
            Genotype g = random_sample(space_, rng_.next_u64());
            if (seen_.size() < cardinality_ &&
                !seen_.insert(genotype_fingerprint(space_, g)).second)
                continue;
            out.push_back(std::move(g));
        }
        while (static_cast<int>(out.size()) < count)
            out.push_back(random_sample(space_, rng_.next_u64()));
        return out;
    }

private:
    const SearchSpaceSpec& space_;
    Rng rng_;
    std::set<std::uint64_t> seen_;
    std::uint64_t cardinality_;
};

std::vector<MeasurementSample> measure_all(TargetOracle& target,
                                           const std::vector<Genotype>& genotypes) {
    std::vector<MeasurementSample> out;
    out.reserve(genotypes.size());
    for (const Genotype& g : genotypes) out.push_back({g, target.measure(g)});
    return out;
}

void validate_pipeline_config(const PipelineConfig& cfg) {
    if (cfg.srcc_threshold <= 0.0 || cfg.srcc_threshold > 1.0)
        throw DegenerateInput("srcc_threshold must be in (0, 1]");
    if (cfg.initial_sample_count <= 0 || cfg.validation_count <= 0 ||
        cfg.adaptation_budget <= 0 || cfg.incremental_batch <= 0)
        throw TooFewSamples("pipeline sample counts must be positive");
    if (cfg.epsilon_accuracy < 0.0)
        throw DegenerateInput("epsilon_accuracy must be nonnegative");
}

} // namespace

PipelineResult one_proxy_nas(const ProxyState& state, TargetOracle& target,
                             const PipelineConfig& cfg, int workers) {
    validate_space(state.space);
    validate_pipeline_config(cfg);
    if (state.proxy_predictor.space_id != state.space.id)
        throw SpaceMismatch("proxy predictor belongs to space '" +
                            state.proxy_predictor.space_id + "', not '" +
                            state.space.id + "'");
    if (cfg.reuse_mode == ReuseMode::ReuseSet) {
        if (state.proxy_pareto.members.empty())
            throw EmptyInput("ReuseSet needs a proxy front");
        for (const auto& member : state.proxy_pareto.members)
            validate_genotype(state.space, member.genotype);
    }

    PipelineReport report;
    report.proxy_device_id = state.proxy_device_id;
    report.target_device_id = target.device_id();
    report.srcc_threshold = cfg.srcc_threshold;

    const int budget = cfg.adaptation_budget;
    const int base_queries = target.query_count();
    int used = 0;
    bool exhausted = false;

    Sampler sampler(state.space, mix_seed(cfg.seed, kSampleStream));

    // Stage 1: measure an initial sample and rank it against the proxy.
    const int initial_count = std::min(cfg.initial_sample_count, budget);
    if (initial_count < 2)
        throw TooFewSamples("budget below the minimum rankable sample");
    if (initial_count < cfg.initial_sample_count) exhausted = true;
    std::vector<MeasurementSample> pool = measure_all(target, sampler.draw(initial_count));
    used += initial_count;
    report.initial_measurements = initial_count;

    std::vector<double> proxy_pred;
    std::vector<double> measured_latency;
    proxy_pred.reserve(pool.size());
    measured_latency.reserve(pool.size());
    for (const auto& sample : pool) {
        proxy_pred.push_back(
            predict_genotype(state.proxy_predictor, state.space, sample.genotype));
        measured_latency.push_back(sample.latency_ms);
    }
    const double srcc_initial = srcc(proxy_pred, measured_latency);
    report.initial_check = {used, srcc_initial};

    const bool reuse = srcc_initial >= cfg.srcc_threshold;
    report.branch = reuse ? "reuse" : "adapt";

    // Stage 2 (adapt branch): sparse rescaling, re-checked on a fresh
    // measured holdout; failed rounds grow the training pool.
    LatencyPredictor operative = state.proxy_predictor;
    if (!reuse) {
        report.adapted = true;
        AdaptationConfig tune_cfg = cfg.adaptation;
        tune_cfg.validation_count = cfg.validation_count;

        std::vector<MeasurementSample> recheck_set;
        double best_check = -2.0;
        LambdaTuneResult best;
        bool have_best = false;
        for (int round = 0;; ++round) {
            if (round > 0) {
                if (used + cfg.incremental_batch > budget) {
                    exhausted = true;
                    break;
                }
                const auto extra = measure_all(target, sampler.draw(cfg.incremental_batch));
                pool.insert(pool.end(), extra.begin(), extra.end());
                used += cfg.incremental_batch;
                report.adaptation_measurements += cfg.incremental_batch;
            }
            tune_cfg.seed = mix_seed(cfg.seed, kTuneStream, static_cast<std::uint64_t>(round));
            const LambdaTuneResult tuned =
                tune_lambda(state.space, state.proxy_predictor, pool, tune_cfg, workers);
            if (!have_best) {
                best = tuned;
                have_best = true;
            }

            if (recheck_set.empty()) {
                // The holdout never joins the pool and is measured exactly once.
                if (used + cfg.initial_sample_count > budget) {
                    exhausted = true;
                    best = tuned;
                    break;
                }
                recheck_set = measure_all(target, sampler.draw(cfg.initial_sample_count));
                used += cfg.initial_sample_count;
                report.adaptation_measurements += cfg.initial_sample_count;
            }

            std::vector<double> adapted_pred;
            std::vector<double> recheck_latency;
            adapted_pred.reserve(recheck_set.size());
            recheck_latency.reserve(recheck_set.size());
            for (const auto& sample : recheck_set) {
                adapted_pred.push_back(adapted_predict(
                    tuned.params, state.proxy_predictor, encode(state.space, sample.genotype)));
                recheck_latency.push_back(sample.latency_ms);
            }
            const double check = srcc(adapted_pred, recheck_latency);
            report.rechecks.push_back({used, check});
            if (check > best_check) {
                best_check = check;
                best = tuned;
            }
            if (check >= cfg.srcc_threshold) break;
        }
        report.lambda = best.lambda;
        report.validation_srcc = best.validation_srcc;
        report.adaptation = best.params;
        operative = adapted_predictor(best.params, state.proxy_predictor);
    }

    // Stage 3: candidate front from the operative predictor.
    ParetoSet candidates;
    if (reuse && cfg.reuse_mode == ReuseMode::ReuseSet) {
        std::set<std::uint64_t> kept;
        for (const auto& member : state.proxy_pareto.members) {
            if (!kept.insert(genotype_fingerprint(state.space, member.genotype)).second)
                continue;
            ScoredArch arch = member;
            arch.accuracy = state.acc_pred.predict_accuracy(state.space, arch.genotype);
            arch.latency_source = LatencySource::Predicted;
            candidates.members.push_back(std::move(arch));
        }
    } else {
        EvoConfig evo_cfg = cfg.evo;
        evo_cfg.seed = mix_seed(cfg.seed, kEvoStream, cfg.evo.seed);
        const std::vector<double> grid =
            cfg.t_grid.empty() ? default_tradeoff_grid() : cfg.t_grid;
        const LatencyFn latency_fn = [&operative, &state](const Genotype& g) {
            return predict_genotype(operative, state.space, g);
        };
        candidates = sweep_tradeoff(state.space, state.acc_pred, latency_fn, evo_cfg,
                                    grid, workers);
    }
    const int candidate_count = static_cast<int>(candidates.members.size());
    report.candidate_count = candidate_count;

    // Stage 4: measure the candidates and keep the clean front.  When the
    // budget cannot cover them, the predicted front ships as-is (flagged).
    ParetoSet front;
    if (used + candidate_count <= budget) {
        for (auto& member : candidates.members) {
            member.latency_ms = target.measure(member.genotype);
            member.latency_source = LatencySource::Measured;
        }
        used += candidate_count;
        report.final_measurements = candidate_count;
        front = remove_non_pareto(candidates.members, cfg.epsilon_accuracy);
        report.removed_candidates = candidate_count - static_cast<int>(front.members.size());
    } else {
        exhausted = true;
        front = candidates;
    }

    report.budget_exhausted = exhausted;
    report.total_measurements = used;
    report.front_size = static_cast<int>(front.members.size());
    if (target.query_count() - base_queries != used)
        throw Error("measurement accounting drifted from the oracle counter");

    return {std::move(front), std::move(candidates), std::move(report)};
}

std::string report_to_json(const PipelineReport& report) {
    nlohmann::ordered_json j;
    j["branch"] = report.branch;
    j["proxy_device_id"] = report.proxy_device_id;
    j["target_device_id"] = report.target_device_id;
    j["srcc_threshold"] = report.srcc_threshold;
    j["initial_srcc"] = report.initial_check.srcc;

    nlohmann::ordered_json checks = nlohmann::ordered_json::array();
    {
        nlohmann::ordered_json c;
        c["check"] = "initial";
        c["measurements_total"] = report.initial_check.measurements_total;
        c["srcc"] = report.initial_check.srcc;
        checks.push_back(c);
    }
    for (std::size_t i = 0; i < report.rechecks.size(); ++i) {
        nlohmann::ordered_json c;
        c["check"] = "recheck_" + std::to_string(i + 1);
        c["measurements_total"] = report.rechecks[i].measurements_total;
        c["srcc"] = report.rechecks[i].srcc;
        checks.push_back(c);
    }
    j["checks"] = checks;

    j["adapted"] = report.adapted;
    if (report.adapted) {
        j["lambda"] = report.lambda;
        j["validation_srcc"] = report.validation_srcc;
        j["alpha"] = report.adaptation.alpha;
        j["b_nonzero"] = report.adaptation.nonzero_count();
    }
    j["measurements"] = {{"initial", report.initial_measurements},
                         {"adaptation", report.adaptation_measurements},
                         {"final", report.final_measurements},
                         {"total", report.total_measurements}};
    j["budget_exhausted"] = report.budget_exhausted;
    j["candidate_count"] = report.candidate_count;
    j["removed_candidates"] = report.removed_candidates;
    j["front_size"] = report.front_size;
    return j.dump(2);
}

std::string srcc_trace_to_csv(const PipelineReport& report) {
    std::string out = "check,measurements_total,srcc\n";
    out += csv::join_row({"initial", std::to_string(report.initial_check.measurements_total),
                          csv::format_double(report.initial_check.srcc)});
    out += '\n';
    for (std::size_t i = 0; i < report.rechecks.size(); ++i) {
        out += csv::join_row({"recheck_" + std::to_string(i + 1),
                              std::to_string(report.rechecks[i].measurements_total),
                              csv::format_double(report.rechecks[i].srcc)});
        out += '\n';
    }
    return out;
}

} // namespace proxynas
