#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "proxynas/accuracy_model.hpp"
#include "proxynas/pareto.hpp"
#include "proxynas/search_space.hpp"

namespace proxynas {

/// Search objective.
/// Scalarized:  minimize (t - 1) * accuracy + t * latency for a tradeoff
///              coefficient t in [0, 1] (latency optionally normalized).
/// Constrained: minimize -accuracy subject to latency <= latency_limit_ms;
///              violators carry a +inf sentinel fitness.
enum class EvoMode { Scalarized, Constrained };

struct EvoConfig {
    int population = 1000;
    double parent_ratio = 0.25;  // top ceil(population * ratio) survive
    double mutation_prob = 0.1;  // chance that an eligible child mutates
    double mutation_ratio = 0.25; // fraction of children eligible to mutate
    int generations = 50;
    EvoMode mode = EvoMode::Scalarized;
    double tradeoff_t = 0.5;        // Scalarized
    double latency_limit_ms = 0.0;  // Constrained
    bool normalize_latency = false; // divide latency by a scale in the fitness
    double normalize_scale = 0.0;   // 0: max latency of the initial population
    std::uint64_t seed = 0;
};

struct Individual {
    Genotype genotype;
    double accuracy = 0.0;
    double latency_ms = 0.0;
    double fitness = 0.0;
};

using LatencyFn = std::function<double(const Genotype&)>;

struct GenerationLogEntry {
    int generation = 0;
    double best_fitness = 0.0;
    std::string best_genotype_json;
    std::uint64_t population_hash = 0;
};

using GenerationLogger = std::function<void(const GenerationLogEntry&)>;

struct EvolutionResult {
    std::vector<Individual> population; // final generation, fitness ascending
    Individual best;
    double normalize_scale = 0.0; // scale actually used (0 when disabled)
};

/// Scalarized fitness; latency is divided by normalize_scale when it is > 0.
double scalarized_fitness(double accuracy, double latency_ms, double t,
                          double normalize_scale = 0.0);

/// Uniform per-gene crossover: every gene comes from one of the two parents
/// with equal probability.  Parents must belong to the given space.
Genotype crossover(const SearchSpaceSpec& space, const Genotype& a, const Genotype& b,
                   std::uint64_t seed);

/// Mutation resamples every gene uniformly (a fresh uniform draw).
Genotype mutate(const SearchSpaceSpec& space, const Genotype& g, std::uint64_t seed);

/// Evolutionary loop: seeded initial population, elitist parent selection by
/// ascending fitness, uniform-crossover children from random distinct parent
/// pairs, and resampling mutation on the leading mutation_ratio share of
/// children.  Randomness is keyed by (seed, generation, slot), so results do
/// not depend on the worker count.  Throws InfeasibleConstraint when
/// Constrained initialization finds no feasible individual within
/// 10 * population draws.
EvolutionResult run_evolution(const SearchSpaceSpec& space, const AccuracyPredictor& acc,
                              const LatencyFn& latency, const EvoConfig& cfg,
                              int workers = 1, const GenerationLogger& logger = nullptr);

/// One evolution run per grid value (tradeoff t or latency limit depending on
/// cfg.mode), keeping each run's best individual, deduplicating genotypes,
/// and dropping dominated points.  Latencies in the result are Predicted.
ParetoSet sweep_tradeoff(const SearchSpaceSpec& space, const AccuracyPredictor& acc,
                         const LatencyFn& latency, const EvoConfig& cfg,
                         const std::vector<double>& grid, int workers = 1);

/// Scores every genotype in an enumerable space and returns the exact front.
ParetoSet exhaustive_search(const SearchSpaceSpec& space, const AccuracyPredictor& acc,
                            const LatencyFn& latency, std::uint64_t enumerate_cap = 1000000,
                            int workers = 1);

std::string generation_log_to_json(const GenerationLogEntry& entry);

} // namespace proxynas
