#include "proxynas/evolution.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>

#include <json.hpp>

#include "proxynas/errors.hpp"
#include "proxynas/parallel.hpp"
#include "proxynas/rng.hpp"

namespace proxynas {

namespace {

constexpr std::uint64_t kInitStream = 0x696e697400ULL;
constexpr std::uint64_t kBreedStream = 0x627265656400ULL;
constexpr std::uint64_t kSweepStream = 0x7377656570ULL;
constexpr int kInitRetryRounds = 10;

std::vector<int*> gene_slots(const SearchSpaceSpec& space, Genotype& g) {
    std::vector<int*> slots;
    switch (space.kind) {
    case SpaceKind::MbV2Like:
        for (auto& v : g.kernel_choice) slots.push_back(&v);
        for (auto& v : g.expansion_choice) slots.push_back(&v);
        for (auto& v : g.stage_depth) slots.push_back(&v);
        break;
    case SpaceKind::FbNetLike:
        for (auto& v : g.block_choice) slots.push_back(&v);
        break;
    case SpaceKind::CellLike:
        for (auto& v : g.edge_op) slots.push_back(&v);
        break;
    }
    return slots;
}

} // namespace

double scalarized_fitness(double accuracy, double latency_ms, double t,
                          double normalize_scale) {
    const double latency = normalize_scale > 0.0 ? latency_ms / normalize_scale : latency_ms;
    return (t - 1.0) * accuracy + t * latency;
}

Genotype crossover(const SearchSpaceSpec& space, const Genotype& a, const Genotype& b,
                   std::uint64_t seed) {
    validate_genotype(space, a);
    validate_genotype(space, b);
    Rng rng(seed);
    Genotype child = a;
    Genotype other = b;
    const std::vector<int*> child_genes = gene_slots(space, child);
    const std::vector<int*> other_genes = gene_slots(space, other);
    for (std::size_t i = 0; i < child_genes.size(); ++i) {
        if (rng.next_bool(0.5)) *child_genes[i] = *other_genes[i];
    }
    return child;
}

Genotype mutate(const SearchSpaceSpec& space, const Genotype& g, std::uint64_t seed) {
    validate_genotype(space, g);
    return random_sample(space, seed);
}

namespace {

struct FitnessContext {
    const SearchSpaceSpec& space;
    const AccuracyPredictor& acc;
    const LatencyFn& latency;
    const EvoConfig& cfg;
    double scale = 0.0; // normalization scale, 0 when disabled

    void score(Individual& ind) const {
        ind.accuracy = acc.predict_accuracy(space, ind.genotype);
        ind.latency_ms = latency(ind.genotype);
        ind.fitness = fitness_of(ind);
    }

    double fitness_of(const Individual& ind) const {
        if (cfg.mode == EvoMode::Constrained) {
            if (ind.latency_ms > cfg.latency_limit_ms)
                return std::numeric_limits<double>::infinity();
            return -ind.accuracy;
        }
        return scalarized_fitness(ind.accuracy, ind.latency_ms, cfg.tradeoff_t, scale);
    }
};

void sort_by_fitness(std::vector<Individual>& population) {
    std::stable_sort(population.begin(), population.end(),
                     [](const Individual& a, const Individual& b) {
                         return a.fitness < b.fitness;
                     });
}

std::uint64_t population_digest(const SearchSpaceSpec& space,
                                const std::vector<Individual>& population) {
    HashFold h;
    for (const Individual& ind : population) {
        h.add(genotype_fingerprint(space, ind.genotype));
        h.add(std::bit_cast<std::uint64_t>(ind.fitness));
    }
    return h.value();
}

} // namespace

EvolutionResult run_evolution(const SearchSpaceSpec& space, const AccuracyPredictor& acc,
                              const LatencyFn& latency, const EvoConfig& cfg,
                              int workers, const GenerationLogger& logger) {
    if (cfg.population < 2) throw TooFewSamples("population must be >= 2");
    if (cfg.parent_ratio <= 0.0 || cfg.parent_ratio > 1.0)
        throw DegenerateInput("parent_ratio must be in (0, 1]");

    FitnessContext ctx{space, acc, latency, cfg, 0.0};
    const int pop = cfg.population;

    // Initial population; Constrained mode redraws whole rounds until one
    // feasible individual appears, capped at kInitRetryRounds * population
    // total draws.
    std::vector<Individual> population(static_cast<std::size_t>(pop));
    bool feasible_found = false;
    for (int round = 0; round < kInitRetryRounds; ++round) {
        parallel_for(pop, workers, [&](int j) {
            Individual& ind = population[static_cast<std::size_t>(j)];
            ind.genotype = random_sample(
                space, mix_seed(cfg.seed, kInitStream,
                                static_cast<std::uint64_t>(round) * pop + j));
            ind.accuracy = ctx.acc.predict_accuracy(space, ind.genotype);
            ind.latency_ms = ctx.latency(ind.genotype);
        });
        if (cfg.mode != EvoMode::Constrained) {
            feasible_found = true;
            break;
        }
        feasible_found = std::any_of(population.begin(), population.end(),
                                     [&](const Individual& ind) {
                                         return ind.latency_ms <= cfg.latency_limit_ms;
                                     });
        if (feasible_found) break;
    }
    if (!feasible_found)
        throw InfeasibleConstraint("no individual meets the latency limit after " +
                                   std::to_string(kInitRetryRounds * pop) + " draws");

    if (cfg.normalize_latency) {
        if (cfg.normalize_scale > 0.0) {
            ctx.scale = cfg.normalize_scale;
        } else {
            double max_latency = 0.0;
            for (const Individual& ind : population)
                max_latency = std::max(max_latency, ind.latency_ms);
            ctx.scale = max_latency;
        }
    }
    for (Individual& ind : population) ind.fitness = ctx.fitness_of(ind);
    sort_by_fitness(population);

    auto log_generation = [&](int generation) {
        if (!logger) return;
        GenerationLogEntry entry;
        entry.generation = generation;
        entry.best_fitness = population.front().fitness;
        entry.best_genotype_json = genotype_to_json(space, population.front().genotype);
        entry.population_hash = population_digest(space, population);
        logger(entry);
    };
    log_generation(0);

    const int parent_count = std::min(
        pop, static_cast<int>(std::ceil(cfg.parent_ratio * static_cast<double>(pop))));
    const int child_count = pop - parent_count;
    const int mutable_children = static_cast<int>(
        std::ceil(cfg.mutation_ratio * static_cast<double>(child_count)));

    std::vector<Individual> children(static_cast<std::size_t>(child_count));
    for (int generation = 1; generation <= cfg.generations; ++generation) {
        // Population is fitness-ascending; the leading parent_count members
        // are the breeding pool and survive unchanged (elitism).
        parallel_for(child_count, workers, [&](int j) {
            Rng rng(mix_seed(cfg.seed, kBreedStream,
                             static_cast<std::uint64_t>(generation),
                             static_cast<std::uint64_t>(j)));
            const int p1 = rng.next_index(parent_count);
            int p2 = p1;
            if (parent_count >= 2) {
                while (p2 == p1) p2 = rng.next_index(parent_count);
            }
            Individual& child = children[static_cast<std::size_t>(j)];
            child.genotype = crossover(space, population[static_cast<std::size_t>(p1)].genotype,
                                       population[static_cast<std::size_t>(p2)].genotype,
                                       rng.next_u64());
            if (j < mutable_children && rng.next_bool(cfg.mutation_prob))
                child.genotype = mutate(space, child.genotype, rng.next_u64());
            ctx.score(child);
        });
        population.resize(static_cast<std::size_t>(parent_count));
        population.insert(population.end(), children.begin(), children.end());
        sort_by_fitness(population);
        log_generation(generation);
    }

    EvolutionResult result;
    result.best = population.front();
    result.population = std::move(population);
    result.normalize_scale = ctx.scale;
    return result;
}

ParetoSet sweep_tradeoff(const SearchSpaceSpec& space, const AccuracyPredictor& acc,
                         const LatencyFn& latency, const EvoConfig& cfg,
                         const std::vector<double>& grid, int workers) {
    if (grid.empty()) throw EmptyInput("tradeoff grid is empty");

    std::vector<ScoredArch> candidates;
    std::vector<std::uint64_t> seen;
    for (std::size_t i = 0; i < grid.size(); ++i) {
        EvoConfig run_cfg = cfg;
        run_cfg.seed = mix_seed(cfg.seed, kSweepStream, static_cast<std::uint64_t>(i));
        if (cfg.mode == EvoMode::Scalarized) run_cfg.tradeoff_t = grid[i];
        else run_cfg.latency_limit_ms = grid[i];
        const EvolutionResult run = run_evolution(space, acc, latency, run_cfg, workers);

        const std::uint64_t fp = genotype_fingerprint(space, run.best.genotype);
        if (std::find(seen.begin(), seen.end(), fp) != seen.end()) continue;
        seen.push_back(fp);
        candidates.push_back({run.best.genotype, run.best.accuracy, run.best.latency_ms,
                              LatencySource::Predicted});
    }
    return pareto_front(candidates);
}

ParetoSet exhaustive_search(const SearchSpaceSpec& space, const AccuracyPredictor& acc,
                            const LatencyFn& latency, std::uint64_t enumerate_cap,
                            int workers) {
    const std::vector<Genotype> all = enumerate_space(space, enumerate_cap);
    std::vector<ScoredArch> scored(all.size());
    parallel_for(static_cast<int>(all.size()), workers, [&](int i) {
        ScoredArch& arch = scored[static_cast<std::size_t>(i)];
        arch.genotype = all[static_cast<std::size_t>(i)];
        arch.accuracy = acc.predict_accuracy(space, arch.genotype);
        arch.latency_ms = latency(arch.genotype);
        arch.latency_source = LatencySource::Predicted;
    });
    return pareto_front(scored);
}

std::string generation_log_to_json(const GenerationLogEntry& entry) {
    nlohmann::ordered_json j;
    j["generation"] = entry.generation;
    j["best_fitness"] = entry.best_fitness;
    j["best_genotype"] = nlohmann::ordered_json::parse(entry.best_genotype_json);
    j["population_hash"] = entry.population_hash;
    return j.dump();
}

} // namespace proxynas
