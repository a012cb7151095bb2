#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>
#include <vector>

#include "proxynas/accuracy_model.hpp"
#include "proxynas/errors.hpp"
#include "proxynas/evolution.hpp"
#include "proxynas/pareto.hpp"
#include "proxynas/roofline.hpp"
#include "proxynas/rng.hpp"
#include "proxynas/search_space.hpp"
#include "support/oracles.hpp"

#include "json.hpp"

using namespace proxynas;

namespace {

struct Bench {
    SearchSpaceSpec space;
    AccuracyPredictor acc;
    LatencyPredictor lat_pred;
    LatencyFn lat;
};

// 625-genotype cell bench with mixed-regime per-operator latency; accuracy
// jitter keeps the front nontrivial.  f0 well below the median FLOPs gives
// the strongly concave accuracy-latency curve a scalarized sweep can cover.
Bench cell_bench() {
    Bench b;
    b.space = default_cell_space(4);
    SyntheticAccuracyConfig acfg;
    acfg.jitter_sigma = 0.01;
    acfg.seed = 5;
    acfg.f0 = 0.25 * median_sample_flops(b.space, 1000, 0);
    b.acc = AccuracyPredictor::synthetic(b.space, acfg);
    const RooflineDevice dev{"bench", 25.0, 9.0, 0.8, Granularity::PerOperator};
    b.lat_pred = roofline_predictor(dev, b.space);
    const SearchSpaceSpec space = b.space;
    const LatencyPredictor pred = b.lat_pred;
    b.lat = [space, pred](const Genotype& g) { return predict_genotype(pred, space, g); };
    return b;
}

std::vector<ScoredArch> score_all(const Bench& b) {
    std::vector<ScoredArch> out;
    for (const Genotype& g : enumerate_space(b.space))
        out.push_back({g, b.acc.predict_accuracy(b.space, g), b.lat(g), LatencySource::Predicted});
    return out;
}

} // namespace

TEST_CASE("scalarized fitness boundaries and hand value") {
    CHECK(scalarized_fitness(0.73, 12.0, 0.0) == doctest::Approx(-0.73));
    CHECK(scalarized_fitness(0.73, 12.0, 1.0) == doctest::Approx(12.0));
    CHECK(scalarized_fitness(0.7, 10.0, 0.5) == doctest::Approx(4.65));
    CHECK(scalarized_fitness(0.7, 10.0, 0.5, 10.0) == doctest::Approx(0.5 * 1.0 - 0.5 * 0.7));
}

TEST_CASE("crossover of identical parents is the identity") {
    const SearchSpaceSpec space = default_mbv2_space();
    const Genotype p = random_sample(space, 3);
    CHECK(crossover(space, p, p, 17) == p);
}

TEST_CASE("crossover only ever copies parent genes") {
    const SearchSpaceSpec space = default_mbv2_space();
    for (std::uint64_t trial = 0; trial < 1000; ++trial) {
        const Genotype a = random_sample(space, trial * 2);
        const Genotype b = random_sample(space, trial * 2 + 1);
        const Genotype child = crossover(space, a, b, trial);
        CHECK_NOTHROW(validate_genotype(space, child));
        for (std::size_t i = 0; i < child.kernel_choice.size(); ++i) {
            const int v = child.kernel_choice[i];
            CHECK((v == a.kernel_choice[i] || v == b.kernel_choice[i]));
        }
        for (std::size_t i = 0; i < child.expansion_choice.size(); ++i) {
            const int v = child.expansion_choice[i];
            CHECK((v == a.expansion_choice[i] || v == b.expansion_choice[i]));
        }
        for (std::size_t i = 0; i < child.stage_depth.size(); ++i) {
            const int v = child.stage_depth[i];
            CHECK((v == a.stage_depth[i] || v == b.stage_depth[i]));
        }
    }
}

TEST_CASE("crossover picks each parent half the time") {
    const SearchSpaceSpec space = default_cell_space(6);
    // Parents that differ in every gene make attribution unambiguous.
    Genotype a, b;
    a.edge_op.assign(6, 0);
    b.edge_op.assign(6, 1);
    const int trials = 10000;
    int from_a = 0;
    for (int t = 0; t < trials; ++t) {
        const Genotype child = crossover(space, a, b, static_cast<std::uint64_t>(t));
        for (int e = 0; e < 6; ++e)
            if (child.edge_op[static_cast<std::size_t>(e)] == 0) ++from_a;
    }
    const double freq = from_a / (6.0 * trials);
    const double tol = 4.0 / std::sqrt(static_cast<double>(trials)) * 2.0;
    CHECK(std::abs(freq - 0.5) <= tol);
}

TEST_CASE("crossover validates the parents' space") {
    const SearchSpaceSpec mbv2 = default_mbv2_space();
    const SearchSpaceSpec cell = default_cell_space(4);
    const Genotype a = random_sample(mbv2, 1);
    const Genotype c = random_sample(cell, 1);
    CHECK_THROWS_AS(crossover(mbv2, a, c, 3), Error);
}

TEST_CASE("mutation resamples the whole genotype") {
    const SearchSpaceSpec space = default_mbv2_space();
    const Genotype g = random_sample(space, 40);
    CHECK(mutate(space, g, 7) == mutate(space, g, 7));
    // A full resample is independent of the input genotype.
    const Genotype h = random_sample(space, 41);
    CHECK(mutate(space, g, 7) == mutate(space, h, 7));

    for (std::uint64_t seed = 0; seed < 200; ++seed)
        CHECK_NOTHROW(validate_genotype(space, mutate(space, g, seed)));
}

TEST_CASE("mutations from distinct seeds collide at the uniform rate") {
    const SearchSpaceSpec space = default_cell_space(4); // 625 genotypes
    const Genotype g = random_sample(space, 1);
    const int trials = 2000;
    int collisions = 0;
    for (int t = 0; t < trials; ++t) {
        const Genotype a = mutate(space, g, static_cast<std::uint64_t>(2 * t) + 100);
        const Genotype b = mutate(space, g, static_cast<std::uint64_t>(2 * t + 1) + 100);
        if (a == b) ++collisions;
    }
    // Uniform draws collide with probability 1/625; 2000 trials expect 3.2.
    CHECK(collisions <= 12);
}

TEST_CASE("mutated kernel values are uniform") {
    const SearchSpaceSpec space = default_mbv2_space();
    const Genotype g = random_sample(space, 2);
    const int trials = 10000;
    int counts[3] = {0, 0, 0};
    for (int t = 0; t < trials; ++t)
        ++counts[mutate(space, g, static_cast<std::uint64_t>(t)).kernel_choice[0]];
    for (int c : counts)
        CHECK(std::abs(c / static_cast<double>(trials) - 1.0 / 3.0) <= 0.05);
}

TEST_CASE("evolution keeps population size and improves monotonically") {
    const Bench b = cell_bench();
    EvoConfig cfg;
    cfg.population = 60;
    cfg.generations = 15;
    cfg.tradeoff_t = 0.5;
    cfg.seed = 3;

    std::vector<GenerationLogEntry> log;
    const EvolutionResult result = run_evolution(
        b.space, b.acc, b.lat, cfg, 1, [&](const GenerationLogEntry& e) { log.push_back(e); });

    CHECK(result.population.size() == 60);
    REQUIRE(log.size() == 16); // initial population plus one per generation
    for (std::size_t i = 1; i < log.size(); ++i) {
        CHECK(log[i].best_fitness <= log[i - 1].best_fitness);
        CHECK(log[i].generation == static_cast<int>(i));
    }
    CHECK(result.best.fitness == log.back().best_fitness);
    CHECK(std::is_sorted(result.population.begin(), result.population.end(),
                         [](const Individual& x, const Individual& y) {
                             return x.fitness < y.fitness;
                         }));
    for (const Individual& ind : result.population) {
        CHECK_NOTHROW(validate_genotype(b.space, ind.genotype));
        CHECK(ind.fitness ==
              doctest::Approx(scalarized_fitness(ind.accuracy, ind.latency_ms, 0.5)));
    }
}

TEST_CASE("evolution output is identical for any worker count") {
    const Bench b = cell_bench();
    EvoConfig cfg;
    cfg.population = 50;
    cfg.generations = 10;
    cfg.tradeoff_t = 0.3;
    cfg.seed = 9;

    std::vector<GenerationLogEntry> log1, log8;
    const EvolutionResult r1 = run_evolution(b.space, b.acc, b.lat, cfg, 1,
                                             [&](const GenerationLogEntry& e) { log1.push_back(e); });
    const EvolutionResult r8 = run_evolution(b.space, b.acc, b.lat, cfg, 8,
                                             [&](const GenerationLogEntry& e) { log8.push_back(e); });

    REQUIRE(r1.population.size() == r8.population.size());
    for (std::size_t i = 0; i < r1.population.size(); ++i) {
        CHECK(r1.population[i].genotype == r8.population[i].genotype);
        CHECK(r1.population[i].fitness == r8.population[i].fitness);
    }
    REQUIRE(log1.size() == log8.size());
    for (std::size_t i = 0; i < log1.size(); ++i) {
        CHECK(log1[i].population_hash == log8[i].population_hash);
        CHECK(log1[i].best_fitness == log8[i].best_fitness);
        CHECK(log1[i].best_genotype_json == log8[i].best_genotype_json);
    }
}

TEST_CASE("config validation") {
    const Bench b = cell_bench();
    EvoConfig cfg;
    cfg.population = 1;
    CHECK_THROWS_AS(run_evolution(b.space, b.acc, b.lat, cfg), TooFewSamples);
    cfg.population = 10;
    cfg.parent_ratio = 0.0;
    CHECK_THROWS_AS(run_evolution(b.space, b.acc, b.lat, cfg), DegenerateInput);
    cfg.parent_ratio = 1.5;
    CHECK_THROWS_AS(run_evolution(b.space, b.acc, b.lat, cfg), DegenerateInput);
}

TEST_CASE("constrained mode respects a feasible latency limit") {
    const Bench b = cell_bench();
    const auto all = score_all(b);
    std::vector<double> lats;
    for (const ScoredArch& a : all) lats.push_back(a.latency_ms);
    std::sort(lats.begin(), lats.end());
    const double limit = lats[lats.size() / 2];

    EvoConfig cfg;
    cfg.mode = EvoMode::Constrained;
    cfg.latency_limit_ms = limit;
    cfg.population = 150;
    cfg.generations = 15;
    cfg.seed = 21;
    const EvolutionResult result = run_evolution(b.space, b.acc, b.lat, cfg);
    CHECK(result.best.latency_ms <= limit);
    CHECK(result.best.fitness == doctest::Approx(-result.best.accuracy));

    // The best feasible accuracy is near the constrained optimum.
    double best_acc = 0.0;
    for (const ScoredArch& a : all)
        if (a.latency_ms <= limit) best_acc = std::max(best_acc, a.accuracy);
    CHECK(result.best.accuracy >= best_acc - 0.02);
}

TEST_CASE("an unattainable limit raises after the retry cap") {
    const Bench b = cell_bench();
    EvoConfig cfg;
    cfg.mode = EvoMode::Constrained;
    cfg.latency_limit_ms = 1e-9;
    cfg.population = 20;
    cfg.generations = 3;
    CHECK_THROWS_AS(run_evolution(b.space, b.acc, b.lat, cfg), InfeasibleConstraint);
}

TEST_CASE("evolution finds exhaustive best fitness on most grid points") {
    const Bench b = cell_bench();
    const auto all = score_all(b);

    EvoConfig cfg;
    cfg.population = 200;
    cfg.generations = 25;
    cfg.seed = 2;

    int exact = 0;
    const int grid_points = 11;
    for (int i = 0; i < grid_points; ++i) {
        const double t = static_cast<double>(i) / (grid_points - 1);
        cfg.tradeoff_t = t;
        cfg.seed = 2 + static_cast<std::uint64_t>(i);
        const EvolutionResult r = run_evolution(b.space, b.acc, b.lat, cfg);
        double oracle = std::numeric_limits<double>::infinity();
        for (const ScoredArch& a : all)
            oracle = std::min(oracle, scalarized_fitness(a.accuracy, a.latency_ms, t));
        CHECK(r.best.fitness >= oracle - 1e-12);
        if (r.best.fitness <= oracle + 1e-12) ++exact;
    }
    CHECK(exact >= 11 * 95 / 100);
}

TEST_CASE("singleton sweep grid yields a singleton set") {
    const Bench b = cell_bench();
    EvoConfig cfg;
    cfg.population = 40;
    cfg.generations = 8;
    cfg.seed = 31;
    const ParetoSet set = sweep_tradeoff(b.space, b.acc, b.lat, cfg, {0.5});
    CHECK(set.members.size() == 1);
    CHECK(set.members[0].latency_source == LatencySource::Predicted);
}

TEST_CASE("boundary sweep holds both extreme architectures") {
    const Bench b = cell_bench();
    EvoConfig cfg;
    cfg.population = 200;
    cfg.generations = 25;
    cfg.seed = 33;
    const ParetoSet set = sweep_tradeoff(b.space, b.acc, b.lat, cfg, {0.0, 1.0});
    REQUIRE(!set.members.empty());

    // At this population-to-space ratio each boundary run reaches the global
    // optimum of its objective, so the set brackets the exhaustive extremes.
    double oracle_max_acc = 0.0;
    double oracle_min_lat = std::numeric_limits<double>::infinity();
    for (const ScoredArch& a : score_all(b)) {
        oracle_max_acc = std::max(oracle_max_acc, a.accuracy);
        oracle_min_lat = std::min(oracle_min_lat, a.latency_ms);
    }
    double max_acc = 0.0;
    double min_lat = std::numeric_limits<double>::infinity();
    for (const ScoredArch& a : set.members) {
        max_acc = std::max(max_acc, a.accuracy);
        min_lat = std::min(min_lat, a.latency_ms);
    }
    CHECK(max_acc == doctest::Approx(oracle_max_acc).epsilon(1e-9));
    CHECK(min_lat == doctest::Approx(oracle_min_lat).epsilon(1e-9));
}

TEST_CASE("sweep output carries no dominated pair") {
    const Bench b = cell_bench();
    EvoConfig cfg;
    cfg.population = 60;
    cfg.generations = 10;
    cfg.seed = 35;
    std::vector<double> grid;
    for (int i = 0; i <= 10; ++i) grid.push_back(i / 10.0);
    const ParetoSet set = sweep_tradeoff(b.space, b.acc, b.lat, cfg, grid);
    for (const ScoredArch& a : set.members)
        for (const ScoredArch& c : set.members) CHECK_FALSE(dominates(a, c));

    // Deduplication: no genotype appears twice.
    std::set<std::uint64_t> prints;
    for (const ScoredArch& a : set.members)
        CHECK(prints.insert(genotype_fingerprint(b.space, a.genotype)).second);
}

TEST_CASE("sweep approaches the exhaustive front hypervolume") {
    const Bench b = cell_bench();
    const ParetoSet oracle = exhaustive_search(b.space, b.acc, b.lat);
    const auto all = score_all(b);
    double ref_lat = 0.0;
    for (const ScoredArch& a : all) ref_lat = std::max(ref_lat, a.latency_ms);

    EvoConfig cfg;
    cfg.population = 150;
    cfg.generations = 20;
    cfg.seed = 4;
    cfg.normalize_latency = true;
    std::vector<double> grid;
    for (int i = 0; i <= 10; ++i) grid.push_back(i / 10.0);
    const ParetoSet swept = sweep_tradeoff(b.space, b.acc, b.lat, cfg, grid);

    const double hv_oracle = testsupport::hypervolume(oracle.members, ref_lat, 0.0);
    const double hv_swept = testsupport::hypervolume(swept.members, ref_lat, 0.0);
    CHECK(hv_swept >= 0.95 * hv_oracle);
    CHECK(hv_swept <= hv_oracle + 1e-12);
}

TEST_CASE("exhaustive search matches the quadratic front oracle") {
    const Bench b = cell_bench();
    const ParetoSet front = exhaustive_search(b.space, b.acc, b.lat);
    const auto brute = testsupport::brute_force_front(score_all(b));
    std::multiset<std::uint64_t> a, c;
    for (const ScoredArch& m : front.members) a.insert(genotype_fingerprint(b.space, m.genotype));
    for (const ScoredArch& m : brute) c.insert(genotype_fingerprint(b.space, m.genotype));
    CHECK(a == c);
    CHECK_THROWS_AS(
        exhaustive_search(default_mbv2_space(), b.acc, b.lat), SpaceTooLarge);
}

TEST_CASE("exhaustive search keeps both points of a two-genotype space") {
    SearchSpaceSpec space = default_cell_space(4);
    space.id = "pair";
    space.cell_edge_count = 1;
    space.operator_labels = {"small", "large"};
    space.cost_table.assign(1, {CostEntry{2.0e8, 5.0e7}, CostEntry{6.0e8, 9.0e7}});
    validate_space(space);
    SyntheticAccuracyConfig acfg;
    acfg.jitter_sigma = 0.0;
    const AccuracyPredictor acc = AccuracyPredictor::synthetic(space, acfg);
    // Latency and accuracy both rise with FLOPs, so neither genotype
    // dominates the other.
    const LatencyFn lat = [&](const Genotype& g) {
        return arch_stats(space, g).flops * 1e-8;
    };
    const ParetoSet front = exhaustive_search(space, acc, lat);
    REQUIRE(front.members.size() == 2);
    std::set<std::uint64_t> seen;
    for (const ScoredArch& m : front.members)
        seen.insert(genotype_fingerprint(space, m.genotype));
    CHECK(seen.size() == 2);
}

TEST_CASE("constant accuracy collapses the front to the fastest genotype") {
    const SearchSpaceSpec space = default_cell_space(4);
    // A saturated surrogate (f0 tiny against real flops) scores every
    // genotype at a_max exactly.
    SyntheticAccuracyConfig acfg;
    acfg.jitter_sigma = 0.0;
    acfg.a_max = 0.5;
    acfg.f0 = 1.0; // saturates: every genotype scores a_max exactly
    const AccuracyPredictor acc = AccuracyPredictor::synthetic(space, acfg);

    const RooflineDevice dev{"bench", 25.0, 9.0, 0.8, Granularity::PerOperator};
    const LatencyPredictor pred = roofline_predictor(dev, space);
    const LatencyFn lat = [&](const Genotype& g) { return predict_genotype(pred, space, g); };
    const ParetoSet front = exhaustive_search(space, acc, lat);

    double min_lat = std::numeric_limits<double>::infinity();
    for (const Genotype& g : enumerate_space(space)) min_lat = std::min(min_lat, lat(g));
    for (const ScoredArch& m : front.members) {
        CHECK(m.latency_ms == doctest::Approx(min_lat));
        CHECK(m.accuracy == 0.5);
    }
}

TEST_CASE("generation log serializes its fields") {
    GenerationLogEntry e;
    e.generation = 4;
    e.best_fitness = -0.25;
    e.best_genotype_json = "{\"edge_op\":[1,2,0,3]}";
    e.population_hash = 0xabcdef12345678ULL;
    const std::string text = generation_log_to_json(e);
    const nlohmann::json j = nlohmann::json::parse(text);
    CHECK(j.at("generation").get<int>() == 4);
    CHECK(j.at("best_fitness").get<double>() == -0.25);
    CHECK(j.at("best_genotype").at("edge_op").size() == 4);
    CHECK(j.at("population_hash").get<std::uint64_t>() == 0xabcdef12345678ULL);
}
