#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <numeric>
#include <vector>

#include "proxynas/accuracy_model.hpp"
#include "proxynas/errors.hpp"
#include "proxynas/search_space.hpp"

using namespace proxynas;

namespace {

std::string quote(const std::string& s) {
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += "\"\"";
        else out += c;
    }
    return out + "\"";
}

} // namespace

TEST_CASE("noise-free surrogate is strictly increasing in flops") {
    const SearchSpaceSpec space = default_mbv2_space();
    SyntheticAccuracyConfig cfg;
    cfg.jitter_sigma = 0.0;
    const AccuracyPredictor pred = AccuracyPredictor::synthetic(space, cfg);

    std::vector<Genotype> samples;
    for (std::uint64_t seed = 0; seed < 200; ++seed)
        samples.push_back(random_sample(space, seed));
    std::sort(samples.begin(), samples.end(), [&](const Genotype& a, const Genotype& b) {
        return arch_stats(space, a).flops < arch_stats(space, b).flops;
    });
    for (std::size_t i = 1; i < samples.size(); ++i) {
        const double f_prev = arch_stats(space, samples[i - 1]).flops;
        const double f_here = arch_stats(space, samples[i]).flops;
        if (f_here <= f_prev) continue;
        CHECK(pred.predict_accuracy(space, samples[i]) >
              pred.predict_accuracy(space, samples[i - 1]));
    }
}

TEST_CASE("accuracy saturates at a_max for huge architectures") {
    const SearchSpaceSpec space = default_mbv2_space();
    SyntheticAccuracyConfig cfg;
    cfg.jitter_sigma = 0.0;
    cfg.a_max = 0.80;
    cfg.f0 = 1.0; // every real architecture has flops >> 1
    const AccuracyPredictor pred = AccuracyPredictor::synthetic(space, cfg);
    const Genotype g = random_sample(space, 1);
    CHECK(pred.predict_accuracy(space, g) == doctest::Approx(0.80).epsilon(1e-12));
}

TEST_CASE("same seed and genotype always score identically") {
    const SearchSpaceSpec space = default_mbv2_space();
    SyntheticAccuracyConfig cfg;
    cfg.seed = 42;
    const AccuracyPredictor pred = AccuracyPredictor::synthetic(space, cfg);
    const AccuracyPredictor again = AccuracyPredictor::synthetic(space, cfg);
    for (std::uint64_t seed = 0; seed < 100; ++seed) {
        const Genotype g = random_sample(space, seed);
        const double a = pred.predict_accuracy(space, g);
        CHECK(a == pred.predict_accuracy(space, g));
        CHECK(a == again.predict_accuracy(space, g));
        CHECK(a >= 0.0);
        CHECK(a <= 1.0);
    }
}

TEST_CASE("jitter is keyed by the canonical genotype") {
    const SearchSpaceSpec space = default_mbv2_space();
    SyntheticAccuracyConfig cfg;
    cfg.seed = 7;
    cfg.jitter_sigma = 0.01;
    const AccuracyPredictor pred = AccuracyPredictor::synthetic(space, cfg);
    Genotype g = random_sample(space, 3);
    g.stage_depth[0] = 2;
    Genotype h = g;
    h.kernel_choice[3] = (g.kernel_choice[3] + 1) % 3; // inactive position
    CHECK(pred.predict_accuracy(space, g) == pred.predict_accuracy(space, h));
}

TEST_CASE("zero-jitter ranking equals the flops ranking") {
    const SearchSpaceSpec space = default_cell_space(6);
    SyntheticAccuracyConfig cfg;
    cfg.jitter_sigma = 0.0;
    const AccuracyPredictor pred = AccuracyPredictor::synthetic(space, cfg);

    std::vector<Genotype> samples;
    for (std::uint64_t seed = 0; seed < 100; ++seed)
        samples.push_back(random_sample(space, seed));

    std::vector<std::size_t> by_flops(samples.size());
    std::vector<std::size_t> by_acc(samples.size());
    std::iota(by_flops.begin(), by_flops.end(), 0u);
    by_acc = by_flops;
    std::stable_sort(by_flops.begin(), by_flops.end(), [&](std::size_t a, std::size_t b) {
        return arch_stats(space, samples[a]).flops < arch_stats(space, samples[b]).flops;
    });
    std::stable_sort(by_acc.begin(), by_acc.end(), [&](std::size_t a, std::size_t b) {
        return pred.predict_accuracy(space, samples[a]) <
               pred.predict_accuracy(space, samples[b]);
    });
    CHECK(by_flops == by_acc);
}

TEST_CASE("default flops scale is the sampled median") {
    const SearchSpaceSpec space = default_mbv2_space();
    SyntheticAccuracyConfig cfg;
    cfg.f0 = 0.0;
    const AccuracyPredictor pred = AccuracyPredictor::synthetic(space, cfg);
    CHECK(pred.config().f0 == doctest::Approx(median_sample_flops(space, 1000, cfg.seed)));
    CHECK(pred.config().f0 > 0.0);
}

TEST_CASE("tabular mode returns file values exactly") {
    const SearchSpaceSpec space = default_cell_space(4);
    const Genotype a = random_sample(space, 1);
    const Genotype b = random_sample(space, 2);
    const Genotype c = random_sample(space, 5);
    const std::string text = "genotype_json,accuracy\n" +
                             quote(genotype_to_json(space, a)) + ",0.71\n" +
                             quote(genotype_to_json(space, b)) + ",0.65\n" +
                             quote(genotype_to_json(space, c)) + ",0.90\n";
    const AccuracyPredictor pred = AccuracyPredictor::from_table_csv(space, text);
    CHECK(pred.is_tabular());
    CHECK(pred.predict_accuracy(space, a) == 0.71);
    CHECK(pred.predict_accuracy(space, b) == 0.65);
    CHECK(pred.predict_accuracy(space, c) == 0.90);

    // A genotype outside the table cannot be scored.
    for (std::uint64_t seed = 6;; ++seed) {
        const Genotype g = random_sample(space, seed);
        const std::uint64_t print = genotype_fingerprint(space, g);
        if (print == genotype_fingerprint(space, a) || print == genotype_fingerprint(space, b) ||
            print == genotype_fingerprint(space, c))
            continue;
        CHECK_THROWS_AS(pred.predict_accuracy(space, g), UnknownArchitecture);
        break;
    }
}

TEST_CASE("table loader rejects bad files") {
    const SearchSpaceSpec space = default_cell_space(4);
    const std::string gj = quote(genotype_to_json(space, random_sample(space, 1)));
    SUBCASE("accuracy above one") {
        CHECK_THROWS_AS(
            AccuracyPredictor::from_table_csv(space, "genotype_json,accuracy\n" + gj + ",1.2\n"),
            OutOfRangeAccuracy);
    }
    SUBCASE("duplicate genotypes with different accuracy") {
        CHECK_THROWS_AS(AccuracyPredictor::from_table_csv(
                            space, "genotype_json,accuracy\n" + gj + ",0.5\n" + gj + ",0.6\n"),
                        ParseError);
    }
    SUBCASE("missing header") {
        CHECK_THROWS_AS(AccuracyPredictor::from_table_csv(space, gj + ",0.5\n"), ParseError);
    }
    SUBCASE("unparseable accuracy") {
        CHECK_THROWS_AS(AccuracyPredictor::from_table_csv(
                            space, "genotype_json,accuracy\n" + gj + ",good\n"),
                        ParseError);
    }
}

TEST_CASE("placeholder instances refuse to predict") {
    const SearchSpaceSpec space = default_cell_space(4);
    const AccuracyPredictor empty;
    CHECK_THROWS_AS(empty.predict_accuracy(space, random_sample(space, 1)), DegenerateInput);
}
