#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <vector>

#include "proxynas/errors.hpp"
#include "proxynas/latency_model.hpp"
#include "proxynas/rank_correlation.hpp"
#include "proxynas/rng.hpp"
#include "proxynas/roofline.hpp"
#include "proxynas/search_space.hpp"

using namespace proxynas;

namespace {

// One-block space whose single cost entry is freely chosen per test.
SearchSpaceSpec mono_space(double flops, double bytes) {
    SearchSpaceSpec space = default_cell_space(4);
    space.id = "mono";
    space.cell_edge_count = 1;
    space.cost_table.assign(1, std::vector<CostEntry>(5, CostEntry{flops, bytes}));
    validate_space(space);
    return space;
}

Genotype single_edge_genotype() {
    Genotype g;
    g.edge_op = {0};
    return g;
}

RooflineDevice s5e() { return {"s5e", 40.6, 14.93, 1.0, Granularity::WholeModel}; }
RooflineDevice taba() { return {"taba", 15.3, 7.46, 1.0, Granularity::WholeModel}; }

} // namespace

TEST_CASE("compute-bound latency is flops over effective peak") {
    // 0.406 GFLOPs at intensity far above the ridge: 0.406/40.6 s = 10 ms.
    const double flops = 0.406e9;
    const double bytes = flops / 100.0; // intensity 100 >> ridge 2.719
    const SearchSpaceSpec space = mono_space(flops, bytes);
    CHECK(simulate_latency(s5e(), space, single_edge_genotype()) == doctest::Approx(10.0));
}

TEST_CASE("memory-bound latency is bytes over bandwidth") {
    // 0.01493 GB at intensity far below the ridge: 0.01493/14.93 s = 1 ms.
    const double bytes = 0.01493e9;
    const double flops = bytes * 0.1; // intensity 0.1 << ridge
    const SearchSpaceSpec space = mono_space(flops, bytes);
    CHECK(simulate_latency(s5e(), space, single_edge_genotype()) == doctest::Approx(1.0));
}

TEST_CASE("ridge points of the reference devices") {
    CHECK(ridge_point(s5e()) == doctest::Approx(40.6 / 14.93));
    CHECK(ridge_point(s5e()) == doctest::Approx(2.719).epsilon(1e-3));
    CHECK(ridge_point(taba()) == doctest::Approx(2.051).epsilon(1e-3));

    RooflineDevice half = s5e();
    half.efficiency = 0.5;
    CHECK(ridge_point(half) == doctest::Approx(0.5 * ridge_point(s5e())));

    RooflineDevice unit{"unit", 10.0, 10.0, 1.0, Granularity::WholeModel};
    CHECK(ridge_point(unit) == doctest::Approx(1.0));
}

TEST_CASE("device validation") {
    RooflineDevice d = s5e();
    d.peak_gflops = 0.0;
    CHECK_THROWS_AS(validate_device(d), DegenerateInput);
    d = s5e();
    d.bandwidth_gbps = -1.0;
    CHECK_THROWS_AS(validate_device(d), DegenerateInput);
    d = s5e();
    d.efficiency = 1.5;
    CHECK_THROWS_AS(validate_device(d), DegenerateInput);
    d = s5e();
    d.efficiency = 0.0;
    CHECK_THROWS_AS(validate_device(d), DegenerateInput);
}

TEST_CASE("latency grows with flops when compute bound and bytes when memory bound") {
    const RooflineDevice dev = s5e();
    const double ridge = ridge_point(dev);
    // Compute bound: increase flops at fixed bytes.
    double prev = 0.0;
    for (double f = 10.0; f <= 100.0; f += 10.0) {
        const double bytes = 1.0;
        const double flops = bytes * ridge * f; // stays above the ridge
        const double ms = roofline_term_ms(dev, flops, bytes);
        CHECK(ms > prev);
        prev = ms;
    }
    // Memory bound: increase bytes at fixed flops.
    prev = 0.0;
    for (double b = 10.0; b <= 100.0; b += 10.0) {
        const double flops = 1.0;
        const double bytes = flops / ridge * b; // stays below the ridge
        const double ms = roofline_term_ms(dev, flops, bytes);
        CHECK(ms > prev);
        prev = ms;
    }
}

TEST_CASE("latency ranks agree across devices inside one regime") {
    // Architectures all compute bound (or all memory bound) on two devices
    // rank identically, because latency is a positive scale of one column.
    Rng rng(101);
    const SearchSpaceSpec space = default_mbv2_space();
    for (int pair = 0; pair < 20; ++pair) {
        RooflineDevice a{"a", rng.next_double(5.0, 60.0), rng.next_double(2.0, 20.0),
                         rng.next_double(0.3, 1.0), Granularity::WholeModel};
        RooflineDevice b{"b", rng.next_double(5.0, 60.0), rng.next_double(2.0, 20.0),
                         rng.next_double(0.3, 1.0), Granularity::WholeModel};
        const double max_ridge = std::max(ridge_point(a), ridge_point(b));
        const double min_ridge = std::min(ridge_point(a), ridge_point(b));

        std::vector<double> lat_a_cb, lat_b_cb, lat_a_mb, lat_b_mb;
        for (std::uint64_t seed = 0; seed < 500; ++seed) {
            const Genotype g = random_sample(space, 1000 * static_cast<std::uint64_t>(pair) + seed);
            const ArchStats stats = arch_stats(space, g);
            if (stats.operational_intensity > max_ridge) {
                lat_a_cb.push_back(simulate_latency(a, space, g));
                lat_b_cb.push_back(simulate_latency(b, space, g));
            } else if (stats.operational_intensity < min_ridge) {
                lat_a_mb.push_back(simulate_latency(a, space, g));
                lat_b_mb.push_back(simulate_latency(b, space, g));
            }
        }
        if (lat_a_cb.size() >= 3 &&
            !std::all_of(lat_a_cb.begin(), lat_a_cb.end(),
                         [&](double v) { return v == lat_a_cb[0]; }))
            CHECK(srcc(lat_a_cb, lat_b_cb) == 1.0);
        if (lat_a_mb.size() >= 3 &&
            !std::all_of(lat_a_mb.begin(), lat_a_mb.end(),
                         [&](double v) { return v == lat_a_mb[0]; }))
            CHECK(srcc(lat_a_mb, lat_b_mb) == 1.0);
    }
}

TEST_CASE("per-operator simulation sums block terms") {
    const SearchSpaceSpec space = default_cell_space(6);
    RooflineDevice dev{"per-op", 20.0, 8.0, 1.0, Granularity::PerOperator};
    const Genotype g = random_sample(space, 5);
    double expected = 0.0;
    for (int e = 0; e < 6; ++e) {
        const CostEntry& entry =
            space.cost_table[static_cast<std::size_t>(e)][static_cast<std::size_t>(g.edge_op[e])];
        expected += roofline_term_ms(dev, entry.flops, entry.bytes);
    }
    CHECK(simulate_latency(dev, space, g) == doctest::Approx(expected).epsilon(1e-12));
}

TEST_CASE("per-operator devices reduce to exact linear predictors") {
    const SearchSpaceSpec space = default_mbv2_space();
    RooflineDevice dev{"per-op", 40.6, 14.93, 0.7, Granularity::PerOperator};
    const LatencyPredictor pred = roofline_predictor(dev, space);
    CHECK(pred.space_id == space.id);
    CHECK(pred.weights.back() == 0.0);
    for (std::uint64_t seed = 0; seed < 300; ++seed) {
        const Genotype g = random_sample(space, seed);
        CHECK(predict_genotype(pred, space, g) ==
              doctest::Approx(simulate_latency(dev, space, g)).epsilon(1e-12));
    }
}

TEST_CASE("zero-perturbation family reproduces the base exactly") {
    const SearchSpaceSpec space = default_mbv2_space();
    RooflineDevice dev{"base", 30.0, 10.0, 1.0, Granularity::PerOperator};
    SyntheticDeviceFamilySpec spec;
    spec.base = roofline_predictor(dev, space);
    spec.member_count = 3;
    spec.seed = 9;
    const auto members = generate_family(spec);
    REQUIRE(members.size() == 3);
    for (const LatencyPredictor& m : members) {
        CHECK(m.space_id == spec.base.space_id);
        CHECK(m.weights == spec.base.weights);
    }
}

TEST_CASE("pure global scaling preserves every ranking") {
    const SearchSpaceSpec space = default_mbv2_space();
    RooflineDevice dev{"base", 30.0, 10.0, 1.0, Granularity::PerOperator};
    SyntheticDeviceFamilySpec spec;
    spec.base = roofline_predictor(dev, space);
    spec.member_count = 4;
    spec.global_scale_lo = 0.5;
    spec.global_scale_hi = 3.0;
    spec.seed = 10;
    const auto members = generate_family(spec);
    std::vector<double> base_lat, member_lat;
    for (const LatencyPredictor& m : members) {
        base_lat.clear();
        member_lat.clear();
        for (std::uint64_t seed = 0; seed < 200; ++seed) {
            const Genotype g = random_sample(space, seed);
            base_lat.push_back(predict_genotype(spec.base, space, g));
            member_lat.push_back(predict_genotype(m, space, g));
        }
        CHECK(srcc(base_lat, member_lat) == 1.0);
        // The scale itself lands inside the configured range.
        const double ratio = member_lat[0] / base_lat[0];
        CHECK(ratio >= 0.5);
        CHECK(ratio <= 3.0);
    }
}

TEST_CASE("family generation is deterministic and seed sensitive") {
    const SearchSpaceSpec space = default_mbv2_space();
    RooflineDevice dev{"base", 30.0, 10.0, 1.0, Granularity::PerOperator};
    SyntheticDeviceFamilySpec spec;
    spec.base = roofline_predictor(dev, space);
    spec.member_count = 2;
    spec.global_scale_lo = 0.8;
    spec.global_scale_hi = 1.2;
    spec.perturb_fraction = 0.2;
    spec.perturb_lo = 0.3;
    spec.perturb_hi = 4.0;
    spec.seed = 11;
    const auto a = generate_family(spec);
    const auto b = generate_family(spec);
    REQUIRE(a.size() == b.size());
    for (std::size_t i = 0; i < a.size(); ++i) CHECK(a[i].weights == b[i].weights);
    spec.seed = 12;
    const auto c = generate_family(spec);
    CHECK(a[0].weights != c[0].weights);
}

TEST_CASE("perturbed coordinates move by the configured multiplier range") {
    const SearchSpaceSpec space = default_mbv2_space();
    RooflineDevice dev{"base", 30.0, 10.0, 1.0, Granularity::PerOperator};
    SyntheticDeviceFamilySpec spec;
    spec.base = roofline_predictor(dev, space);
    spec.member_count = 5;
    spec.perturb_fraction = 0.10;
    spec.perturb_lo = 0.2;
    spec.perturb_hi = 5.0;
    spec.seed = 13;
    const auto members = generate_family(spec);
    const std::size_t n = spec.base.weights.size();
    for (const LatencyPredictor& m : members) {
        int moved = 0;
        for (std::size_t i = 0; i < n; ++i) {
            const double base_w = spec.base.weights[i];
            if (base_w == 0.0) continue;
            const double mult = m.weights[i] / base_w;
            if (std::abs(mult - 1.0) > 1e-12) {
                ++moved;
                CHECK(mult >= 0.2 - 1e-12);
                CHECK(mult <= 5.0 + 1e-12);
            }
        }
        // About 10% of coordinates move; allow slack for rounding and for
        // multipliers that happen to land on 1.0.
        CHECK(moved <= static_cast<int>(0.12 * static_cast<double>(n)) + 2);
        CHECK(moved >= 1);
    }
}

TEST_CASE("device JSON round trip") {
    RooflineDevice dev{"edge-npu", 21.5, 6.1, 0.85, Granularity::PerOperator};
    const RooflineDevice back = device_from_json(device_to_json(dev));
    CHECK(back.device_id == dev.device_id);
    CHECK(back.peak_gflops == dev.peak_gflops);
    CHECK(back.bandwidth_gbps == dev.bandwidth_gbps);
    CHECK(back.efficiency == dev.efficiency);
    CHECK(back.granularity == dev.granularity);
    CHECK_THROWS_AS(device_from_json("{\"peak_gflops\": \"fast\"}"), ParseError);
}

TEST_CASE("family spec JSON round trip") {
    FamilySpecFile f;
    f.base_predictor_path = "base.json";
    f.member_count = 7;
    f.global_scale_lo = 0.9;
    f.global_scale_hi = 1.4;
    f.perturb_fraction = 0.1;
    f.perturb_lo = 0.2;
    f.perturb_hi = 5.0;
    f.seed = 77;
    const FamilySpecFile back = family_spec_from_json(family_spec_to_json(f));
    CHECK(back.base_predictor_path == f.base_predictor_path);
    CHECK(back.member_count == f.member_count);
    CHECK(back.global_scale_lo == f.global_scale_lo);
    CHECK(back.global_scale_hi == f.global_scale_hi);
    CHECK(back.perturb_fraction == f.perturb_fraction);
    CHECK(back.perturb_lo == f.perturb_lo);
    CHECK(back.perturb_hi == f.perturb_hi);
    CHECK(back.seed == f.seed);
}
