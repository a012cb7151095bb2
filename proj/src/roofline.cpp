#include "proxynas/roofline.hpp"

#include <algorithm>
#include <cmath>

#include <json.hpp>

#include "proxynas/errors.hpp"
#include "proxynas/rng.hpp"

namespace proxynas {

void validate_device(const RooflineDevice& device) {
    if (device.device_id.empty()) throw DegenerateInput("device_id must be non-empty");
    if (!(device.peak_gflops > 0.0) || !std::isfinite(device.peak_gflops))
        throw DegenerateInput("peak_gflops must be positive");
    if (!(device.bandwidth_gbps > 0.0) || !std::isfinite(device.bandwidth_gbps))
        throw DegenerateInput("bandwidth_gbps must be positive");
    if (!(device.efficiency > 0.0 && device.efficiency <= 1.0))
        throw DegenerateInput("efficiency must be in (0, 1]");
}

double ridge_point(const RooflineDevice& device) {
    return device.peak_gflops * device.efficiency / device.bandwidth_gbps;
}

double roofline_term_ms(const RooflineDevice& device, double flops, double bytes) {
    const double compute_s = flops / (device.peak_gflops * 1e9 * device.efficiency);
    const double memory_s = bytes / (device.bandwidth_gbps * 1e9);
    return std::max(compute_s, memory_s) * 1e3;
}

double simulate_latency(const RooflineDevice& device, const SearchSpaceSpec& space,
                        const Genotype& g) {
    validate_device(device);
    if (device.granularity == Granularity::WholeModel) {
        const ArchStats stats = arch_stats(space, g);
        return roofline_term_ms(device, stats.flops, stats.bytes);
    }
    validate_genotype(space, g);
    double total = 0.0;
    for (int p = 0; p < space.block_count(); ++p) {
        if (!block_active(space, g, p)) continue;
        int choice = 0;
        switch (space.kind) {
        case SpaceKind::MbV2Like:
            choice = g.kernel_choice[p] * static_cast<int>(space.expansion_choices.size()) +
                     g.expansion_choice[p];
            break;
        case SpaceKind::FbNetLike:
            choice = g.block_choice[p];
            break;
        case SpaceKind::CellLike:
            choice = g.edge_op[p];
            break;
        }
        const CostEntry& e =
            space.cost_table[static_cast<std::size_t>(p)][static_cast<std::size_t>(choice)];
        total += roofline_term_ms(device, e.flops, e.bytes);
    }
    return total;
}

LatencyPredictor roofline_predictor(const RooflineDevice& device,
                                    const SearchSpaceSpec& space) {
    validate_device(device);
    LatencyPredictor predictor;
    predictor.space_id = space.id;
    predictor.weights.assign(static_cast<std::size_t>(space.encoding_length()), 0.0);
    const int width = space.group_width();
    for (int p = 0; p < space.block_count(); ++p) {
        for (int c = 0; c < width; ++c) {
            const CostEntry& e =
                space.cost_table[static_cast<std::size_t>(p)][static_cast<std::size_t>(c)];
            predictor.weights[static_cast<std::size_t>(p * width + c)] =
                roofline_term_ms(device, e.flops, e.bytes);
        }
    }
    return predictor;
}

std::vector<LatencyPredictor> generate_family(const SyntheticDeviceFamilySpec& spec) {
    if (spec.member_count < 1) throw EmptyInput("member_count must be >= 1");
    if (spec.base.weights.empty()) throw EmptyInput("base predictor has no weights");
    if (spec.global_scale_lo <= 0.0 || spec.global_scale_hi < spec.global_scale_lo)
        throw ParseError("global_scale_range must be positive and ordered");
    if (spec.perturb_fraction < 0.0 || spec.perturb_fraction > 1.0)
        throw ParseError("perturb_fraction must be in [0, 1]");
    if (spec.perturb_hi < spec.perturb_lo)
        throw ParseError("perturb_range must be ordered");

    const int k = static_cast<int>(spec.base.weights.size());
    const int perturbed =
        static_cast<int>(std::lround(spec.perturb_fraction * static_cast<double>(k)));

    std::vector<LatencyPredictor> members;
    members.reserve(static_cast<std::size_t>(spec.member_count));
    for (int m = 0; m < spec.member_count; ++m) {
        Rng rng(mix_seed(spec.seed, static_cast<std::uint64_t>(m)));
        const double alpha = rng.next_double(spec.global_scale_lo, spec.global_scale_hi);
        std::vector<double> multiplier(static_cast<std::size_t>(k), alpha);
        const std::vector<int> coords = sample_indices(k, perturbed, rng);
        for (const int c : coords)
            multiplier[static_cast<std::size_t>(c)] =
                rng.next_double(spec.perturb_lo, spec.perturb_hi);

        LatencyPredictor member;
        member.space_id = spec.base.space_id;
        member.weights.resize(static_cast<std::size_t>(k));
        for (int i = 0; i < k; ++i)
            member.weights[static_cast<std::size_t>(i)] =
                multiplier[static_cast<std::size_t>(i)] *
                spec.base.weights[static_cast<std::size_t>(i)];
        members.push_back(std::move(member));
    }
    return members;
}

// --- Serialization ------------------------------------------------------------

namespace {

std::string granularity_to_string(Granularity g) {
    return g == Granularity::WholeModel ? "whole_model" : "per_operator";
}

Granularity granularity_from_string(const std::string& s) {
    if (s == "whole_model") return Granularity::WholeModel;
    if (s == "per_operator") return Granularity::PerOperator;
    throw ParseError("unknown granularity: " + s);
}

} // namespace

std::string device_to_json(const RooflineDevice& device) {
    nlohmann::ordered_json j;
    j["device_id"] = device.device_id;
    j["peak_gflops"] = device.peak_gflops;
    j["bandwidth_gbps"] = device.bandwidth_gbps;
    j["efficiency"] = device.efficiency;
    j["granularity"] = granularity_to_string(device.granularity);
    return j.dump();
}

RooflineDevice device_from_json(const std::string& json_text) {
    try {
        const auto j = nlohmann::json::parse(json_text);
        RooflineDevice d;
        d.device_id = j.at("device_id").get<std::string>();
        d.peak_gflops = j.at("peak_gflops").get<double>();
        d.bandwidth_gbps = j.at("bandwidth_gbps").get<double>();
        d.efficiency = j.value("efficiency", 1.0);
        d.granularity = granularity_from_string(j.value("granularity", "whole_model"));
        validate_device(d);
        return d;
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("device JSON: ") + e.what());
    }
}

std::string family_spec_to_json(const FamilySpecFile& spec) {
    nlohmann::ordered_json j;
    j["base_predictor"] = spec.base_predictor_path;
    j["member_count"] = spec.member_count;
    j["global_scale_range"] = {spec.global_scale_lo, spec.global_scale_hi};
    j["perturb_fraction"] = spec.perturb_fraction;
    j["perturb_range"] = {spec.perturb_lo, spec.perturb_hi};
    j["seed"] = spec.seed;
    return j.dump(2);
}

FamilySpecFile family_spec_from_json(const std::string& json_text) {
    try {
        const auto j = nlohmann::json::parse(json_text);
        FamilySpecFile spec;
        spec.base_predictor_path = j.at("base_predictor").get<std::string>();
        spec.member_count = j.at("member_count").get<int>();
        spec.global_scale_lo = j.at("global_scale_range").at(0).get<double>();
        spec.global_scale_hi = j.at("global_scale_range").at(1).get<double>();
        spec.perturb_fraction = j.value("perturb_fraction", 0.0);
        if (j.contains("perturb_range")) {
            spec.perturb_lo = j.at("perturb_range").at(0).get<double>();
            spec.perturb_hi = j.at("perturb_range").at(1).get<double>();
        }
        spec.seed = j.value("seed", std::uint64_t{0});
        return spec;
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("family spec JSON: ") + e.what());
    }
}

} // namespace proxynas
