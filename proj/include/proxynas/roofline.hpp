#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "proxynas/latency_model.hpp"
#include "proxynas/search_space.hpp"

namespace proxynas {

/// Latency granularity of the simulator.
/// WholeModel:   one roofline term over total FLOPs and bytes.
/// PerOperator:  a roofline term per active block, summed; this makes the
///               simulated device exactly operator-additive.
enum class Granularity { WholeModel, PerOperator };

struct RooflineDevice {
    std::string device_id;
    double peak_gflops = 0.0;    // compute roof, GFLOPs/s
    double bandwidth_gbps = 0.0; // memory roof, GB/s (1 GB = 1e9 bytes)
    double efficiency = 1.0;     // fraction of peak reachable, in (0, 1]
    Granularity granularity = Granularity::WholeModel;
};

void validate_device(const RooflineDevice& device);

/// FLOPs/byte boundary between the memory-bound and compute-bound regimes.
double ridge_point(const RooflineDevice& device);

/// max(compute time, memory time) in milliseconds for one (flops, bytes) load.
double roofline_term_ms(const RooflineDevice& device, double flops, double bytes);

/// Simulated latency of a genotype (granularity-dependent).
double simulate_latency(const RooflineDevice& device, const SearchSpaceSpec& space,
                        const Genotype& g);

/// Linear predictor equivalent to per-operator simulation: one weight per
/// (position, choice) slot, zero bias.
LatencyPredictor roofline_predictor(const RooflineDevice& device,
                                    const SearchSpaceSpec& space);

/// Recipe for a family of synthetic devices around a base predictor.  Member
/// i has weights (alpha_i * 1 + b_i) o w_base: alpha_i is uniform in
/// global_scale_range and b_i is nonzero on a seeded perturb_fraction of
/// coordinates, chosen so those coordinates' total multiplier lands in
/// perturb_range.
struct SyntheticDeviceFamilySpec {
    LatencyPredictor base;
    int member_count = 0;
    double global_scale_lo = 1.0;
    double global_scale_hi = 1.0;
    double perturb_fraction = 0.0;
    double perturb_lo = 1.0;
    double perturb_hi = 1.0;
    std::uint64_t seed = 0;
};

std::vector<LatencyPredictor> generate_family(const SyntheticDeviceFamilySpec& spec);

// --- Serialization ------------------------------------------------------------

std::string device_to_json(const RooflineDevice& device);
RooflineDevice device_from_json(const std::string& json_text);

/// Family spec JSON keeps a path reference to the base predictor; resolving
/// the path is the caller's job.
struct FamilySpecFile {
    std::string base_predictor_path;
    int member_count = 0;
    double global_scale_lo = 1.0;
    double global_scale_hi = 1.0;
    double perturb_fraction = 0.0;
    double perturb_lo = 1.0;
    double perturb_hi = 1.0;
    std::uint64_t seed = 0;
};

std::string family_spec_to_json(const FamilySpecFile& spec);
FamilySpecFile family_spec_from_json(const std::string& json_text);

} // namespace proxynas
