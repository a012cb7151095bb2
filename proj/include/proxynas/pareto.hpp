#pragma once

#include <string>
#include <vector>

#include "proxynas/search_space.hpp"

namespace proxynas {

enum class LatencySource { Predicted, Measured };

struct ScoredArch {
    Genotype genotype;
    double accuracy = 0.0;
    double latency_ms = 0.0;
    LatencySource latency_source = LatencySource::Predicted;
};

/// Architectures with no member dominated by another member.
struct ParetoSet {
    std::vector<ScoredArch> members;
};

/// a dominates b: a is no slower and no less accurate, and strictly better
/// on at least one of the two.
bool dominates(const ScoredArch& a, const ScoredArch& b);

/// Non-dominated subset.  Exact duplicates on (accuracy, latency) are all
/// kept.  Throws EmptyInput on an empty list.
ParetoSet pareto_front(const std::vector<ScoredArch>& candidates);

/// Final-front cleanup over measured candidates: drops members beaten on
/// latency by an epsilon-similar-or-better accuracy member, then takes the
/// strict front.  Throws PredictedLatencyRejected when any candidate's
/// latency is not Measured.
ParetoSet remove_non_pareto(const std::vector<ScoredArch>& candidates,
                            double epsilon_accuracy = 0.001);

// --- Serialization ------------------------------------------------------------

/// CSV with header `genotype_json,accuracy,latency_ms,latency_source`.
std::string front_to_csv(const SearchSpaceSpec& space, const ParetoSet& front);
ParetoSet front_from_csv(const SearchSpaceSpec& space, const std::string& csv_text);

} // namespace proxynas
