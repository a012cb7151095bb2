#include "proxynas/pareto.hpp"

#include <algorithm>
#include <numeric>

#include "proxynas/csv.hpp"
#include "proxynas/errors.hpp"

namespace proxynas {

bool dominates(const ScoredArch& a, const ScoredArch& b) {
    if (a.latency_ms > b.latency_ms || a.accuracy < b.accuracy) return false;
    return a.latency_ms < b.latency_ms || a.accuracy > b.accuracy;
}

ParetoSet pareto_front(const std::vector<ScoredArch>& candidates) {
    if (candidates.empty()) throw EmptyInput("pareto_front over empty candidate list");

    // Sweep by latency ascending (accuracy descending within a latency tie):
    // a point survives iff its accuracy beats everything strictly faster,
    // except exact (latency, accuracy) duplicates of a survivor, which stay.
    std::vector<std::size_t> order(candidates.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t i, std::size_t j) {
        if (candidates[i].latency_ms != candidates[j].latency_ms)
            return candidates[i].latency_ms < candidates[j].latency_ms;
        return candidates[i].accuracy > candidates[j].accuracy;
    });

    ParetoSet front;
    bool have_best = false;
    double best_accuracy = 0.0;
    double best_latency = 0.0;
    std::vector<bool> keep(candidates.size(), false);
    for (const std::size_t i : order) {
        const ScoredArch& c = candidates[i];
        const bool duplicate_of_kept =
            have_best && c.accuracy == best_accuracy && c.latency_ms == best_latency;
        if (!have_best || c.accuracy > best_accuracy || duplicate_of_kept) {
            keep[i] = true;
            if (!duplicate_of_kept) {
                best_accuracy = c.accuracy;
                best_latency = c.latency_ms;
                have_best = true;
            }
        }
    }
    for (std::size_t i = 0; i < candidates.size(); ++i)
        if (keep[i]) front.members.push_back(candidates[i]);
    return front;
}

ParetoSet remove_non_pareto(const std::vector<ScoredArch>& candidates,
                            double epsilon_accuracy) {
    if (candidates.empty()) throw EmptyInput("remove_non_pareto over empty candidate list");
    for (const ScoredArch& c : candidates) {
        if (c.latency_source != LatencySource::Measured)
            throw PredictedLatencyRejected("final-front cleanup requires measured latencies");
    }

    // Drop x1 when some x2 is strictly faster with accuracy within epsilon
    // below (or above) x1's.
    std::vector<ScoredArch> survivors;
    for (std::size_t i = 0; i < candidates.size(); ++i) {
        bool removed = false;
        for (std::size_t j = 0; j < candidates.size() && !removed; ++j) {
            if (j == i) continue;
            removed = candidates[j].latency_ms < candidates[i].latency_ms &&
                      candidates[j].accuracy >= candidates[i].accuracy - epsilon_accuracy;
        }
        if (!removed) survivors.push_back(candidates[i]);
    }
    // Removal needs a strictly faster member, so minimum-latency candidates
    // always survive and the list stays non-empty.
    return pareto_front(survivors);
}

std::string front_to_csv(const SearchSpaceSpec& space, const ParetoSet& front) {
    std::string out = "genotype_json,accuracy,latency_ms,latency_source\n";
    for (const ScoredArch& m : front.members) {
        out += csv::join_row(
            {genotype_to_json(space, m.genotype), csv::format_double(m.accuracy),
             csv::format_double(m.latency_ms),
             m.latency_source == LatencySource::Measured ? "measured" : "predicted"});
        out += '\n';
    }
    return out;
}

ParetoSet front_from_csv(const SearchSpaceSpec& space, const std::string& csv_text) {
    const auto rows = csv::parse(csv_text);
    if (rows.empty()) throw ParseError("row 1: missing header");
    if (rows[0] != csv::Row{"genotype_json", "accuracy", "latency_ms", "latency_source"})
        throw ParseError("row 1: header must be genotype_json,accuracy,latency_ms,latency_source");
    ParetoSet front;
    for (std::size_t r = 1; r < rows.size(); ++r) {
        const std::string row_label = "row " + std::to_string(r + 1);
        const csv::Row& row = rows[r];
        if (row.size() != 4) throw ParseError(row_label + ": expected 4 fields");
        ScoredArch arch;
        try {
            arch.genotype = genotype_from_json(space, row[0]);
            arch.accuracy = std::stod(row[1]);
            arch.latency_ms = std::stod(row[2]);
        } catch (const Error& e) {
            throw ParseError(row_label + ": " + e.what());
        } catch (const std::exception& e) {
            throw ParseError(row_label + ": " + e.what());
        }
        if (row[3] == "measured") arch.latency_source = LatencySource::Measured;
        else if (row[3] == "predicted") arch.latency_source = LatencySource::Predicted;
        else throw ParseError(row_label + ": unknown latency_source " + row[3]);
        front.members.push_back(std::move(arch));
    }
    return front;
}

} // namespace proxynas
