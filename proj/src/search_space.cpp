#include "proxynas/search_space.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include <json.hpp>

#include "proxynas/errors.hpp"
#include "proxynas/rng.hpp"

namespace proxynas {

namespace {

constexpr std::uint64_t kCardinalityCap = std::numeric_limits<std::int64_t>::max();

std::uint64_t saturating_mul(std::uint64_t a, std::uint64_t b) {
    if (a == 0 || b == 0) return 0;
    if (a > kCardinalityCap / b) return kCardinalityCap;
    return a * b;
}

bool is_sorted_unique_positive(const std::vector<int>& v) {
    if (v.empty()) return false;
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (v[i] <= 0) return false;
        if (i > 0 && v[i] <= v[i - 1]) return false;
    }
    return true;
}

int stage_position_count(const SearchSpaceSpec& s) {
    return s.stage_count * s.max_blocks_per_stage;
}

} // namespace

int SearchSpaceSpec::block_count() const {
    if (kind == SpaceKind::CellLike) return cell_edge_count;
    return stage_count * max_blocks_per_stage + fixed_block_count;
}

int SearchSpaceSpec::choices_per_position() const {
    switch (kind) {
    case SpaceKind::MbV2Like:
        return static_cast<int>(kernel_choices.size() * expansion_choices.size());
    case SpaceKind::FbNetLike:
    case SpaceKind::CellLike:
        return static_cast<int>(operator_labels.size());
    }
    return 0;
}

int SearchSpaceSpec::group_width() const {
    if (kind == SpaceKind::FbNetLike) return choices_per_position() - 1;
    return choices_per_position();
}

int SearchSpaceSpec::encoding_length() const {
    return block_count() * group_width() + 1;
}

int SearchSpaceSpec::skip_choice_index() const {
    if (kind != SpaceKind::FbNetLike) return -1;
    return static_cast<int>(operator_labels.size()) - 1;
}

void validate_space(const SearchSpaceSpec& space) {
    if (space.id.empty()) throw InvalidGenotype("space id must be non-empty");

    switch (space.kind) {
    case SpaceKind::MbV2Like: {
        if (space.stage_count < 1) throw InvalidGenotype("stage_count must be >= 1");
        if (space.max_blocks_per_stage < 1)
            throw InvalidGenotype("max_blocks_per_stage must be >= 1");
        if (space.fixed_block_count < 0)
            throw InvalidGenotype("fixed_block_count must be >= 0");
        if (!is_sorted_unique_positive(space.kernel_choices))
            throw InvalidGenotype("kernel_choices must be sorted, unique, positive");
        if (!is_sorted_unique_positive(space.expansion_choices))
            throw InvalidGenotype("expansion_choices must be sorted, unique, positive");
        if (!is_sorted_unique_positive(space.depth_choices))
            throw InvalidGenotype("depth_choices must be sorted, unique, positive");
        if (space.depth_choices.back() > space.max_blocks_per_stage)
            throw InvalidGenotype("max depth exceeds max_blocks_per_stage");
        break;
    }
    case SpaceKind::FbNetLike: {
        if (space.stage_count < 0 || space.max_blocks_per_stage < 0 ||
            space.fixed_block_count < 0)
            throw InvalidGenotype("negative layout counts");
        if (space.block_count() < 1) throw InvalidGenotype("no block positions");
        if (space.operator_labels.size() < 2)
            throw InvalidGenotype("need at least two operators");
        if (space.operator_labels.back() != "skip")
            throw InvalidGenotype("last FbNetLike operator must be \"skip\"");
        break;
    }
    case SpaceKind::CellLike: {
        if (space.cell_edge_count < 1) throw InvalidGenotype("cell_edge_count must be >= 1");
        if (space.operator_labels.size() < 2)
            throw InvalidGenotype("need at least two operators");
        break;
    }
    }

    const int blocks = space.block_count();
    const int table_choices = space.kind == SpaceKind::FbNetLike
                                  ? space.choices_per_position() - 1
                                  : space.choices_per_position();
    if (static_cast<int>(space.cost_table.size()) != blocks)
        throw InvalidGenotype("cost_table must cover every block position");
    for (int p = 0; p < blocks; ++p) {
        if (static_cast<int>(space.cost_table[p].size()) != table_choices)
            throw InvalidGenotype("cost_table row has wrong choice count");
        for (const CostEntry& e : space.cost_table[p]) {
            if (!(e.flops > 0.0) || !(e.bytes > 0.0) ||
                !std::isfinite(e.flops) || !std::isfinite(e.bytes))
                throw InvalidGenotype("cost_table entries must be strictly positive");
        }
    }
}

void validate_genotype(const SearchSpaceSpec& space, const Genotype& g) {
    const int blocks = space.block_count();
    switch (space.kind) {
    case SpaceKind::MbV2Like: {
        if (static_cast<int>(g.kernel_choice.size()) != blocks ||
            static_cast<int>(g.expansion_choice.size()) != blocks)
            throw InvalidGenotype("choice vector length mismatch");
        if (static_cast<int>(g.stage_depth.size()) != space.stage_count)
            throw InvalidGenotype("stage_depth length mismatch");
        const int kn = static_cast<int>(space.kernel_choices.size());
        const int en = static_cast<int>(space.expansion_choices.size());
        for (int p = 0; p < blocks; ++p) {
            if (g.kernel_choice[p] < 0 || g.kernel_choice[p] >= kn)
                throw InvalidGenotype("kernel_choice out of range");
            if (g.expansion_choice[p] < 0 || g.expansion_choice[p] >= en)
                throw InvalidGenotype("expansion_choice out of range");
        }
        for (int s = 0; s < space.stage_count; ++s) {
            const int d = g.stage_depth[s];
            if (std::find(space.depth_choices.begin(), space.depth_choices.end(), d) ==
                space.depth_choices.end())
                throw InvalidGenotype("stage_depth not a permitted depth");
        }
        if (!g.block_choice.empty() || !g.edge_op.empty())
            throw InvalidGenotype("foreign genes present");
        break;
    }
    case SpaceKind::FbNetLike: {
        if (static_cast<int>(g.block_choice.size()) != blocks)
            throw InvalidGenotype("block_choice length mismatch");
        const int cn = space.choices_per_position();
        for (int p = 0; p < blocks; ++p) {
            if (g.block_choice[p] < 0 || g.block_choice[p] >= cn)
                throw InvalidGenotype("block_choice out of range");
        }
        if (!g.kernel_choice.empty() || !g.expansion_choice.empty() ||
            !g.stage_depth.empty() || !g.edge_op.empty())
            throw InvalidGenotype("foreign genes present");
        break;
    }
    case SpaceKind::CellLike: {
        if (static_cast<int>(g.edge_op.size()) != space.cell_edge_count)
            throw InvalidGenotype("edge_op length mismatch");
        const int cn = space.choices_per_position();
        for (int e = 0; e < space.cell_edge_count; ++e) {
            if (g.edge_op[e] < 0 || g.edge_op[e] >= cn)
                throw InvalidGenotype("edge_op out of range");
        }
        if (!g.kernel_choice.empty() || !g.expansion_choice.empty() ||
            !g.stage_depth.empty() || !g.block_choice.empty())
            throw InvalidGenotype("foreign genes present");
        break;
    }
    }
}

bool block_active(const SearchSpaceSpec& space, const Genotype& g, int position) {
    switch (space.kind) {
    case SpaceKind::MbV2Like: {
        const int stage_positions = stage_position_count(space);
        if (position >= stage_positions) return true; // fixed tail block
        const int stage = position / space.max_blocks_per_stage;
        const int slot = position % space.max_blocks_per_stage;
        return slot < g.stage_depth[stage];
    }
    case SpaceKind::FbNetLike:
        return g.block_choice[position] != space.skip_choice_index();
    case SpaceKind::CellLike:
        return true;
    }
    return false;
}

namespace {

/// Choice index of an active block as used by the cost table and encoding.
int active_choice_index(const SearchSpaceSpec& space, const Genotype& g, int position) {
    switch (space.kind) {
    case SpaceKind::MbV2Like:
        return g.kernel_choice[position] * static_cast<int>(space.expansion_choices.size()) +
               g.expansion_choice[position];
    case SpaceKind::FbNetLike:
        return g.block_choice[position];
    case SpaceKind::CellLike:
        return g.edge_op[position];
    }
    return 0;
}

} // namespace

Genotype canonical_genotype(const SearchSpaceSpec& space, const Genotype& g) {
    validate_genotype(space, g);
    Genotype out = g;
    if (space.kind == SpaceKind::MbV2Like) {
        for (int p = 0; p < space.block_count(); ++p) {
            if (!block_active(space, g, p)) {
                out.kernel_choice[p] = 0;
                out.expansion_choice[p] = 0;
            }
        }
    }
    return out;
}

ArchEncoding encode(const SearchSpaceSpec& space, const Genotype& g) {
    validate_genotype(space, g);
    ArchEncoding enc;
    enc.features.assign(static_cast<std::size_t>(space.encoding_length()), 0.0);
    const int width = space.group_width();
    for (int p = 0; p < space.block_count(); ++p) {
        if (!block_active(space, g, p)) continue;
        const int c = active_choice_index(space, g, p);
        enc.features[static_cast<std::size_t>(p * width + c)] = 1.0;
    }
    enc.features.back() = 1.0; // bias
    return enc;
}

Genotype decode(const SearchSpaceSpec& space, const ArchEncoding& enc) {
    const int length = space.encoding_length();
    if (static_cast<int>(enc.features.size()) != length)
        throw MalformedEncoding("expected " + std::to_string(length) + " features, got " +
                                std::to_string(enc.features.size()));
    for (const double v : enc.features) {
        if (v != 0.0 && v != 1.0) throw MalformedEncoding("features must be 0 or 1");
    }
    if (enc.features.back() != 1.0) throw MalformedEncoding("bias feature must be 1");

    const int width = space.group_width();
    const int blocks = space.block_count();
    // -1 marks an all-zero group.
    std::vector<int> group_choice(static_cast<std::size_t>(blocks), -1);
    for (int p = 0; p < blocks; ++p) {
        for (int c = 0; c < width; ++c) {
            if (enc.features[static_cast<std::size_t>(p * width + c)] == 1.0) {
                if (group_choice[p] != -1)
                    throw MalformedEncoding("block group " + std::to_string(p) +
                                            " has more than one set bit");
                group_choice[p] = c;
            }
        }
    }

    Genotype g;
    switch (space.kind) {
    case SpaceKind::MbV2Like: {
        const int en = static_cast<int>(space.expansion_choices.size());
        g.kernel_choice.assign(static_cast<std::size_t>(blocks), 0);
        g.expansion_choice.assign(static_cast<std::size_t>(blocks), 0);
        g.stage_depth.assign(static_cast<std::size_t>(space.stage_count), 0);
        const int stage_positions = stage_position_count(space);
        for (int p = stage_positions; p < blocks; ++p) {
            if (group_choice[p] == -1)
                throw MalformedEncoding("fixed block " + std::to_string(p) + " is inactive");
        }
        for (int s = 0; s < space.stage_count; ++s) {
            int depth = 0;
            bool gap = false;
            for (int slot = 0; slot < space.max_blocks_per_stage; ++slot) {
                const int p = s * space.max_blocks_per_stage + slot;
                if (group_choice[p] != -1) {
                    if (gap)
                        throw MalformedEncoding("stage " + std::to_string(s) +
                                                " active blocks are not a prefix");
                    ++depth;
                } else {
                    gap = true;
                }
            }
            if (std::find(space.depth_choices.begin(), space.depth_choices.end(), depth) ==
                space.depth_choices.end())
                throw MalformedEncoding("stage " + std::to_string(s) + " depth " +
                                        std::to_string(depth) + " is not a permitted depth");
            g.stage_depth[s] = depth;
        }
        for (int p = 0; p < blocks; ++p) {
            if (group_choice[p] == -1) continue;
            g.kernel_choice[p] = group_choice[p] / en;
            g.expansion_choice[p] = group_choice[p] % en;
        }
        break;
    }
    case SpaceKind::FbNetLike: {
        g.block_choice.assign(static_cast<std::size_t>(blocks), 0);
        for (int p = 0; p < blocks; ++p) {
            g.block_choice[p] = group_choice[p] == -1 ? space.skip_choice_index()
                                                      : group_choice[p];
        }
        break;
    }
    case SpaceKind::CellLike: {
        g.edge_op.assign(static_cast<std::size_t>(blocks), 0);
        for (int p = 0; p < blocks; ++p) {
            if (group_choice[p] == -1)
                throw MalformedEncoding("edge " + std::to_string(p) + " has no operator");
            g.edge_op[p] = group_choice[p];
        }
        break;
    }
    }
    validate_genotype(space, g);
    return g;
}

Genotype random_sample(const SearchSpaceSpec& space, std::uint64_t seed) {
    Rng rng(seed);
    Genotype g;
    const int blocks = space.block_count();
    switch (space.kind) {
    case SpaceKind::MbV2Like: {
        const int kn = static_cast<int>(space.kernel_choices.size());
        const int en = static_cast<int>(space.expansion_choices.size());
        const int dn = static_cast<int>(space.depth_choices.size());
        g.kernel_choice.resize(static_cast<std::size_t>(blocks));
        g.expansion_choice.resize(static_cast<std::size_t>(blocks));
        g.stage_depth.resize(static_cast<std::size_t>(space.stage_count));
        for (int p = 0; p < blocks; ++p) g.kernel_choice[p] = rng.next_index(kn);
        for (int p = 0; p < blocks; ++p) g.expansion_choice[p] = rng.next_index(en);
        for (int s = 0; s < space.stage_count; ++s)
            g.stage_depth[s] = space.depth_choices[rng.next_index(dn)];
        break;
    }
    case SpaceKind::FbNetLike: {
        const int cn = space.choices_per_position();
        g.block_choice.resize(static_cast<std::size_t>(blocks));
        for (int p = 0; p < blocks; ++p) g.block_choice[p] = rng.next_index(cn);
        break;
    }
    case SpaceKind::CellLike: {
        const int cn = space.choices_per_position();
        g.edge_op.resize(static_cast<std::size_t>(blocks));
        for (int p = 0; p < blocks; ++p) g.edge_op[p] = rng.next_index(cn);
        break;
    }
    }
    return g;
}

std::uint64_t space_cardinality(const SearchSpaceSpec& space) {
    std::uint64_t total = 1;
    const int blocks = space.block_count();
    switch (space.kind) {
    case SpaceKind::MbV2Like: {
        for (int p = 0; p < blocks; ++p) {
            total = saturating_mul(total, space.kernel_choices.size());
            total = saturating_mul(total, space.expansion_choices.size());
        }
        for (int s = 0; s < space.stage_count; ++s)
            total = saturating_mul(total, space.depth_choices.size());
        break;
    }
    case SpaceKind::FbNetLike:
    case SpaceKind::CellLike: {
        for (int p = 0; p < blocks; ++p)
            total = saturating_mul(total, static_cast<std::uint64_t>(space.choices_per_position()));
        break;
    }
    }
    return total;
}

std::vector<Genotype> enumerate_space(const SearchSpaceSpec& space, std::uint64_t cap) {
    const std::uint64_t total = space_cardinality(space);
    if (total > cap)
        throw SpaceTooLarge("space holds " + std::to_string(total) +
                            " genotypes, cap is " + std::to_string(cap));

    // Gene layout: (value count, writer) per gene, in sampling order.
    struct Gene {
        int count;
        int* target;     // written with the choice index
        const int* values; // optional value list (depth genes store values)
    };
    Genotype g;
    std::vector<Gene> genes;
    const int blocks = space.block_count();
    switch (space.kind) {
    case SpaceKind::MbV2Like: {
        g.kernel_choice.assign(static_cast<std::size_t>(blocks), 0);
        g.expansion_choice.assign(static_cast<std::size_t>(blocks), 0);
        g.stage_depth.assign(static_cast<std::size_t>(space.stage_count),
                             space.depth_choices.front());
        for (int p = 0; p < blocks; ++p)
            genes.push_back({static_cast<int>(space.kernel_choices.size()),
                             &g.kernel_choice[static_cast<std::size_t>(p)], nullptr});
        for (int p = 0; p < blocks; ++p)
            genes.push_back({static_cast<int>(space.expansion_choices.size()),
                             &g.expansion_choice[static_cast<std::size_t>(p)], nullptr});
        for (int s = 0; s < space.stage_count; ++s)
            genes.push_back({static_cast<int>(space.depth_choices.size()),
                             &g.stage_depth[static_cast<std::size_t>(s)],
                             space.depth_choices.data()});
        break;
    }
    case SpaceKind::FbNetLike: {
        g.block_choice.assign(static_cast<std::size_t>(blocks), 0);
        for (int p = 0; p < blocks; ++p)
            genes.push_back({space.choices_per_position(),
                             &g.block_choice[static_cast<std::size_t>(p)], nullptr});
        break;
    }
    case SpaceKind::CellLike: {
        g.edge_op.assign(static_cast<std::size_t>(blocks), 0);
        for (int p = 0; p < blocks; ++p)
            genes.push_back({space.choices_per_position(),
                             &g.edge_op[static_cast<std::size_t>(p)], nullptr});
        break;
    }
    }

    std::vector<int> odometer(genes.size(), 0);
    std::vector<Genotype> out;
    out.reserve(static_cast<std::size_t>(total));
    for (;;) {
        for (std::size_t i = 0; i < genes.size(); ++i) {
            *genes[i].target =
                genes[i].values ? genes[i].values[odometer[i]] : odometer[i];
        }
        out.push_back(g);
        // Advance, last gene fastest.
        int pos = static_cast<int>(genes.size()) - 1;
        while (pos >= 0) {
            if (++odometer[static_cast<std::size_t>(pos)] <
                genes[static_cast<std::size_t>(pos)].count)
                break;
            odometer[static_cast<std::size_t>(pos)] = 0;
            --pos;
        }
        if (pos < 0) break;
    }
    return out;
}

ArchStats arch_stats(const SearchSpaceSpec& space, const Genotype& g) {
    validate_genotype(space, g);
    ArchStats stats;
    for (int p = 0; p < space.block_count(); ++p) {
        if (!block_active(space, g, p)) continue;
        const CostEntry& e =
            space.cost_table[static_cast<std::size_t>(p)]
                            [static_cast<std::size_t>(active_choice_index(space, g, p))];
        stats.flops += e.flops;
        stats.bytes += e.bytes;
    }
    stats.operational_intensity = stats.bytes > 0.0 ? stats.flops / stats.bytes : 0.0;
    return stats;
}

std::uint64_t genotype_fingerprint(const SearchSpaceSpec& space, const Genotype& g) {
    const Genotype c = canonical_genotype(space, g);
    HashFold h;
    h.add_int(static_cast<int>(space.kind));
    for (const int v : c.kernel_choice) h.add_int(v);
    for (const int v : c.expansion_choice) h.add_int(v);
    for (const int v : c.stage_depth) h.add_int(v);
    for (const int v : c.block_choice) h.add_int(v);
    for (const int v : c.edge_op) h.add_int(v);
    return h.value();
}

// --- JSON --------------------------------------------------------------------

namespace {

using ordered_json = nlohmann::ordered_json;
using json = nlohmann::json;

std::string kind_to_string(SpaceKind k) {
    switch (k) {
    case SpaceKind::MbV2Like: return "mbv2";
    case SpaceKind::FbNetLike: return "fbnet";
    case SpaceKind::CellLike: return "cell";
    }
    return "";
}

SpaceKind kind_from_string(const std::string& s) {
    if (s == "mbv2") return SpaceKind::MbV2Like;
    if (s == "fbnet") return SpaceKind::FbNetLike;
    if (s == "cell") return SpaceKind::CellLike;
    throw ParseError("unknown space kind: " + s);
}

} // namespace

std::string genotype_to_json(const SearchSpaceSpec& space, const Genotype& raw) {
    // Canonical form, so equal architectures serialize to equal text.
    const Genotype g = canonical_genotype(space, raw);
    ordered_json j;
    switch (space.kind) {
    case SpaceKind::MbV2Like: {
        std::vector<int> kernels, expansions;
        for (const int idx : g.kernel_choice)
            kernels.push_back(space.kernel_choices[static_cast<std::size_t>(idx)]);
        for (const int idx : g.expansion_choice)
            expansions.push_back(space.expansion_choices[static_cast<std::size_t>(idx)]);
        j["kernel_size"] = kernels;
        j["expansion_ratio"] = expansions;
        j["depth"] = g.stage_depth;
        break;
    }
    case SpaceKind::FbNetLike:
        j["blocks"] = g.block_choice;
        break;
    case SpaceKind::CellLike:
        j["edge_ops"] = g.edge_op;
        break;
    }
    return j.dump();
}

Genotype genotype_from_json(const SearchSpaceSpec& space, const std::string& json_text) {
    json j;
    try {
        j = json::parse(json_text);
    } catch (const json::exception& e) {
        throw ParseError(std::string("genotype JSON: ") + e.what());
    }
    Genotype g;
    try {
        switch (space.kind) {
        case SpaceKind::MbV2Like: {
            const auto kernels = j.at("kernel_size").get<std::vector<int>>();
            const auto expansions = j.at("expansion_ratio").get<std::vector<int>>();
            g.stage_depth = j.at("depth").get<std::vector<int>>();
            auto value_index = [](const std::vector<int>& choices, int value) {
                const auto it = std::find(choices.begin(), choices.end(), value);
                if (it == choices.end())
                    throw InvalidGenotype("value " + std::to_string(value) +
                                          " is not a permitted choice");
                return static_cast<int>(it - choices.begin());
            };
            for (const int k : kernels)
                g.kernel_choice.push_back(value_index(space.kernel_choices, k));
            for (const int e : expansions)
                g.expansion_choice.push_back(value_index(space.expansion_choices, e));
            break;
        }
        case SpaceKind::FbNetLike:
            g.block_choice = j.at("blocks").get<std::vector<int>>();
            break;
        case SpaceKind::CellLike:
            g.edge_op = j.at("edge_ops").get<std::vector<int>>();
            break;
        }
    } catch (const json::exception& e) {
        throw ParseError(std::string("genotype JSON: ") + e.what());
    }
    validate_genotype(space, g);
    return g;
}

std::string space_to_json(const SearchSpaceSpec& space) {
    validate_space(space);
    ordered_json j;
    j["version"] = 1;
    j["id"] = space.id;
    j["kind"] = kind_to_string(space.kind);
    switch (space.kind) {
    case SpaceKind::MbV2Like:
    case SpaceKind::FbNetLike: {
        ordered_json stages;
        stages["count"] = space.stage_count;
        stages["max_blocks_per_stage"] = space.max_blocks_per_stage;
        stages["fixed_blocks"] = space.fixed_block_count;
        j["stages"] = stages;
        break;
    }
    case SpaceKind::CellLike: {
        ordered_json stages;
        stages["edges"] = space.cell_edge_count;
        j["stages"] = stages;
        break;
    }
    }
    ordered_json choices;
    if (space.kind == SpaceKind::MbV2Like) {
        choices["kernel_size"] = space.kernel_choices;
        choices["expansion_ratio"] = space.expansion_choices;
        choices["depth"] = space.depth_choices;
    } else {
        choices["operators"] = space.operator_labels;
    }
    j["choices"] = choices;

    ordered_json table = ordered_json::array();
    for (std::size_t p = 0; p < space.cost_table.size(); ++p) {
        for (std::size_t c = 0; c < space.cost_table[p].size(); ++c) {
            const CostEntry& e = space.cost_table[p][c];
            table.push_back({p, c, e.flops, e.bytes});
        }
    }
    j["cost_table"] = table;
    return j.dump(2);
}

SearchSpaceSpec space_from_json(const std::string& json_text) {
    json j;
    try {
        j = json::parse(json_text);
    } catch (const json::exception& e) {
        throw ParseError(std::string("space JSON: ") + e.what());
    }
    SearchSpaceSpec space;
    try {
        if (j.value("version", 0) != 1) throw ParseError("unsupported space version");
        space.id = j.at("id").get<std::string>();
        space.kind = kind_from_string(j.at("kind").get<std::string>());
        const json& stages = j.at("stages");
        switch (space.kind) {
        case SpaceKind::MbV2Like:
            space.stage_count = stages.at("count").get<int>();
            space.max_blocks_per_stage = stages.at("max_blocks_per_stage").get<int>();
            space.fixed_block_count = stages.at("fixed_blocks").get<int>();
            space.kernel_choices = j.at("choices").at("kernel_size").get<std::vector<int>>();
            space.expansion_choices =
                j.at("choices").at("expansion_ratio").get<std::vector<int>>();
            space.depth_choices = j.at("choices").at("depth").get<std::vector<int>>();
            break;
        case SpaceKind::FbNetLike:
            space.stage_count = stages.at("count").get<int>();
            space.max_blocks_per_stage = stages.at("max_blocks_per_stage").get<int>();
            space.fixed_block_count = stages.at("fixed_blocks").get<int>();
            space.operator_labels =
                j.at("choices").at("operators").get<std::vector<std::string>>();
            break;
        case SpaceKind::CellLike:
            space.cell_edge_count = stages.at("edges").get<int>();
            space.operator_labels =
                j.at("choices").at("operators").get<std::vector<std::string>>();
            break;
        }
        const int blocks = space.block_count();
        const int table_choices = space.kind == SpaceKind::FbNetLike
                                      ? space.choices_per_position() - 1
                                      : space.choices_per_position();
        space.cost_table.assign(static_cast<std::size_t>(blocks),
                                std::vector<CostEntry>(static_cast<std::size_t>(table_choices)));
        std::vector<std::vector<bool>> seen(
            static_cast<std::size_t>(blocks),
            std::vector<bool>(static_cast<std::size_t>(table_choices), false));
        for (const json& row : j.at("cost_table")) {
            if (!row.is_array() || row.size() != 4)
                throw ParseError("cost_table rows must be [position, choice, flops, bytes]");
            const int p = row[0].get<int>();
            const int c = row[1].get<int>();
            if (p < 0 || p >= blocks || c < 0 || c >= table_choices)
                throw ParseError("cost_table index out of range");
            space.cost_table[static_cast<std::size_t>(p)][static_cast<std::size_t>(c)] = {
                row[2].get<double>(), row[3].get<double>()};
            seen[static_cast<std::size_t>(p)][static_cast<std::size_t>(c)] = true;
        }
        for (int p = 0; p < blocks; ++p)
            for (int c = 0; c < table_choices; ++c)
                if (!seen[static_cast<std::size_t>(p)][static_cast<std::size_t>(c)])
                    throw ParseError("cost_table misses position " + std::to_string(p) +
                                     " choice " + std::to_string(c));
    } catch (const json::exception& e) {
        throw ParseError(std::string("space JSON: ") + e.what());
    }
    validate_space(space);
    return space;
}

// --- Defaults ----------------------------------------------------------------

namespace {

// Desk-scale feature-map geometry.  Spatial extents are small so that the
// derived operational intensities land in the few-FLOPs-per-byte regime
// where mobile inverted-residual networks actually operate.
struct StageDims {
    int h, w, c_in, c_out;
};

constexpr StageDims kMbv2Stages[5] = {
    {5, 2, 32, 48},
    {3, 3, 48, 72},
    {3, 3, 72, 112},
    {3, 2, 112, 160},
    {2, 3, 160, 256},
};
constexpr StageDims kMbv2FixedBlock = {2, 3, 256, 320};
constexpr StageDims kFbnetFirstBlock = {5, 2, 24, 32};
constexpr StageDims kFbnetLastBlock = {2, 3, 256, 320};

std::vector<BlockDims> stage_block_dims(const StageDims& s, int blocks) {
    std::vector<BlockDims> out;
    out.push_back({s.h, s.w, s.c_in, s.c_out});
    for (int i = 1; i < blocks; ++i) out.push_back({s.h, s.w, s.c_out, s.c_out});
    return out;
}

} // namespace

BackboneConfig default_mbv2_backbone() {
    BackboneConfig cfg;
    for (const StageDims& s : kMbv2Stages) {
        const auto dims = stage_block_dims(s, 4);
        cfg.blocks.insert(cfg.blocks.end(), dims.begin(), dims.end());
    }
    cfg.blocks.push_back({kMbv2FixedBlock.h, kMbv2FixedBlock.w, kMbv2FixedBlock.c_in,
                          kMbv2FixedBlock.c_out});
    return cfg;
}

CostEntry inverted_residual_cost(const BlockDims& dims, int kernel, double expansion,
                                 int group) {
    const double hw = static_cast<double>(dims.h) * dims.w;
    const double pointwise =
        (static_cast<double>(dims.c_in) + dims.c_out) / static_cast<double>(group);
    const double per_channel = pointwise + static_cast<double>(kernel) * kernel;
    const double params = expansion * dims.c_in * per_channel;
    CostEntry e;
    e.flops = 2.0 * hw * params;
    e.bytes = 4.0 * (params + hw * (static_cast<double>(dims.c_in) + dims.c_out));
    return e;
}

SearchSpaceSpec default_mbv2_space() {
    SearchSpaceSpec space;
    space.id = "mbv2-default";
    space.kind = SpaceKind::MbV2Like;
    space.stage_count = 5;
    space.max_blocks_per_stage = 4;
    space.fixed_block_count = 1;
    space.kernel_choices = {3, 5, 7};
    space.expansion_choices = {3, 4, 6};
    space.depth_choices = {2, 3, 4};

    const BackboneConfig backbone = default_mbv2_backbone();
    for (const BlockDims& dims : backbone.blocks) {
        std::vector<CostEntry> row;
        for (const int k : space.kernel_choices)
            for (const int e : space.expansion_choices)
                row.push_back(inverted_residual_cost(dims, k, e));
        space.cost_table.push_back(std::move(row));
    }
    validate_space(space);
    return space;
}

SearchSpaceSpec default_fbnet_space() {
    SearchSpaceSpec space;
    space.id = "fbnet-default";
    space.kind = SpaceKind::FbNetLike;
    space.stage_count = 5;
    space.max_blocks_per_stage = 4;
    space.fixed_block_count = 2; // chain ends, searchable but outside stages
    space.operator_labels = {"k3_e1",    "k3_e3",    "k3_e6",  "k5_e1", "k5_e3",
                             "k5_e6",    "k3_e1_g2", "k5_e1_g2", "skip"};

    std::vector<BlockDims> positions;
    for (const StageDims& s : kMbv2Stages) {
        const auto dims = stage_block_dims(s, 4);
        positions.insert(positions.end(), dims.begin(), dims.end());
    }
    positions.push_back(
        {kFbnetFirstBlock.h, kFbnetFirstBlock.w, kFbnetFirstBlock.c_in, kFbnetFirstBlock.c_out});
    positions.push_back(
        {kFbnetLastBlock.h, kFbnetLastBlock.w, kFbnetLastBlock.c_in, kFbnetLastBlock.c_out});

    struct OpSpec {
        int kernel;
        double expansion;
        int group;
    };
    const OpSpec ops[8] = {{3, 1, 1}, {3, 3, 1}, {3, 6, 1}, {5, 1, 1},
                           {5, 3, 1}, {5, 6, 1}, {3, 1, 2}, {5, 1, 2}};
    for (const BlockDims& dims : positions) {
        std::vector<CostEntry> row;
        for (const OpSpec& op : ops)
            row.push_back(inverted_residual_cost(dims, op.kernel, op.expansion, op.group));
        space.cost_table.push_back(std::move(row));
    }
    validate_space(space);
    return space;
}

SearchSpaceSpec default_cell_space(int edges) {
    SearchSpaceSpec space;
    space.id = edges == 6 ? "cell-default" : "cell-" + std::to_string(edges);
    space.kind = SpaceKind::CellLike;
    space.cell_edge_count = edges;
    space.operator_labels = {"none", "skip_connect", "conv_1x1", "conv_3x3", "avg_pool_3x3"};

    // Synthetic per-edge costs.  Operator factors spread the operational
    // intensity across both roofline regimes.
    struct OpCost {
        double flops_factor;
        double bytes_factor;
    };
    const OpCost ops[5] = {
        {0.02, 0.30}, // none: pass-through write
        {0.05, 1.00}, // skip_connect
        {1.00, 0.80}, // conv_1x1
        {3.20, 1.10}, // conv_3x3
        {0.30, 1.00}, // avg_pool_3x3
    };
    for (int e = 0; e < edges; ++e) {
        const double base_flops = 1.0e6 * (2.0 + e);
        const double base_bytes = base_flops / 4.0;
        std::vector<CostEntry> row;
        for (const OpCost& op : ops)
            row.push_back({base_flops * op.flops_factor, base_bytes * op.bytes_factor});
        space.cost_table.push_back(std::move(row));
    }
    validate_space(space);
    return space;
}

} // namespace proxynas
