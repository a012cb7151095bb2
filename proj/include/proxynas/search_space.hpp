#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace proxynas {

/// The three block-structured search-space families supported by the toolkit.
///
/// MbV2Like   inverted-residual stages with a per-stage depth gene; every
///            block picks a (kernel, expansion) pair.
/// FbNetLike  a flat chain of blocks, each picking one named operator; the
///            last operator is "skip", which removes the block.
/// CellLike   a small cell graph; every edge picks one named operator and is
///            always present.  Small enough to enumerate exhaustively.
enum class SpaceKind { MbV2Like, FbNetLike, CellLike };

/// Per-block cost-table entry.  Strictly positive in both components.
struct CostEntry {
    double flops = 0.0;
    double bytes = 0.0;
};

/// Feature-map geometry of one block position, used to derive default
/// cost tables.
struct BlockDims {
    int h = 0;
    int w = 0;
    int c_in = 0;
    int c_out = 0;
};

struct BackboneConfig {
    std::vector<BlockDims> blocks; // one entry per block position
};

/// Static description of a search space plus its per-(position, choice)
/// cost table.  Instances are immutable once validated.
struct SearchSpaceSpec {
    std::string id;
    SpaceKind kind = SpaceKind::MbV2Like;

    // MbV2Like / FbNetLike layout: block positions are grouped into
    // `stage_count` stages of `max_blocks_per_stage` positions, followed by
    // `fixed_block_count` ungrouped positions (always active for MbV2Like).
    int stage_count = 0;
    int max_blocks_per_stage = 0;
    int fixed_block_count = 0;

    // MbV2Like choice lists.  The per-block choice index is
    // kernel_index * |expansion_choices| + expansion_index.
    std::vector<int> kernel_choices;
    std::vector<int> expansion_choices;
    std::vector<int> depth_choices;

    // FbNetLike / CellLike operator labels.  For FbNetLike the final label
    // must be "skip"; a skipped block encodes as an all-zero group.
    std::vector<std::string> operator_labels;

    // CellLike layout.
    int cell_edge_count = 0;

    // cost_table[position][active_choice] -> (flops, bytes).  For FbNetLike
    // the skip choice carries no entry (a skipped block costs nothing).
    std::vector<std::vector<CostEntry>> cost_table;

    /// Number of block positions (MbV2Like/FbNetLike) or edges (CellLike).
    int block_count() const;

    /// Choice count per position as seen by the genotype.
    int choices_per_position() const;

    /// One-hot group width per position in the binary encoding.  Equals
    /// choices_per_position() except for FbNetLike, where skip is the
    /// all-zero pattern rather than a one-hot slot.
    int group_width() const;

    /// Encoded feature count including the trailing bias feature.
    int encoding_length() const;

    int skip_choice_index() const; // FbNetLike only, -1 otherwise
};

/// Throws InvalidGenotype-family errors when structural invariants fail.
void validate_space(const SearchSpaceSpec& space);

/// A point in a search space.  Only the fields for the owning space kind are
/// populated.  MbV2Like choice vectors cover every position (including
/// positions beyond the active depth); stage_depth stores actual depths.
struct Genotype {
    std::vector<int> kernel_choice;    // MbV2Like: index into kernel_choices
    std::vector<int> expansion_choice; // MbV2Like: index into expansion_choices
    std::vector<int> stage_depth;      // MbV2Like: depth value per stage
    std::vector<int> block_choice;     // FbNetLike: choice index, may be skip
    std::vector<int> edge_op;          // CellLike: operator index per edge

    bool operator==(const Genotype&) const = default;
};

/// Binary feature vector over block choices plus a trailing bias fixed at 1.
struct ArchEncoding {
    std::vector<double> features;
};

struct ArchStats {
    double flops = 0.0;
    double bytes = 0.0;
    double operational_intensity = 0.0;
};

void validate_genotype(const SearchSpaceSpec& space, const Genotype& g);

/// True when the block at `position` contributes compute.
bool block_active(const SearchSpaceSpec& space, const Genotype& g, int position);

/// Rewrites choice genes of inactive blocks to index 0.  Two genotypes that
/// differ only in inactive genes canonicalize identically.
Genotype canonical_genotype(const SearchSpaceSpec& space, const Genotype& g);

/// Genotype -> one-hot-per-block binary features plus bias.
ArchEncoding encode(const SearchSpaceSpec& space, const Genotype& g);

/// Inverse of encode (up to inactive-block canonicalization).  Throws
/// MalformedEncoding on wrong length, non-binary values, multi-hot groups,
/// missing bias, or active patterns no genotype produces.
Genotype decode(const SearchSpaceSpec& space, const ArchEncoding& enc);

/// Per-gene uniform sample.  Deterministic for a fixed (space, seed).
Genotype random_sample(const SearchSpaceSpec& space, std::uint64_t seed);

/// Total number of genotypes (product of per-gene choice counts).
/// Returns a saturating value capped at 2^63-1.
std::uint64_t space_cardinality(const SearchSpaceSpec& space);

/// Every genotype exactly once, in odometer order (last gene fastest).
/// Throws SpaceTooLarge when the cardinality exceeds `cap`.
std::vector<Genotype> enumerate_space(const SearchSpaceSpec& space,
                                      std::uint64_t cap = 1000000);

/// Sums cost-table entries over active blocks.
ArchStats arch_stats(const SearchSpaceSpec& space, const Genotype& g);

/// Stable 64-bit fingerprint of the canonical genotype.
std::uint64_t genotype_fingerprint(const SearchSpaceSpec& space, const Genotype& g);

// --- JSON serialization -----------------------------------------------------

std::string genotype_to_json(const SearchSpaceSpec& space, const Genotype& g);
Genotype genotype_from_json(const SearchSpaceSpec& space, const std::string& json_text);

std::string space_to_json(const SearchSpaceSpec& space);
SearchSpaceSpec space_from_json(const std::string& json_text);

// --- Default spaces ---------------------------------------------------------

/// Geometry of the default mobile backbone (five searchable stages plus one
/// always-active final block).
BackboneConfig default_mbv2_backbone();

/// Derives a cost table from block geometry for (kernel, expansion) choices:
///   flops = 2 * H * W * C_in * e * (C_in + k^2 + C_out)
///   bytes = 4 * (params + H*W*C_in + H*W*C_out),
///   params = e * C_in * (C_in + k^2 + C_out)
/// with an optional per-choice group divisor on the pointwise terms.
CostEntry inverted_residual_cost(const BlockDims& dims, int kernel, double expansion,
                                 int group = 1);

/// 5 stages x up to 4 blocks + 1 fixed block, kernel {3,5,7} x expansion
/// {3,4,6}, depth {2,3,4}.  21 positions, 9 choices, 190 encoded features.
SearchSpaceSpec default_mbv2_space();

/// 22 block positions, 9 operators with "skip" last.  177 encoded features.
SearchSpaceSpec default_fbnet_space();

/// `edges` cell edges (4 or 6 by convention, default 6), 5 operators each.
SearchSpaceSpec default_cell_space(int edges = 6);

} // namespace proxynas
