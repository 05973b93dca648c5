#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace segchain {

/// Parameters of the capture-probability law. Capture of a segment needs the
/// adversary in the front T occupation slots of that segment's keeper column
/// (T = m for storage capture).
struct CaptureParams {
    std::uint32_t occupations = 1;     // m
    std::uint32_t segments = 1;        // s
    std::uint64_t adversary_nodes = 0; // AD
    std::uint32_t spots_needed = 1;    // T

    std::uint64_t total_nodes() const { return std::uint64_t(occupations) * segments; }
    void validate() const;
};

/// The near-equal split maximizing the placement product: floor(AD/T) in the
/// first T-1 occupations, floor(AD/T) + AD mod T in the last.
std::vector<std::uint64_t> optimal_placement(std::uint64_t adversary_nodes,
                                             std::uint32_t spots);

std::uint64_t placement_product(const std::vector<std::uint64_t>& placement);

/// Brute-force max of prod(A_i) over every composition of AD into T parts.
/// Oracle for the optimal-placement rule; feasible for small AD, T.
std::uint64_t max_placement_product(std::uint64_t adversary_nodes, std::uint32_t spots);

struct CaptureProbability {
    double exact = 0;  // prod A_i / s
    double approx = 0; // (AD / (T*s))^T
};

/// Exact product form for the given placement (defaults to the optimal one),
/// plus the closed-form approximation. Throws PlacementInfeasible when a
/// placement exceeds the per-occupation node count or the adversary total.
CaptureProbability capture_probability(const CaptureParams& params,
                                       const std::vector<std::uint64_t>* placement = nullptr);

/// Exhaustive oracle: enumerates every tuple of per-occupation permutations
/// (adversaries first in each row) and counts tuples where the target
/// segment's front placement.size() slots are all adversarial. Cost
/// (s!)^rows; keep s <= 4 and rows <= 3.
double enumerate_capture_probability(std::uint32_t segments,
                                     const std::vector<std::uint64_t>& placement);

struct MonteCarloEstimate {
    double mean = 0;
    double ci95 = 0; // normal-approximation half width
    std::uint64_t trials = 0;
    std::uint64_t hits = 0;
};

/// Empirical check of the capture law: each trial draws the audited segment's
/// keeper uniformly within every occupation row (the marginal of a uniform
/// ranking permutation at one position) and counts full front-T capture.
/// Deterministic in (params, trials, seed) and independent of `workers`.
MonteCarloEstimate monte_carlo_capture(const CaptureParams& params, std::uint64_t trials,
                                       std::uint64_t seed, unsigned workers = 1);

/// Shard/segment combination sizing inputs; threshold must satisfy
/// 0.5 * n/s1 < T <= n/s1.
struct ShardCombineParams {
    std::uint64_t total_nodes = 0;     // n
    std::uint32_t shards = 1;          // s1
    std::uint32_t shard_threshold = 1; // T
    double pr_max = 1e-6;              // target failure probability (sweeps)

    void validate() const;
};

struct ShardingSegmentCount {
    double s0 = 0;
    double ratio = 0; // s0 / s1
};

/// s0 = -(n ln 2) / ln(2^-T * (n/(s1*T))^T); throws DomainError when the log
/// argument is not inside (0, 1).
ShardingSegmentCount sharding_segment_count(const ShardCombineParams& params);

/// Data-requirement model: worst-case (last, longest) segment plus every
/// header plus the full state.
struct StorageModelParams {
    std::uint64_t block_body_bytes = 1'000'000; // SB
    std::uint64_t header_bytes = 112;
    std::uint64_t state_record_bytes = 41;
    std::uint64_t pending_record_bytes = 68;
    std::uint64_t pending_per_block = 256;
    std::uint64_t accounts = 0;
    std::uint64_t height = 1;   // h
    std::uint32_t segments = 1; // s
};

std::uint64_t node_storage_bytes(const StorageModelParams& params);
std::uint64_t nakamoto_storage_bytes(const StorageModelParams& params); // h * SB

/// Regenerates the ratio / storage / comparison figures as CSV plus SVG line
/// plots. Returns the written file paths.
struct FigureConfig {
    std::string out_dir = ".";
    std::vector<std::uint64_t> ratio_node_counts = {4000, 8000};
    std::vector<std::uint32_t> ratio_shard_counts = {8, 16, 32, 64, 128};
    double ratio_threshold_fraction = 0.6; // T = fraction * n / s1
    StorageModelParams storage;            // storage/comparison sweeps
    std::vector<std::uint64_t> storage_account_counts = {0, 10'000, 1'000'000};
    std::uint64_t storage_height_max = 100'000;
    std::uint32_t storage_segments = 100;
    std::uint64_t storage_height_step = 0; // 0: one segment-boundary step (s)
};

std::vector<std::string> emit_figures(const FigureConfig& config);

} // namespace segchain
