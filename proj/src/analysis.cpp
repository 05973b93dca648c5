#include "segchain/analysis.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <future>
#include <numeric>

#include "segchain/errors.hpp"
#include "segchain/rng.hpp"
#include "segchain/svg.hpp"

namespace segchain {

void CaptureParams::validate() const {
    if (occupations == 0 || segments == 0)
        raise(Errc::config_error, "occupations and segments must be positive");
    if (spots_needed == 0 || spots_needed > occupations)
        raise(Errc::config_error, "spots_needed must lie in 1..occupations");
    if (adversary_nodes > total_nodes())
        raise(Errc::config_error, "adversary_nodes exceeds total nodes");
}

std::vector<std::uint64_t> optimal_placement(std::uint64_t adversary_nodes,
                                             std::uint32_t spots) {
    if (spots == 0)
        raise(Errc::config_error, "spots must be positive");
    // near-equal split: the remainder spreads one-each over the trailing
    // spots, which maximizes the product (lumping it on the last spot does
    // not once the remainder exceeds one)
    std::vector<std::uint64_t> placement(spots, adversary_nodes / spots);
    std::uint64_t remainder = adversary_nodes % spots;
    for (std::uint32_t i = 0; i < remainder; ++i)
        placement[spots - 1 - i] += 1;
    return placement;
}

std::uint64_t placement_product(const std::vector<std::uint64_t>& placement) {
    std::uint64_t product = 1;
    for (std::uint64_t a : placement)
        product *= a;
    return product;
}

std::uint64_t max_placement_product(std::uint64_t adversary_nodes, std::uint32_t spots) {
    // walk every composition of AD into `spots` nonnegative parts
    std::vector<std::uint64_t> parts(spots, 0);
    std::uint64_t best = 0;
    auto recurse = [&](auto&& self, std::uint32_t index, std::uint64_t left) -> void {
        if (index + 1 == spots) {
            parts[index] = left;
            best = std::max(best, placement_product(parts));
            return;
        }
        for (std::uint64_t take = 0; take <= left; ++take) {
            parts[index] = take;
            self(self, index + 1, left - take);
        }
    };
    recurse(recurse, 0, adversary_nodes);
    return best;
}

CaptureProbability capture_probability(const CaptureParams& params,
                                       const std::vector<std::uint64_t>* placement) {
    params.validate();
    std::vector<std::uint64_t> chosen;
    if (placement) {
        chosen = *placement;
        if (chosen.size() != params.spots_needed)
            raise(Errc::placement_infeasible, "placement must cover the front T occupations");
        std::uint64_t sum = std::accumulate(chosen.begin(), chosen.end(), std::uint64_t(0));
        if (sum > params.adversary_nodes)
            raise(Errc::placement_infeasible, "placement exceeds the adversary's node count");
    } else {
        chosen = optimal_placement(params.adversary_nodes, params.spots_needed);
    }
    for (std::uint64_t a : chosen)
        if (a > params.segments)
            raise(Errc::placement_infeasible,
                  "an occupation cannot hold more than s adversary nodes");

    CaptureProbability out;
    out.exact = 1.0;
    for (std::uint64_t a : chosen)
        out.exact *= static_cast<double>(a) / params.segments;
    double ratio = static_cast<double>(params.adversary_nodes) /
                   (static_cast<double>(params.spots_needed) * params.segments);
    out.approx = std::pow(ratio, static_cast<double>(params.spots_needed));
    return out;
}

double enumerate_capture_probability(std::uint32_t segments,
                                     const std::vector<std::uint64_t>& placement) {
    if (segments == 0 || segments > 6)
        raise(Errc::config_error, "enumeration oracle expects 1 <= s <= 6");
    for (std::uint64_t a : placement)
        if (a > segments)
            raise(Errc::placement_infeasible, "placement exceeds the row size");

    // one row = a permutation of `segments` nodes, adversaries at the front.
    // Deriving the per-row count from a formula would just restate the product
    // form, so literally enumerate every tuple of row permutations and count
    // those whose target-segment keeper (position 0, by symmetry) is
    // adversarial in every row.
    std::vector<std::uint32_t> base(segments);
    std::iota(base.begin(), base.end(), 0);

    std::vector<std::vector<std::uint32_t>> perms;
    {
        std::vector<std::uint32_t> p = base;
        do {
            perms.push_back(p);
        } while (std::next_permutation(p.begin(), p.end()));
    }

    std::uint64_t total = 1, hits = 0;
    for (std::size_t i = 0; i < placement.size(); ++i) {
        if (total > 100'000'000 / perms.size())
            raise(Errc::config_error, "enumeration oracle instance too large");
        total *= perms.size();
    }

    for (std::uint64_t tuple = 0; tuple < total; ++tuple) {
        std::uint64_t rest = tuple;
        bool captured = true;
        for (std::size_t row = 0; row < placement.size(); ++row) {
            const auto& perm = perms[rest % perms.size()];
            rest /= perms.size();
            if (perm[0] >= placement[row]) { // keeper of the target segment
                captured = false;
                break;
            }
        }
        if (captured)
            ++hits;
    }
    return static_cast<double>(hits) / static_cast<double>(total);
}

namespace {

std::uint64_t run_capture_chunk(const std::vector<std::uint64_t>& placement,
                                std::uint32_t segments, std::uint64_t trials,
                                std::uint64_t seed, std::uint64_t chunk_index) {
    RngStream rng(seed, "mc-capture/" + std::to_string(chunk_index));
    std::uint64_t hits = 0;
    for (std::uint64_t t = 0; t < trials; ++t) {
        bool captured = true;
        for (std::uint64_t adversaries : placement) {
            if (rng.next_below(segments) >= adversaries) {
                captured = false;
                break;
            }
        }
        if (captured)
            ++hits;
    }
    return hits;
}

constexpr std::uint64_t kMcChunk = 1 << 16;

} // namespace

MonteCarloEstimate monte_carlo_capture(const CaptureParams& params, std::uint64_t trials,
                                       std::uint64_t seed, unsigned workers) {
    params.validate();
    if (trials == 0)
        raise(Errc::config_error, "trials must be positive");
    auto placement = optimal_placement(params.adversary_nodes, params.spots_needed);
    for (std::uint64_t a : placement)
        if (a > params.segments)
            raise(Errc::placement_infeasible,
                  "an occupation cannot hold more than s adversary nodes");

    // fixed-size chunks with per-chunk streams: the result is a plain sum of
    // chunk hits, independent of how chunks are spread over workers
    std::uint64_t chunk_count = (trials + kMcChunk - 1) / kMcChunk;
    std::vector<std::uint64_t> chunk_hits(chunk_count, 0);
    if (workers <= 1) {
        for (std::uint64_t c = 0; c < chunk_count; ++c) {
            std::uint64_t n = std::min(kMcChunk, trials - c * kMcChunk);
            chunk_hits[c] = run_capture_chunk(placement, params.segments, n, seed, c);
        }
    } else {
        std::vector<std::future<void>> futures;
        std::atomic<std::uint64_t> next{0};
        for (unsigned w = 0; w < workers; ++w) {
            futures.push_back(std::async(std::launch::async, [&] {
                for (;;) {
                    std::uint64_t c = next.fetch_add(1);
                    if (c >= chunk_count)
                        return;
                    std::uint64_t n = std::min(kMcChunk, trials - c * kMcChunk);
                    chunk_hits[c] = run_capture_chunk(placement, params.segments, n, seed, c);
                }
            }));
        }
        for (auto& f : futures)
            f.get();
    }

    MonteCarloEstimate estimate;
    estimate.trials = trials;
    estimate.hits = std::accumulate(chunk_hits.begin(), chunk_hits.end(), std::uint64_t(0));
    estimate.mean = static_cast<double>(estimate.hits) / static_cast<double>(trials);
    estimate.ci95 =
        1.96 * std::sqrt(estimate.mean * (1.0 - estimate.mean) / static_cast<double>(trials));
    return estimate;
}

void ShardCombineParams::validate() const {
    if (total_nodes == 0 || shards == 0)
        raise(Errc::config_error, "total_nodes and shards must be positive");
    double per_shard = static_cast<double>(total_nodes) / shards;
    if (!(shard_threshold > 0.5 * per_shard) || !(shard_threshold <= per_shard))
        raise(Errc::config_error, "shard_threshold must satisfy 0.5*n/s1 < T <= n/s1");
}

ShardingSegmentCount sharding_segment_count(const ShardCombineParams& params) {
    params.validate();
    const double n = static_cast<double>(params.total_nodes);
    const double s1 = static_cast<double>(params.shards);
    const double t = static_cast<double>(params.shard_threshold);
    // log of 2^-T * (n/(s1*T))^T, evaluated in log space
    double log_inner = t * (std::log(n / (s1 * t)) - std::log(2.0));
    if (!(log_inner < 0.0))
        raise(Errc::domain_error, "2^-T * (n/(s1*T))^T must be below 1");
    ShardingSegmentCount out;
    out.s0 = -(n * std::log(2.0)) / log_inner;
    out.ratio = out.s0 / s1;
    return out;
}

std::uint64_t node_storage_bytes(const StorageModelParams& params) {
    if (params.segments == 0 || params.height == 0)
        raise(Errc::config_error, "height and segments must be positive");
    std::uint64_t worst_segment_blocks =
        params.height / params.segments + params.height % params.segments;
    std::uint64_t block_bytes =
        params.block_body_bytes + params.pending_record_bytes * params.pending_per_block;
    return worst_segment_blocks * block_bytes + params.height * params.header_bytes +
           params.state_record_bytes * params.accounts;
}

std::uint64_t nakamoto_storage_bytes(const StorageModelParams& params) {
    return params.height * params.block_body_bytes;
}

namespace {

std::string csv_num(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::ofstream open_out(const std::string& path) {
    std::ofstream out(path);
    if (!out)
        raise(Errc::io_error, "cannot open " + path);
    return out;
}

} // namespace

std::vector<std::string> emit_figures(const FigureConfig& config) {
    namespace fs = std::filesystem;
    std::error_code ec;
    fs::create_directories(config.out_dir, ec);
    std::vector<std::string> written;
    auto path = [&](const std::string& name) { return (fs::path(config.out_dir) / name).string(); };

    // ratio sweep (s0/s1 over shard counts, one series per n)
    {
        auto csv = open_out(path("ratio.csv"));
        csv << "n,s1,T,s0,ratio\n";
        LinePlot plot("Segments per shard under equal failure probability", "shards s1",
                      "s0 / s1");
        for (std::uint64_t n : config.ratio_node_counts) {
            std::vector<std::pair<double, double>> points;
            for (std::uint32_t s1 : config.ratio_shard_counts) {
                std::uint32_t threshold = static_cast<std::uint32_t>(
                    config.ratio_threshold_fraction * static_cast<double>(n) / s1);
                ShardCombineParams params{n, s1, threshold, 1e-6};
                ShardingSegmentCount result;
                try {
                    result = sharding_segment_count(params);
                } catch (const Error&) {
                    continue; // out-of-domain grid point
                }
                csv << n << "," << s1 << "," << threshold << "," << csv_num(result.s0) << ","
                    << csv_num(result.ratio) << "\n";
                points.emplace_back(double(s1), result.ratio);
            }
            plot.add_series("n=" + std::to_string(n), std::move(points));
        }
        plot.write(path("fig_ratio.svg"));
        written.push_back(path("ratio.csv"));
        written.push_back(path("fig_ratio.svg"));
    }

    // storage requirement vs height, one series per account count
    {
        auto csv = open_out(path("storage.csv"));
        csv << "h,s,accounts,seg_bytes,nakamoto_bytes\n";
        LinePlot plot("Per-node data requirement", "block height h", "bytes");
        LinePlot compare("Per-node data: segment vs full chain", "block height h", "bytes");
        std::uint64_t step = config.storage_height_step
                                 ? config.storage_height_step
                                 : config.storage_segments;
        std::vector<std::pair<double, double>> nakamoto_points;
        for (std::uint64_t accounts : config.storage_account_counts) {
            std::vector<std::pair<double, double>> points;
            for (std::uint64_t h = step; h <= config.storage_height_max; h += step) {
                StorageModelParams params = config.storage;
                params.accounts = accounts;
                params.height = h;
                params.segments = config.storage_segments;
                std::uint64_t seg = node_storage_bytes(params);
                std::uint64_t nakamoto = nakamoto_storage_bytes(params);
                csv << h << "," << params.segments << "," << accounts << "," << seg << ","
                    << nakamoto << "\n";
                points.emplace_back(double(h), double(seg));
                if (accounts == config.storage_account_counts.back())
                    nakamoto_points.emplace_back(double(h), double(nakamoto));
            }
            plot.add_series("accounts=" + std::to_string(accounts), points);
            if (accounts == config.storage_account_counts.back()) {
                compare.add_series("segment, accounts=" + std::to_string(accounts),
                                   std::move(points));
                compare.add_series("nakamoto h*SB", std::move(nakamoto_points));
            }
        }
        plot.write(path("fig_storage.svg"));
        compare.set_log_y(true);
        compare.write(path("fig_compare.svg"));
        written.push_back(path("storage.csv"));
        written.push_back(path("fig_storage.svg"));
        written.push_back(path("fig_compare.svg"));
    }

    return written;
}

} // namespace segchain
