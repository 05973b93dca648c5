#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "segchain/analysis.hpp"
#include "segchain/errors.hpp"
#include "segchain/proof_io.hpp"
#include "segchain/sim.hpp"
#include "segchain/svg.hpp"

namespace fs = std::filesystem;
using segchain::Errc;
using segchain::Error;
using ordered_json = nlohmann::ordered_json;

namespace {

constexpr const char* kToolVersion = "segchain 0.1.0";
constexpr int kExitOk = 0;
constexpr int kExitUsage = 2;
constexpr int kExitIo = 3;

int exit_code_for(const Error& e) {
    return e.code() == Errc::io_error ? kExitIo : kExitUsage;
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        segchain::raise(Errc::io_error, "cannot read " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out)
        segchain::raise(Errc::io_error, "cannot write " + path);
    out << content;
    if (!out)
        segchain::raise(Errc::io_error, "write failed: " + path);
}

std::string resolve_out_dir(const std::string& flag_value) {
    if (const char* env = std::getenv("SEGCHAIN_OUT"); env && *env)
        return env;
    return flag_value;
}

std::string fmt_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

void write_manifest(const std::string& out_dir, const std::string& config_text,
                    std::uint64_t seed, const std::vector<std::string>& outputs,
                    double duration_ms) {
    ordered_json j{{"tool_version", kToolVersion},
                   {"seed", seed},
                   {"config", config_text},
                   {"outputs", outputs},
                   {"duration_ms", duration_ms}};
    write_file((fs::path(out_dir) / "manifest.json").string(), j.dump(2) + "\n");
}

struct SimulateArgs {
    std::string config_path;
    std::string out_dir = "out";
    std::uint64_t seed = 0;
    std::uint64_t iterations = 0;
    std::uint32_t m = 0;
    std::uint32_t s = 0;
    double adversary_fraction = -1.0;
    std::string strategy;
    bool has_seed = false, has_iterations = false;
};

int cmd_simulate(const SimulateArgs& args) {
    segchain::SimConfig config;
    if (!args.config_path.empty()) {
        std::string text;
        try {
            text = read_file(args.config_path);
        } catch (const Error&) {
            segchain::raise(Errc::config_error, "cannot read config file " + args.config_path);
        }
        config = segchain::parse_sim_config(text);
    }
    if (args.has_seed)
        config.seed = args.seed;
    if (args.has_iterations)
        config.iterations = args.iterations;
    if (args.m)
        config.occupations = args.m;
    if (args.s)
        config.initial_segments = args.s;
    if (args.adversary_fraction >= 0) {
        std::uint64_t n = std::uint64_t(config.occupations) * config.initial_segments;
        std::uint64_t ad = static_cast<std::uint64_t>(args.adversary_fraction * double(n) + 0.5);
        config.genesis_adversaries = ad;
        config.adversary_nodes = ad;
        if (config.adversary_power == 0)
            config.adversary_power = double(ad); // AD sustained identities need AD*P
    }
    if (!args.strategy.empty()) {
        auto kind = segchain::adversary_kind_from_name(args.strategy);
        if (!kind)
            segchain::raise(Errc::config_error, "unknown strategy: " + args.strategy);
        config.adversary.kind = *kind;
    }
    config.validate();

    std::string out_dir = resolve_out_dir(args.out_dir);
    std::error_code ec;
    fs::create_directories(out_dir, ec);

    auto started = std::chrono::steady_clock::now();
    segchain::Simulation sim(config);
    sim.run();
    segchain::SimOutcome outcome = sim.outcome();
    auto elapsed = std::chrono::duration<double, std::milli>(
                       std::chrono::steady_clock::now() - started)
                       .count();

    auto out_path = [&](const char* name) { return (fs::path(out_dir) / name).string(); };
    write_file(out_path("outcome.json"), outcome.summary_json());
    write_file(out_path("events.jsonl"), outcome.events_jsonl());
    write_file(out_path("roster.csv"), outcome.roster_csv());
    {
        std::ofstream chain_out(out_path("chain.bin"), std::ios::binary);
        if (!chain_out)
            segchain::raise(Errc::io_error, "cannot write chain.bin");
        sim.chain().serialize_to(chain_out);
    }
    write_manifest(out_dir, segchain::sim_config_to_text(config), config.seed,
                   {"outcome.json", "events.jsonl", "roster.csv", "chain.bin"}, elapsed);

    std::cout << "height " << outcome.final_height << ", segments " << outcome.final_segments
              << ", proofs ok " << outcome.proofs_ok << ", failed " << outcome.proofs_failed
              << ", losses " << outcome.segments_lost.size() << "\n";
    return kExitOk;
}

struct CaptureArgs {
    std::uint32_t m = 8;
    std::uint32_t s = 64;
    double adversary_fraction = 0.5;
    std::uint32_t spots = 0; // 0 -> m
    std::uint64_t trials = 1'000'000;
    unsigned trials_parallel = 1;
    std::uint64_t seed = 1;
    std::string out_dir = "out";
    std::string format = "csv";
};

int cmd_analyze_capture(const CaptureArgs& args) {
    segchain::CaptureParams params;
    params.occupations = args.m;
    params.segments = args.s;
    params.spots_needed = args.spots ? args.spots : args.m;
    params.adversary_nodes =
        static_cast<std::uint64_t>(args.adversary_fraction * double(params.total_nodes()) + 0.5);
    params.validate();

    segchain::CaptureProbability prob = segchain::capture_probability(params);
    segchain::MonteCarloEstimate mc;
    if (args.trials > 0)
        mc = segchain::monte_carlo_capture(params, args.trials, args.seed,
                                           args.trials_parallel);

    std::cout << "m=" << params.occupations << " s=" << params.segments
              << " AD=" << params.adversary_nodes << " T=" << params.spots_needed << "\n";
    std::cout << "exact " << fmt_double(prob.exact) << "\n";
    std::cout << "approx " << fmt_double(prob.approx) << "\n";
    if (args.trials > 0)
        std::cout << "monte_carlo " << fmt_double(mc.mean) << " +- " << fmt_double(mc.ci95)
                  << " (" << mc.hits << "/" << mc.trials << ")\n";

    std::string out_dir = resolve_out_dir(args.out_dir);
    std::error_code ec;
    fs::create_directories(out_dir, ec);
    if (args.format == "json") {
        ordered_json j{{"m", params.occupations},
                       {"n", params.total_nodes()},
                       {"AD", params.adversary_nodes},
                       {"exact", prob.exact},
                       {"approx", prob.approx},
                       {"mc_mean", mc.mean},
                       {"mc_ci", mc.ci95}};
        write_file((fs::path(out_dir) / "capture.json").string(), j.dump(2) + "\n");
    } else {
        std::string csv = "m,n,AD,exact,approx,mc_mean,mc_ci\n";
        csv += std::to_string(params.occupations) + "," + std::to_string(params.total_nodes()) +
               "," + std::to_string(params.adversary_nodes) + "," + fmt_double(prob.exact) +
               "," + fmt_double(prob.approx) + "," + fmt_double(mc.mean) + "," +
               fmt_double(mc.ci95) + "\n";
        write_file((fs::path(out_dir) / "capture.csv").string(), csv);
    }
    return kExitOk;
}

struct RatioArgs {
    std::uint64_t n = 0;
    std::uint32_t s1 = 0;
    std::uint32_t threshold = 0;
    std::string out_dir = "out";
};

int cmd_analyze_ratio(const RatioArgs& args) {
    std::string out_dir = resolve_out_dir(args.out_dir);
    if (args.n && args.s1 && args.threshold) {
        segchain::ShardCombineParams params{args.n, args.s1, args.threshold, 1e-6};
        segchain::ShardingSegmentCount result = segchain::sharding_segment_count(params);
        std::cout << "n=" << args.n << " s1=" << args.s1 << " T=" << args.threshold << "\n";
        std::cout << "s0 " << fmt_double(result.s0) << "\n";
        std::cout << "ratio " << fmt_double(result.ratio) << "\n";
        std::error_code ec;
        fs::create_directories(out_dir, ec);
        std::string csv = "n,s1,T,s0,ratio\n";
        csv += std::to_string(args.n) + "," + std::to_string(args.s1) + "," +
               std::to_string(args.threshold) + "," + fmt_double(result.s0) + "," +
               fmt_double(result.ratio) + "\n";
        write_file((fs::path(out_dir) / "ratio.csv").string(), csv);
        return kExitOk;
    }
    segchain::FigureConfig config;
    config.out_dir = out_dir;
    auto written = segchain::emit_figures(config);
    for (const auto& path : written)
        std::cout << path << "\n";
    return kExitOk;
}

struct StorageArgs {
    std::uint64_t sb = 1'000'000;
    std::uint64_t pending = 256;
    std::uint64_t accounts = 0;
    std::uint64_t h_max = 100'000;
    std::uint64_t step = 1;
    std::uint32_t s = 100;
    std::string out_dir = "out";
};

int cmd_analyze_storage(const StorageArgs& args) {
    std::string out_dir = resolve_out_dir(args.out_dir);
    std::error_code ec;
    fs::create_directories(out_dir, ec);

    segchain::StorageModelParams params;
    params.block_body_bytes = args.sb;
    params.pending_per_block = args.pending;
    params.accounts = args.accounts;
    params.segments = args.s;

    std::string csv = "h,s,accounts,seg_bytes,nakamoto_bytes\n";
    segchain::LinePlot plot("Per-node data requirement", "block height h", "bytes");
    std::vector<std::pair<double, double>> seg_points, nak_points;
    for (std::uint64_t h = args.step; h <= args.h_max; h += args.step) {
        params.height = h;
        std::uint64_t seg = segchain::node_storage_bytes(params);
        std::uint64_t nak = segchain::nakamoto_storage_bytes(params);
        csv += std::to_string(h) + "," + std::to_string(args.s) + "," +
               std::to_string(args.accounts) + "," + std::to_string(seg) + "," +
               std::to_string(nak) + "\n";
        seg_points.emplace_back(double(h), double(seg));
        nak_points.emplace_back(double(h), double(nak));
    }
    write_file((fs::path(out_dir) / "storage.csv").string(), csv);
    plot.add_series("segment", std::move(seg_points));
    plot.add_series("nakamoto h*SB", std::move(nak_points));
    plot.set_log_y(true);
    plot.write((fs::path(out_dir) / "fig_storage.svg").string());

    params.height = std::max<std::uint64_t>(args.h_max, 1);
    std::cout << "h=" << params.height << " storage " << segchain::node_storage_bytes(params)
              << " bytes, nakamoto " << segchain::nakamoto_storage_bytes(params) << " bytes\n";
    return kExitOk;
}

int cmd_verify_proof(const std::string& proof_path, const std::string& headers_path) {
    segchain::ProofOfStorage proof = segchain::proof_from_json(read_file(proof_path));
    segchain::VerifyBundle bundle = segchain::verify_bundle_from_json(read_file(headers_path));
    segchain::ProofFailure reason = segchain::ProofFailure::none;
    bool ok = segchain::verify_proof(proof, bundle.headers, bundle.block_hash,
                                     bundle.assignment, bundle.context, &reason);
    if (ok) {
        std::cout << "OK\n";
        return kExitOk;
    }
    std::cout << segchain::proof_failure_name(reason) << "\n";
    return 1;
}

struct ExportArgs {
    std::string chain_path;
    std::uint32_t segment = 1;
    std::uint32_t s = 1;
    std::string out_path = "segment.dump";
};

int cmd_export_segment(const ExportArgs& args) {
    std::ifstream in(args.chain_path, std::ios::binary);
    if (!in)
        segchain::raise(Errc::io_error, "cannot read " + args.chain_path);
    segchain::ChainStore chain = segchain::ChainStore::deserialize(in);
    segchain::SegmentLayout layout = segchain::SegmentLayout::make(chain.height(), args.s);
    segchain::HeightRange range = segchain::block_range(layout, args.segment);

    std::ofstream out(args.out_path, std::ios::binary);
    if (!out)
        segchain::raise(Errc::io_error, "cannot write " + args.out_path);
    out << "segment " << args.segment << " of " << args.s << " at " << chain.height() << "\n";
    for (std::uint64_t h = range.first; h <= range.last; ++h) {
        auto raw = chain.at(h).serialize();
        out.write(reinterpret_cast<const char*>(raw.data()),
                  static_cast<std::streamsize>(raw.size()));
    }
    if (!out)
        segchain::raise(Errc::io_error, "write failed: " + args.out_path);
    std::cout << "wrote blocks " << range.first << ".." << range.last << " to "
              << args.out_path << "\n";
    return kExitOk;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"segment-blockchain protocol simulator and analysis toolkit"};
    app.require_subcommand(1);

    SimulateArgs sim_args;
    auto* simulate = app.add_subcommand("simulate", "run the protocol engine");
    simulate->add_option("--config", sim_args.config_path, "key=value config file");
    simulate->add_option("--out", sim_args.out_dir, "output directory");
    auto* seed_opt = simulate->add_option("--seed", sim_args.seed, "run seed");
    auto* iter_opt = simulate->add_option("--iterations", sim_args.iterations, "iterations");
    simulate->add_option("--m", sim_args.m, "occupations");
    simulate->add_option("--s", sim_args.s, "initial segments");
    simulate->add_option("--adversary-fraction", sim_args.adversary_fraction,
                         "AD as a fraction of the genesis grid");
    simulate->add_option("--strategy", sim_args.strategy,
                         "none|optimal_placement|capture_and_vanish");

    auto* analyze = app.add_subcommand("analyze", "closed-form and Monte Carlo analysis");
    analyze->require_subcommand(1);

    CaptureArgs capture_args;
    auto* capture = analyze->add_subcommand("capture", "capture-probability law");
    capture->add_option("--m", capture_args.m, "occupations");
    capture->add_option("--s", capture_args.s, "segments");
    capture->add_option("--adversary-fraction", capture_args.adversary_fraction,
                        "AD as a fraction of n");
    capture->add_option("--t", capture_args.spots, "spots needed (default m)");
    capture->add_option("--trials", capture_args.trials, "Monte Carlo trials (0 disables)");
    capture->add_option("--trials-parallel", capture_args.trials_parallel, "worker threads");
    capture->add_option("--seed", capture_args.seed, "Monte Carlo seed");
    capture->add_option("--out", capture_args.out_dir, "output directory");
    capture->add_option("--format", capture_args.format, "csv|json")
        ->check(CLI::IsMember({"csv", "json"}));

    RatioArgs ratio_args;
    auto* ratio = analyze->add_subcommand("ratio", "segments-per-shard sizing");
    ratio->add_option("--n", ratio_args.n, "total nodes");
    ratio->add_option("--s1", ratio_args.s1, "shard count");
    ratio->add_option("--t", ratio_args.threshold, "shard consensus threshold");
    ratio->add_option("--out", ratio_args.out_dir, "output directory");

    StorageArgs storage_args;
    auto* storage = analyze->add_subcommand("storage", "data-requirement model");
    storage->add_option("--sb", storage_args.sb, "block body bytes");
    storage->add_option("--pending", storage_args.pending, "pending records per block");
    storage->add_option("--accounts", storage_args.accounts, "state records");
    storage->add_option("--h-max", storage_args.h_max, "sweep height limit");
    storage->add_option("--step", storage_args.step, "sweep step");
    storage->add_option("--s", storage_args.s, "segment count");
    storage->add_option("--out", storage_args.out_dir, "output directory");

    std::string proof_path, headers_path;
    auto* verify = app.add_subcommand("verify-proof", "check a Proof of Storage");
    verify->add_option("proof", proof_path, "proof JSON file")->required();
    verify->add_option("headers", headers_path, "headers JSON file")->required();

    ExportArgs export_args;
    auto* exporter = app.add_subcommand("export-segment", "dump one segment's blocks");
    exporter->add_option("--chain", export_args.chain_path, "chain.bin file")->required();
    exporter->add_option("--segment", export_args.segment, "segment index")->required();
    exporter->add_option("--s", export_args.s, "segment count")->required();
    exporter->add_option("--out", export_args.out_path, "output file");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitUsage;
    }

    try {
        if (simulate->parsed()) {
            sim_args.has_seed = seed_opt->count() > 0;
            sim_args.has_iterations = iter_opt->count() > 0;
            return cmd_simulate(sim_args);
        }
        if (capture->parsed())
            return cmd_analyze_capture(capture_args);
        if (ratio->parsed())
            return cmd_analyze_ratio(ratio_args);
        if (storage->parsed())
            return cmd_analyze_storage(storage_args);
        if (verify->parsed())
            return cmd_verify_proof(proof_path, headers_path);
        if (exporter->parsed())
            return cmd_export_segment(export_args);
    } catch (const Error& e) {
        std::cerr << e.what() << "\n";
        return exit_code_for(e);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    }
    return kExitUsage;
}
