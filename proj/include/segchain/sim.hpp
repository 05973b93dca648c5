#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "segchain/assignment.hpp"
#include "segchain/chain.hpp"
#include "segchain/membership.hpp"
#include "segchain/rng.hpp"
#include "segchain/segmentation.hpp"
#include "segchain/storage_proof.hpp"

namespace segchain {

enum class AdversaryKind : std::uint8_t { none, optimal_placement, capture_and_vanish };
const char* adversary_kind_name(AdversaryKind kind);
std::optional<AdversaryKind> adversary_kind_from_name(std::string_view name);

struct AdversaryStrategy {
    AdversaryKind kind = AdversaryKind::none;
    std::uint32_t target_occupations = 0; // T of the placement split; 0 means all m
};

/// Full run description. `none` treats adversary_nodes as labels only (the
/// nodes behave and pay like honest ones); the other strategies give the
/// adversary one pooled power budget it allocates across its identities.
struct SimConfig {
    std::uint32_t occupations = 8;        // m
    std::uint32_t initial_segments = 4;   // s0
    std::uint64_t base_difficulty = 1000; // P, difficulty units
    double honest_power = 0.0;            // total in P units; 0 -> 1.0 per honest node
    double adversary_power = 0.0;         // pooled budget, P units per iteration
    std::uint64_t adversary_nodes = 0;    // AD the strategy tries to sustain
    std::uint64_t genesis_adversaries = 0; // adversarial cells in the bootstrap grid
    AdversaryStrategy adversary;
    RewardSchedule rewards{50'000'000, 100'000, 1'200};
    std::uint64_t iterations = 100;
    std::uint64_t seed = 1;
    std::uint32_t txs_per_block = 4;
    std::uint32_t genesis_accounts = 32;
    std::uint64_t account_funding = 1'000'000'000;
    double join_rate = 0.0;             // honest joins per iteration
    std::uint64_t reassign_interval = 0; // extra ranked-reassignment epochs; 0 = protocol only

    void validate() const; // throws ConfigError naming the field
};

/// Flat key=value config text (# comments, blank lines allowed).
SimConfig parse_sim_config(std::string_view text);
std::string sim_config_to_text(const SimConfig& config);

struct EventRecord {
    std::uint64_t height = 0;
    std::string kind;    // block, proof_ok, proof_fail, eliminate, backfill,
                         // grow, shrink, reassign, loss
    std::string payload; // compact JSON object
};

struct LossEvent {
    std::uint64_t height = 0;
    std::uint32_t segment = 0;
};

struct SimOutcome {
    std::uint64_t iterations_run = 0;
    std::uint64_t final_height = 0;
    std::uint32_t occupations = 0;
    std::uint32_t final_segments = 0;
    bool halted = false;
    std::string halt_reason;

    std::vector<LossEvent> segments_lost;
    std::uint64_t growth_events = 0;
    std::uint64_t shrink_events = 0;
    std::uint64_t eliminations = 0;
    std::uint64_t backfills = 0;
    std::uint64_t assignment_epochs = 0; // genesis placement plus every ranked epoch
    std::uint64_t target_captures = 0;   // epochs with segment 1 fully adversarial
    std::uint64_t any_captures = 0;      // epochs with any segment fully adversarial
    std::uint64_t proofs_ok = 0;
    std::uint64_t proofs_failed = 0;
    std::uint64_t issued_supply = 0; // subsidies + system-issued storage pools
    std::uint64_t total_supply = 0;

    std::map<IdentityKey, std::uint64_t> reward_credits;
    std::vector<EventRecord> events;

    std::string summary_json() const; // deterministic serialization
    std::string events_jsonl() const;
    std::string roster_csv() const; // identity_key,occupation,segment,status,honest
    std::vector<std::array<std::string, 5>> roster_rows;
};

/// Per-identity credit map (creator rewards plus storage shares).
const std::map<IdentityKey, std::uint64_t>& reward_totals(const SimOutcome& outcome);

/// Discrete-iteration protocol engine: one mining round per iteration, the
/// two-height attestation/elimination pipelines, growth/shrink, ranked
/// reassignment epochs, adversary strategies and loss detection. Single
/// writer; tests may inspect the world between iterations.
class Simulation {
public:
    explicit Simulation(SimConfig config);

    void run_iteration();
    void run(); // all configured iterations (stops early if halted)

    SimOutcome outcome() const;

    const SimConfig& config() const { return config_; }
    const Roster& roster() const { return roster_; }
    const PendingQueue& queue() const { return queue_; }
    const ChainStore& chain() const { return chain_; }
    std::uint32_t segments() const { return segments_; }
    std::uint64_t height() const { return chain_.height(); }
    bool halted() const { return halted_; }
    const std::vector<SegmentCopy>& copies() const { return copies_; }
    const std::vector<SegmentCopy>& previous_copies() const { return previous_copies_; }
    std::size_t adversary_alive() const; // pending + active adversary identities

private:
    struct KeeperRuntime {
        std::uint64_t window_anchor = 0; // activation or last proving height
        double window_spent = 0.0;
        bool paid_this_iteration = false;
        bool data_held = true;
    };

    void bootstrap();
    void refresh_copies(std::uint64_t h, bool force_rebuild);
    void ranked_epoch(std::uint64_t h, const Digest256& bh, const char* cause);
    void capture_scan(std::uint64_t h);
    void adversary_allocate(std::uint64_t h);
    void process_joins(std::uint64_t h, std::vector<PendingNodeEntry>& section);
    void pending_keepalive(std::uint64_t h);
    IdentityKey pick_miner(std::uint64_t h);
    void proof_round(std::uint64_t h);
    void process_eliminations(std::uint64_t h);
    void try_growth(std::uint64_t h);
    void record(std::uint64_t height, const char* kind, std::string payload);
    void halt(std::uint64_t h, const std::string& reason);
    IdentityKey fresh_identity(const char* stream, std::uint64_t index);
    Digest256 join_anchor() const;

    SimConfig config_;
    std::vector<Address> accounts_; // genesis-funded; feeds the tx workload
    ChainStore chain_;
    Roster roster_;
    PendingQueue queue_;
    std::uint32_t segments_;
    double honest_node_power_ = 1.0;

    std::vector<HeaderInfo> headers_; // index == height; grows with the chain
    std::vector<SegmentCopy> copies_;
    std::vector<SegmentCopy> previous_copies_;
    std::uint64_t previous_expiry_ = 0;
    std::uint64_t copies_base_len_ = 0;
    bool copies_valid_ = false;
    bool epoch_this_height_ = false;

    std::map<IdentityKey, KeeperRuntime> runtime_;
    std::map<std::uint64_t, std::vector<StorageAttestation>> attestation_pipeline_;
    std::map<std::uint64_t, std::vector<IdentityKey>> elimination_pipeline_;
    std::set<IdentityKey> elimination_scheduled_;
    std::vector<PowRecord> adversary_joins_;
    std::size_t pending_drops_this_iteration_ = 0;

    bool adversary_vanished_ = false;
    std::uint64_t adversary_join_counter_ = 0;
    std::uint64_t honest_join_counter_ = 0;
    double join_accumulator_ = 0.0;
    std::uint64_t tx_counter_ = 0;

    RngStream rng_mining_;
    RngStream rng_txgen_;

    bool halted_ = false;
    std::string halt_reason_;
    SimOutcome outcome_;
};

SimOutcome run_simulation(const SimConfig& config);

} // namespace segchain
