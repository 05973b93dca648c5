#pragma once

#include <cstdint>
#include <deque>
#include <optional>
#include <vector>

#include "segchain/chain.hpp"
#include "segchain/digest.hpp"

namespace segchain {

enum class NodeStatus : std::uint8_t { pending, active, eliminated };
const char* node_status_name(NodeStatus status);

struct NodeRecord {
    IdentityKey identity_key{};
    std::uint32_t occupation = 0; // 1..m
    double power = 1.0;           // PoW capacity per iteration, in units of P
    bool honest = true;           // simulation-only label
    std::optional<std::uint32_t> assigned_segment;
    NodeStatus status = NodeStatus::pending;
};

/// Join / prover PoW record. The anchor points at the block of height h-s
/// (genesis when the chain is younger than one window); `occupation` is
/// present in join PoWs only.
struct PowRecord {
    Digest256 prev_block_ref{};
    IdentityKey identity_key{};
    std::optional<std::uint32_t> occupation;
    std::uint64_t claimed_difficulty = 0;
    std::array<std::uint8_t, 32> nonce{};

    std::vector<std::uint8_t> preimage() const;
};

/// Hash-mode difficulty: d leading zero bits of the preimage hash, i.e. an
/// expected 2^d attempts. Budget mode never hashes; the engine verifies the
/// spending arithmetic instead.
std::uint32_t pow_zero_bits(const PowRecord& record);
std::optional<PowRecord> mine_pow(PowRecord record, std::uint32_t zero_bits,
                                  std::uint64_t max_attempts);

/// Per-occupation FIFO queues of joined-but-unassigned nodes, ranked by the
/// time their info was written into the pending section.
class PendingQueue {
public:
    explicit PendingQueue(std::uint32_t occupations);

    std::uint32_t occupations() const { return static_cast<std::uint32_t>(queues_.size()); }
    const std::deque<NodeRecord>& at(std::uint32_t occupation) const;
    std::size_t length(std::uint32_t occupation) const { return at(occupation).size(); }
    std::size_t min_length() const;
    std::size_t total() const;

    bool contains(const IdentityKey& key) const;
    void push(NodeRecord node); // appends to the node's occupation queue
    NodeRecord pop_front(std::uint32_t occupation);
    bool erase(const IdentityKey& key);

    std::vector<const NodeRecord*> all() const;

private:
    std::deque<NodeRecord>& at_mut(std::uint32_t occupation);
    std::vector<std::deque<NodeRecord>> queues_;
};

/// Occupation with the shortest queue; ties go to the lowest index.
std::uint32_t choose_occupation(const PendingQueue& queue);

/// The active grid: one keeper per (occupation, segment) cell.
class Roster {
public:
    Roster(std::uint32_t occupations, std::uint32_t segments);

    std::uint32_t occupations() const { return occupations_; }
    std::uint32_t segments() const { return segments_; }

    const NodeRecord& at(std::uint32_t occupation, std::uint32_t segment) const;
    NodeRecord& at_mut(std::uint32_t occupation, std::uint32_t segment);
    bool occupied(std::uint32_t occupation, std::uint32_t segment) const;

    /// Activates the node into a cell (sets status/assigned_segment).
    void place(NodeRecord node, std::uint32_t segment);
    bool grid_complete() const;
    std::size_t active_count() const;

    const NodeRecord* find(const IdentityKey& key) const;
    NodeRecord* find_mut(const IdentityKey& key);

    /// Active identity keys grouped by occupation, segment order.
    std::vector<std::vector<IdentityKey>> occupation_rows() const;
    std::vector<const NodeRecord*> all() const;

    /// Removes one segment column, renumbering higher columns down by one.
    /// Returns the removed records in occupation order.
    std::vector<NodeRecord> remove_column(std::uint32_t segment);

    /// Grows the grid to `segments` columns (new cells empty).
    void grow_segments(std::uint32_t segments);

private:
    std::size_t cell(std::uint32_t occupation, std::uint32_t segment) const;
    std::uint32_t occupations_;
    std::uint32_t segments_;
    std::vector<std::optional<NodeRecord>> grid_;
};

struct JoinContext {
    std::uint32_t segments = 1;        // s
    std::uint64_t base_difficulty = 1; // P
    Digest256 expected_anchor{};       // hash of the block at height h-s
    // hash mode: when set, the PoW hash must carry this many leading zero
    // bits; budget mode leaves it empty and the engine audits power spend
    std::optional<std::uint32_t> required_zero_bits;
};

/// Validates a join PoW (difficulty >= P*s, fresh anchor, unique identity)
/// and appends the node to its occupation queue. Power-spend verification is
/// the engine's job in budget mode.
void submit_join(PendingQueue& queue, const PowRecord& pow, const JoinContext& ctx,
                 const Roster* roster = nullptr, double power = 1.0, bool honest = true);

enum class Keepalive : std::uint8_t { pass, drop };

/// Pending nodes owe P per iteration. Active keepers owe P*s accumulated over
/// their proving window; pass `window_iterations` shorter than s for keepers
/// activated mid-window.
Keepalive keepalive_check(const NodeRecord& node, double power_spent,
                          double base_difficulty, std::uint32_t window_iterations);

/// Growth rule: true iff every occupation queue holds at least 10 nodes.
bool growth_trigger(const PendingQueue& queue);

constexpr std::uint32_t kGrowthQueueDepth = 10;
constexpr std::uint32_t kGrowthSegments = 10; // s += 10 per growth event

struct EliminationOutcome {
    int s_delta = 0;                         // 0 or -1
    std::optional<NodeRecord> replacement;   // pending head that took the slot
    std::vector<NodeRecord> demoted;         // keepers returned to pending on shrink
    std::uint32_t dissolved_segment = 0;     // set when s_delta == -1
};

/// Removes a failed keeper: the head of its occupation queue takes its
/// segment when available; otherwise s shrinks by one, the failed keeper's
/// segment column dissolves and its other m-1 keepers re-enter the pending
/// queues in occupation order. The caller re-runs storage assignment after a
/// shrink.
EliminationOutcome eliminate_and_backfill(Roster& roster, const IdentityKey& failed,
                                          PendingQueue& queue);

} // namespace segchain
