#include "segchain/membership.hpp"

#include <algorithm>

#include "segchain/bytes.hpp"
#include "segchain/errors.hpp"

namespace segchain {

const char* node_status_name(NodeStatus status) {
    switch (status) {
    case NodeStatus::pending: return "pending";
    case NodeStatus::active: return "active";
    case NodeStatus::eliminated: return "eliminated";
    }
    return "unknown";
}

std::vector<std::uint8_t> PowRecord::preimage() const {
    std::vector<std::uint8_t> out;
    out.reserve(32 + 32 + 4 + 8 + 32);
    put_bytes(out, prev_block_ref.bytes);
    put_bytes(out, identity_key);
    if (occupation)
        put_u32(out, *occupation);
    put_u64(out, claimed_difficulty);
    put_bytes(out, nonce);
    return out;
}

std::uint32_t pow_zero_bits(const PowRecord& record) {
    return leading_zero_bits(hash_bytes(record.preimage()));
}

std::optional<PowRecord> mine_pow(PowRecord record, std::uint32_t zero_bits,
                                  std::uint64_t max_attempts) {
    for (std::uint64_t attempt = 0; attempt < max_attempts; ++attempt) {
        std::vector<std::uint8_t> counter;
        put_u64(counter, attempt);
        std::copy(counter.begin(), counter.end(), record.nonce.begin());
        if (pow_zero_bits(record) >= zero_bits)
            return record;
    }
    return std::nullopt;
}

PendingQueue::PendingQueue(std::uint32_t occupations) : queues_(occupations) {
    if (occupations == 0)
        raise(Errc::config_error, "occupation count must be positive");
}

const std::deque<NodeRecord>& PendingQueue::at(std::uint32_t occupation) const {
    if (occupation < 1 || occupation > occupations())
        raise(Errc::bad_occupation, "occupation " + std::to_string(occupation) +
                                        " outside 1.." + std::to_string(occupations()));
    return queues_[occupation - 1];
}

std::deque<NodeRecord>& PendingQueue::at_mut(std::uint32_t occupation) {
    return const_cast<std::deque<NodeRecord>&>(at(occupation));
}

std::size_t PendingQueue::min_length() const {
    std::size_t best = queues_.front().size();
    for (const auto& q : queues_)
        best = std::min(best, q.size());
    return best;
}

std::size_t PendingQueue::total() const {
    std::size_t sum = 0;
    for (const auto& q : queues_)
        sum += q.size();
    return sum;
}

bool PendingQueue::contains(const IdentityKey& key) const {
    for (const auto& q : queues_)
        for (const auto& node : q)
            if (node.identity_key == key)
                return true;
    return false;
}

void PendingQueue::push(NodeRecord node) {
    auto& q = at_mut(node.occupation);
    node.status = NodeStatus::pending;
    node.assigned_segment.reset();
    q.push_back(std::move(node));
}

NodeRecord PendingQueue::pop_front(std::uint32_t occupation) {
    auto& q = at_mut(occupation);
    if (q.empty())
        raise(Errc::bad_occupation, "occupation " + std::to_string(occupation) + " queue empty");
    NodeRecord node = std::move(q.front());
    q.pop_front();
    return node;
}

bool PendingQueue::erase(const IdentityKey& key) {
    for (auto& q : queues_) {
        for (auto it = q.begin(); it != q.end(); ++it) {
            if (it->identity_key == key) {
                q.erase(it);
                return true;
            }
        }
    }
    return false;
}

std::vector<const NodeRecord*> PendingQueue::all() const {
    std::vector<const NodeRecord*> out;
    for (const auto& q : queues_)
        for (const auto& node : q)
            out.push_back(&node);
    return out;
}

std::uint32_t choose_occupation(const PendingQueue& queue) {
    std::uint32_t best = 1;
    std::size_t best_len = queue.length(1);
    for (std::uint32_t i = 2; i <= queue.occupations(); ++i) {
        if (queue.length(i) < best_len) {
            best = i;
            best_len = queue.length(i);
        }
    }
    return best;
}

Roster::Roster(std::uint32_t occupations, std::uint32_t segments)
    : occupations_(occupations), segments_(segments),
      grid_(std::size_t(occupations) * segments) {
    if (occupations == 0 || segments == 0)
        raise(Errc::config_error, "roster dimensions must be positive");
}

std::size_t Roster::cell(std::uint32_t occupation, std::uint32_t segment) const {
    if (occupation < 1 || occupation > occupations_ || segment < 1 || segment > segments_)
        raise(Errc::bad_occupation,
              "cell (" + std::to_string(occupation) + "," + std::to_string(segment) +
                  ") outside " + std::to_string(occupations_) + "x" + std::to_string(segments_));
    return std::size_t(occupation - 1) * segments_ + (segment - 1);
}

const NodeRecord& Roster::at(std::uint32_t occupation, std::uint32_t segment) const {
    const auto& slot = grid_[cell(occupation, segment)];
    if (!slot)
        raise(Errc::ragged_roster, "empty cell (" + std::to_string(occupation) + "," +
                                       std::to_string(segment) + ")");
    return *slot;
}

NodeRecord& Roster::at_mut(std::uint32_t occupation, std::uint32_t segment) {
    return const_cast<NodeRecord&>(at(occupation, segment));
}

bool Roster::occupied(std::uint32_t occupation, std::uint32_t segment) const {
    return grid_[cell(occupation, segment)].has_value();
}

void Roster::place(NodeRecord node, std::uint32_t segment) {
    node.status = NodeStatus::active;
    node.assigned_segment = segment;
    grid_[cell(node.occupation, segment)] = std::move(node);
}

bool Roster::grid_complete() const {
    return std::all_of(grid_.begin(), grid_.end(),
                       [](const auto& slot) { return slot.has_value(); });
}

std::size_t Roster::active_count() const {
    return static_cast<std::size_t>(
        std::count_if(grid_.begin(), grid_.end(),
                      [](const auto& slot) { return slot.has_value(); }));
}

const NodeRecord* Roster::find(const IdentityKey& key) const {
    for (const auto& slot : grid_)
        if (slot && slot->identity_key == key)
            return &*slot;
    return nullptr;
}

NodeRecord* Roster::find_mut(const IdentityKey& key) {
    return const_cast<NodeRecord*>(find(key));
}

std::vector<std::vector<IdentityKey>> Roster::occupation_rows() const {
    std::vector<std::vector<IdentityKey>> rows(occupations_);
    for (std::uint32_t occ = 1; occ <= occupations_; ++occ) {
        rows[occ - 1].reserve(segments_);
        for (std::uint32_t seg = 1; seg <= segments_; ++seg) {
            const auto& slot = grid_[cell(occ, seg)];
            if (slot)
                rows[occ - 1].push_back(slot->identity_key);
        }
    }
    return rows;
}

std::vector<const NodeRecord*> Roster::all() const {
    std::vector<const NodeRecord*> out;
    out.reserve(grid_.size());
    for (const auto& slot : grid_)
        if (slot)
            out.push_back(&*slot);
    return out;
}

std::vector<NodeRecord> Roster::remove_column(std::uint32_t segment) {
    std::vector<NodeRecord> removed;
    removed.reserve(occupations_);
    std::vector<std::optional<NodeRecord>> next(std::size_t(occupations_) * (segments_ - 1));
    for (std::uint32_t occ = 1; occ <= occupations_; ++occ) {
        std::uint32_t out_seg = 0;
        for (std::uint32_t seg = 1; seg <= segments_; ++seg) {
            auto& slot = grid_[cell(occ, seg)];
            if (seg == segment) {
                if (slot)
                    removed.push_back(std::move(*slot));
                continue;
            }
            ++out_seg;
            if (slot) {
                slot->assigned_segment = out_seg;
                next[std::size_t(occ - 1) * (segments_ - 1) + (out_seg - 1)] = std::move(slot);
            }
        }
    }
    segments_ -= 1;
    grid_ = std::move(next);
    return removed;
}

void Roster::grow_segments(std::uint32_t segments) {
    if (segments < segments_)
        raise(Errc::config_error, "grow_segments cannot shrink");
    std::vector<std::optional<NodeRecord>> next(std::size_t(occupations_) * segments);
    for (std::uint32_t occ = 1; occ <= occupations_; ++occ)
        for (std::uint32_t seg = 1; seg <= segments_; ++seg)
            next[std::size_t(occ - 1) * segments + (seg - 1)] =
                std::move(grid_[cell(occ, seg)]);
    segments_ = segments;
    grid_ = std::move(next);
}

void submit_join(PendingQueue& queue, const PowRecord& pow, const JoinContext& ctx,
                 const Roster* roster, double power, bool honest) {
    if (!pow.occupation)
        raise(Errc::bad_occupation, "join PoW must claim an occupation");
    if (*pow.occupation < 1 || *pow.occupation > queue.occupations())
        raise(Errc::bad_occupation, "occupation " + std::to_string(*pow.occupation) +
                                        " outside 1.." + std::to_string(queue.occupations()));
    std::uint64_t required = ctx.base_difficulty * ctx.segments;
    if (pow.claimed_difficulty < required)
        raise(Errc::insufficient_difficulty,
              "difficulty " + std::to_string(pow.claimed_difficulty) + " below P*s = " +
                  std::to_string(required));
    if (ctx.required_zero_bits && pow_zero_bits(pow) < *ctx.required_zero_bits)
        raise(Errc::insufficient_difficulty,
              "PoW hash carries fewer than " + std::to_string(*ctx.required_zero_bits) +
                  " leading zero bits");
    if (pow.prev_block_ref != ctx.expected_anchor)
        raise(Errc::stale_prev_block_ref, "join PoW anchored at the wrong block");
    if (queue.contains(pow.identity_key) ||
        (roster && roster->find(pow.identity_key) != nullptr))
        raise(Errc::duplicate_identity, "identity already present: " +
                                            to_hex(pow.identity_key));

    NodeRecord node;
    node.identity_key = pow.identity_key;
    node.occupation = *pow.occupation;
    node.power = power;
    node.honest = honest;
    queue.push(std::move(node));
}

Keepalive keepalive_check(const NodeRecord& node, double power_spent,
                          double base_difficulty, std::uint32_t window_iterations) {
    if (node.status == NodeStatus::eliminated)
        return Keepalive::drop;
    double required = (node.status == NodeStatus::pending)
                          ? base_difficulty
                          : base_difficulty * window_iterations;
    return power_spent >= required ? Keepalive::pass : Keepalive::drop;
}

bool growth_trigger(const PendingQueue& queue) {
    return queue.min_length() >= kGrowthQueueDepth;
}

EliminationOutcome eliminate_and_backfill(Roster& roster, const IdentityKey& failed,
                                          PendingQueue& queue) {
    NodeRecord* node = roster.find_mut(failed);
    if (!node || node->status != NodeStatus::active)
        raise(Errc::bad_occupation, "eliminated identity is not an active keeper");
    std::uint32_t occupation = node->occupation;
    std::uint32_t segment = *node->assigned_segment;

    EliminationOutcome outcome;
    if (queue.length(occupation) > 0) {
        NodeRecord replacement = queue.pop_front(occupation);
        roster.place(replacement, segment);
        outcome.replacement = roster.at(occupation, segment);
        return outcome;
    }

    // No pending node in this occupation: the segment column dissolves and
    // the other keepers go back to the pending queues in occupation order.
    outcome.s_delta = -1;
    outcome.dissolved_segment = segment;
    std::vector<NodeRecord> removed = roster.remove_column(segment);
    for (NodeRecord& keeper : removed) {
        if (keeper.identity_key == failed)
            continue;
        outcome.demoted.push_back(keeper);
        queue.push(std::move(keeper));
    }
    return outcome;
}

} // namespace segchain
