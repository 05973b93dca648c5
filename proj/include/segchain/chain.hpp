#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <map>
#include <span>
#include <vector>

#include "segchain/bytes.hpp"
#include "segchain/digest.hpp"

namespace segchain {

using Address = std::array<std::uint8_t, 33>;     // wallet address
using IdentityKey = std::array<std::uint8_t, 32>; // opaque node identity token

/// Storage rewards are paid "using the node's public identity key as the
/// wallet address": the 32-byte key becomes a 33-byte address under a fixed
/// tag byte, so key-derived addresses never collide with ordinary wallets.
Address address_of_key(const IdentityKey& key);

struct Transaction {
    Address from{};
    Address to{};
    std::uint64_t amount = 0;
    std::uint32_t fee = 0;
    std::uint32_t nonce = 0;

    static constexpr std::size_t kSerializedSize = 82; // 33 + 33 + 8 + 4 + 4

    void serialize_to(std::vector<std::uint8_t>& out) const;
    std::vector<std::uint8_t> serialize() const;
    static Transaction deserialize(ByteReader& in);
    Digest256 hash() const;

    bool operator==(const Transaction&) const = default;
};

/// One state entry on the wire: 33-byte address + 8-byte balance = 41 bytes.
struct StateRecord {
    Address address{};
    std::uint64_t balance = 0;

    static constexpr std::size_t kSerializedSize = 41;
};

/// The ledger: balance of every account at a given height. Only nonzero
/// balances are kept, so map equality is canonical-form equality and equal
/// states serialize identically (records sorted by address).
struct LedgerState {
    std::map<Address, std::uint64_t> records;
    std::uint64_t height_basis = 0;

    std::uint64_t balance(const Address& addr) const;
    std::uint64_t total_supply() const;
    void credit(const Address& addr, std::uint64_t amount);

    std::vector<std::uint8_t> serialize() const;
    static LedgerState deserialize(ByteReader& in);

    bool operator==(const LedgerState&) const = default;
};

/// Pending-node section entry: 4-byte occupation + 32-byte identity key +
/// 32-byte PoW nonce = 68 bytes.
struct PendingNodeEntry {
    std::uint32_t occupation = 0; // 1-based
    IdentityKey identity_key{};
    std::array<std::uint8_t, 32> pow_nonce{};

    static constexpr std::size_t kSerializedSize = 68;

    void serialize_to(std::vector<std::uint8_t>& out) const;
    static PendingNodeEntry deserialize(ByteReader& in);
    Digest256 hash() const;

    bool operator==(const PendingNodeEntry&) const = default;
};

/// Fixed 112-byte header: 4 height + 32 prev + 32 tx root + 32 pending root +
/// 4 difficulty + 4 nonce + 4 timestamp. The header hash is the block's
/// identity BH_h. The PoW preimage additionally covers the creator key.
struct BlockHeader {
    std::uint32_t height = 0;
    Digest256 prev_hash{};
    Digest256 tx_merkle_root{};
    Digest256 pending_merkle_root{};
    std::uint32_t pow_difficulty = 0;
    std::uint32_t pow_nonce = 0;
    std::uint32_t timestamp = 0; // iteration index

    static constexpr std::size_t kSerializedSize = 112;

    void serialize_to(std::vector<std::uint8_t>& out) const;
    std::vector<std::uint8_t> serialize() const;
    static BlockHeader deserialize(ByteReader& in);

    bool operator==(const BlockHeader&) const = default;
};

Digest256 header_hash(const BlockHeader& header);

/// Storage credit embedded two heights after the proof was presented.
struct StorageAttestation {
    IdentityKey keeper{};
    std::uint32_t segment_index = 0;

    bool operator==(const StorageAttestation&) const = default;
};

struct Block {
    BlockHeader header;
    IdentityKey creator{};
    std::vector<Transaction> transactions;
    std::vector<PendingNodeEntry> pending_section;
    std::vector<StorageAttestation> storage_attestations; // provers verified at height h-2

    /// Recompute the tx / pending Merkle roots from the sections. Empty
    /// sections commit to the zero digest.
    void seal_roots();

    std::vector<std::uint8_t> serialize() const;
    static Block deserialize(ByteReader& in);

    bool operator==(const Block&) const = default;
};

struct RewardSchedule {
    std::uint64_t initial_subsidy = 50'000'000;
    std::uint64_t halving_interval = 210'000; // blocks
    std::uint64_t storage_reward_pool = 0;    // split among one height's verified provers

    /// initial_subsidy >> (height / halving_interval), floored at zero.
    std::uint64_t subsidy(std::uint64_t height) const;
};

/// Reward flows of one block: fees plus subsidy to the creator, the storage
/// pool split equally over the attested keepers (remainder to the lowest
/// identity key). The pool is system-issued while subsidies last and funded
/// from this block's fees afterwards.
struct BlockCredits {
    std::uint64_t fees = 0;
    std::uint64_t subsidy = 0;
    std::uint64_t pool = 0;
    bool pool_issued = false; // true: new supply; false: carved out of fees
    std::uint64_t creator_credit = 0;
    std::vector<std::pair<IdentityKey, std::uint64_t>> keeper_credits;

    std::uint64_t issued() const { return subsidy + (pool_issued ? pool : 0); }
};

BlockCredits block_credits(const Block& block, const RewardSchedule& rewards);

/// Run one block as input to the state machine: transfers applied in order,
/// fees plus subsidy to the creator, storage rewards to the attested keepers.
/// The input state is unchanged. Throws HeightMismatch / InvalidTransaction.
LedgerState apply_block(const LedgerState& state, const Block& block,
                        const RewardSchedule& rewards);

/// Accumulating form for replay loops; equivalent to state = apply_block(...)
/// without copying the record map. On error the state is left unspecified.
void apply_block_to(LedgerState& state, const Block& block, const RewardSchedule& rewards);

/// Fold of apply_block over a contiguous block run. The schedule is a
/// consensus parameter: replays must use the one the blocks were applied with.
LedgerState derive_state(const LedgerState& genesis, std::span<const Block> blocks,
                         const RewardSchedule& rewards = {});

/// Global block store. In the simulator this stands in for the network every
/// node can fetch blocks and segments from.
class ChainStore {
public:
    explicit ChainStore(LedgerState genesis_state, RewardSchedule rewards = {});

    std::uint64_t height() const { return blocks_.size(); }
    /// Validates continuity, committed roots, and state transition.
    void append(Block block);

    const Block& at(std::uint64_t height) const;               // 1-based
    const BlockHeader& header_at(std::uint64_t height) const;  // 0 == genesis header
    Digest256 block_hash_at(std::uint64_t height) const;
    std::uint64_t tx_count_at(std::uint64_t height) const;
    std::span<const Block> blocks() const { return blocks_; }

    const LedgerState& genesis_state() const { return genesis_state_; }
    const LedgerState& tip_state() const { return tip_state_; }
    const RewardSchedule& rewards() const { return rewards_; }

    void serialize_to(std::ostream& out) const;
    static ChainStore deserialize(std::istream& in);

private:
    LedgerState genesis_state_;
    LedgerState tip_state_;
    RewardSchedule rewards_;
    BlockHeader genesis_header_{}; // all-zero header at height 0
    std::vector<Block> blocks_;
};

} // namespace segchain
