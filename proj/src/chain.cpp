#include "segchain/chain.hpp"

#include <algorithm>
#include <istream>
#include <limits>
#include <ostream>

#include "segchain/errors.hpp"
#include "segchain/merkle.hpp"

namespace segchain {

namespace {

constexpr std::uint8_t kKeyAddressTag = 0x01;
constexpr char kChainMagic[8] = {'S', 'E', 'G', 'C', 'H', 'N', '0', '1'};

Digest256 section_root(const std::vector<Digest256>& leaves) {
    if (leaves.empty())
        return Digest256{};
    return merkle_root(leaves);
}

} // namespace

Address address_of_key(const IdentityKey& key) {
    Address addr{};
    addr[0] = kKeyAddressTag;
    std::copy(key.begin(), key.end(), addr.begin() + 1);
    return addr;
}

void Transaction::serialize_to(std::vector<std::uint8_t>& out) const {
    put_bytes(out, from);
    put_bytes(out, to);
    put_u64(out, amount);
    put_u32(out, fee);
    put_u32(out, nonce);
}

std::vector<std::uint8_t> Transaction::serialize() const {
    std::vector<std::uint8_t> out;
    out.reserve(kSerializedSize);
    serialize_to(out);
    return out;
}

Transaction Transaction::deserialize(ByteReader& in) {
    Transaction tx;
    in.take(tx.from);
    in.take(tx.to);
    tx.amount = in.u64();
    tx.fee = in.u32();
    tx.nonce = in.u32();
    return tx;
}

Digest256 Transaction::hash() const {
    return hash_bytes(serialize());
}

std::uint64_t LedgerState::balance(const Address& addr) const {
    auto it = records.find(addr);
    return it == records.end() ? 0 : it->second;
}

std::uint64_t LedgerState::total_supply() const {
    std::uint64_t total = 0;
    for (const auto& [addr, bal] : records)
        total += bal;
    return total;
}

void LedgerState::credit(const Address& addr, std::uint64_t amount) {
    if (amount == 0)
        return;
    records[addr] += amount;
}

std::vector<std::uint8_t> LedgerState::serialize() const {
    std::vector<std::uint8_t> out;
    out.reserve(16 + records.size() * StateRecord::kSerializedSize);
    put_u64(out, height_basis);
    put_u64(out, records.size());
    for (const auto& [addr, bal] : records) { // std::map iterates sorted
        put_bytes(out, addr);
        put_u64(out, bal);
    }
    return out;
}

LedgerState LedgerState::deserialize(ByteReader& in) {
    LedgerState state;
    state.height_basis = in.u64();
    std::uint64_t count = in.u64();
    for (std::uint64_t i = 0; i < count; ++i) {
        Address addr{};
        in.take(addr);
        std::uint64_t bal = in.u64();
        if (bal != 0)
            state.records[addr] = bal;
    }
    return state;
}

void PendingNodeEntry::serialize_to(std::vector<std::uint8_t>& out) const {
    put_u32(out, occupation);
    put_bytes(out, identity_key);
    put_bytes(out, pow_nonce);
}

PendingNodeEntry PendingNodeEntry::deserialize(ByteReader& in) {
    PendingNodeEntry entry;
    entry.occupation = in.u32();
    in.take(entry.identity_key);
    in.take(entry.pow_nonce);
    return entry;
}

Digest256 PendingNodeEntry::hash() const {
    std::vector<std::uint8_t> buf;
    buf.reserve(kSerializedSize);
    serialize_to(buf);
    return hash_bytes(buf);
}

void BlockHeader::serialize_to(std::vector<std::uint8_t>& out) const {
    put_u32(out, height);
    put_bytes(out, prev_hash.bytes);
    put_bytes(out, tx_merkle_root.bytes);
    put_bytes(out, pending_merkle_root.bytes);
    put_u32(out, pow_difficulty);
    put_u32(out, pow_nonce);
    put_u32(out, timestamp);
}

std::vector<std::uint8_t> BlockHeader::serialize() const {
    std::vector<std::uint8_t> out;
    out.reserve(kSerializedSize);
    serialize_to(out);
    return out;
}

BlockHeader BlockHeader::deserialize(ByteReader& in) {
    BlockHeader h;
    h.height = in.u32();
    in.take(h.prev_hash.bytes);
    in.take(h.tx_merkle_root.bytes);
    in.take(h.pending_merkle_root.bytes);
    h.pow_difficulty = in.u32();
    h.pow_nonce = in.u32();
    h.timestamp = in.u32();
    return h;
}

Digest256 header_hash(const BlockHeader& header) {
    return hash_bytes(header.serialize());
}

void Block::seal_roots() {
    std::vector<Digest256> tx_leaves;
    tx_leaves.reserve(transactions.size());
    for (const auto& tx : transactions)
        tx_leaves.push_back(tx.hash());
    header.tx_merkle_root = section_root(tx_leaves);

    std::vector<Digest256> pending_leaves;
    pending_leaves.reserve(pending_section.size());
    for (const auto& entry : pending_section)
        pending_leaves.push_back(entry.hash());
    header.pending_merkle_root = section_root(pending_leaves);
}

std::vector<std::uint8_t> Block::serialize() const {
    std::vector<std::uint8_t> out;
    header.serialize_to(out);
    put_bytes(out, creator);
    put_u32(out, static_cast<std::uint32_t>(transactions.size()));
    for (const auto& tx : transactions)
        tx.serialize_to(out);
    put_u32(out, static_cast<std::uint32_t>(pending_section.size()));
    for (const auto& entry : pending_section)
        entry.serialize_to(out);
    put_u32(out, static_cast<std::uint32_t>(storage_attestations.size()));
    for (const auto& att : storage_attestations) {
        put_bytes(out, att.keeper);
        put_u32(out, att.segment_index);
    }
    return out;
}

Block Block::deserialize(ByteReader& in) {
    Block b;
    b.header = BlockHeader::deserialize(in);
    in.take(b.creator);
    std::uint32_t tx_count = in.u32();
    b.transactions.reserve(tx_count);
    for (std::uint32_t i = 0; i < tx_count; ++i)
        b.transactions.push_back(Transaction::deserialize(in));
    std::uint32_t pending_count = in.u32();
    b.pending_section.reserve(pending_count);
    for (std::uint32_t i = 0; i < pending_count; ++i)
        b.pending_section.push_back(PendingNodeEntry::deserialize(in));
    std::uint32_t att_count = in.u32();
    b.storage_attestations.reserve(att_count);
    for (std::uint32_t i = 0; i < att_count; ++i) {
        StorageAttestation att;
        in.take(att.keeper);
        att.segment_index = in.u32();
        b.storage_attestations.push_back(att);
    }
    return b;
}

std::uint64_t RewardSchedule::subsidy(std::uint64_t height) const {
    if (halving_interval == 0)
        return initial_subsidy;
    std::uint64_t halvings = height / halving_interval;
    if (halvings >= 64)
        return 0;
    return initial_subsidy >> halvings;
}

BlockCredits block_credits(const Block& block, const RewardSchedule& rewards) {
    BlockCredits credits;
    for (const Transaction& tx : block.transactions)
        credits.fees += tx.fee;
    credits.subsidy = rewards.subsidy(block.header.height);

    // Storage pool for the keepers attested in this block. System-issued
    // while block subsidies last; funded from this block's fees afterwards.
    if (!block.storage_attestations.empty() && rewards.storage_reward_pool > 0) {
        if (credits.subsidy > 0) {
            credits.pool = rewards.storage_reward_pool;
            credits.pool_issued = true;
        } else {
            credits.pool = std::min(rewards.storage_reward_pool, credits.fees);
        }
    }

    credits.creator_credit =
        credits.subsidy + credits.fees - (credits.pool_issued ? 0 : credits.pool);

    if (credits.pool > 0) {
        std::uint64_t count = block.storage_attestations.size();
        std::uint64_t share = credits.pool / count;
        std::uint64_t remainder = credits.pool % count;
        const StorageAttestation* lowest = &block.storage_attestations.front();
        for (const auto& att : block.storage_attestations)
            if (att.keeper < lowest->keeper)
                lowest = &att;
        for (const auto& att : block.storage_attestations)
            credits.keeper_credits.emplace_back(att.keeper,
                                                share + (&att == lowest ? remainder : 0));
    }
    return credits;
}

void apply_block_to(LedgerState& state, const Block& block, const RewardSchedule& rewards) {
    if (state.height_basis + 1 != block.header.height)
        raise(Errc::height_mismatch,
              "state at " + std::to_string(state.height_basis) + " cannot apply block " +
                  std::to_string(block.header.height));

    state.height_basis = block.header.height;

    for (std::size_t i = 0; i < block.transactions.size(); ++i) {
        const Transaction& tx = block.transactions[i];
        if (tx.amount > std::numeric_limits<std::uint64_t>::max() - tx.fee)
            raise(Errc::invalid_transaction, "amount+fee overflow at index " + std::to_string(i));
        std::uint64_t debit = tx.amount + tx.fee;
        auto it = state.records.find(tx.from);
        std::uint64_t have = it == state.records.end() ? 0 : it->second;
        if (have < debit)
            raise(Errc::invalid_transaction,
                  "overdraw at index " + std::to_string(i) + " in block " +
                      std::to_string(block.header.height));
        if (have == debit)
            state.records.erase(it);
        else
            it->second = have - debit;
        state.credit(tx.to, tx.amount);
    }

    BlockCredits credits = block_credits(block, rewards);
    state.credit(address_of_key(block.creator), credits.creator_credit);
    for (const auto& [keeper, credit] : credits.keeper_credits)
        state.credit(address_of_key(keeper), credit);
}

LedgerState apply_block(const LedgerState& state, const Block& block,
                        const RewardSchedule& rewards) {
    LedgerState next = state;
    apply_block_to(next, block, rewards);
    return next;
}

LedgerState derive_state(const LedgerState& genesis, std::span<const Block> blocks,
                         const RewardSchedule& rewards) {
    LedgerState state = genesis;
    for (const Block& block : blocks)
        apply_block_to(state, block, rewards);
    return state;
}

ChainStore::ChainStore(LedgerState genesis_state, RewardSchedule rewards)
    : genesis_state_(std::move(genesis_state)),
      tip_state_(genesis_state_),
      rewards_(rewards) {
    if (genesis_state_.height_basis != 0)
        raise(Errc::config_error, "genesis state must have height_basis 0");
}

void ChainStore::append(Block block) {
    if (block.header.height != height() + 1)
        raise(Errc::height_mismatch, "expected block " + std::to_string(height() + 1) +
                                         ", got " + std::to_string(block.header.height));
    Digest256 expected_prev = block_hash_at(height());
    if (block.header.prev_hash != expected_prev)
        raise(Errc::parse_error, "prev_hash mismatch at height " +
                                     std::to_string(block.header.height));
    Block sealed = block;
    sealed.seal_roots();
    if (sealed.header.tx_merkle_root != block.header.tx_merkle_root ||
        sealed.header.pending_merkle_root != block.header.pending_merkle_root)
        raise(Errc::parse_error, "section root mismatch at height " +
                                     std::to_string(block.header.height));
    // copy-then-commit so a rejected block cannot half-mutate the tip state
    LedgerState next = apply_block(tip_state_, block, rewards_);
    tip_state_ = std::move(next);
    blocks_.push_back(std::move(block));
}

const Block& ChainStore::at(std::uint64_t h) const {
    if (h < 1 || h > height())
        raise(Errc::height_out_of_range, "no block at height " + std::to_string(h));
    return blocks_[h - 1];
}

const BlockHeader& ChainStore::header_at(std::uint64_t h) const {
    if (h == 0)
        return genesis_header_;
    return at(h).header;
}

Digest256 ChainStore::block_hash_at(std::uint64_t h) const {
    return header_hash(header_at(h));
}

std::uint64_t ChainStore::tx_count_at(std::uint64_t h) const {
    return at(h).transactions.size();
}

void ChainStore::serialize_to(std::ostream& out) const {
    std::vector<std::uint8_t> buf;
    put_bytes(buf, std::span<const std::uint8_t>(
                       reinterpret_cast<const std::uint8_t*>(kChainMagic), sizeof kChainMagic));
    put_u64(buf, rewards_.initial_subsidy);
    put_u64(buf, rewards_.halving_interval);
    put_u64(buf, rewards_.storage_reward_pool);
    auto genesis = genesis_state_.serialize();
    put_u64(buf, genesis.size());
    put_bytes(buf, genesis);
    put_u64(buf, blocks_.size());
    for (const Block& block : blocks_) {
        auto raw = block.serialize();
        put_u64(buf, raw.size());
        put_bytes(buf, raw);
    }
    out.write(reinterpret_cast<const char*>(buf.data()),
              static_cast<std::streamsize>(buf.size()));
    if (!out)
        raise(Errc::io_error, "chain write failed");
}

ChainStore ChainStore::deserialize(std::istream& in) {
    std::vector<std::uint8_t> raw((std::istreambuf_iterator<char>(in)),
                                  std::istreambuf_iterator<char>());
    ByteReader reader(raw);
    char magic[8];
    reader.take(reinterpret_cast<std::uint8_t*>(magic), sizeof magic);
    if (std::memcmp(magic, kChainMagic, sizeof magic) != 0)
        raise(Errc::parse_error, "not a chain file");
    RewardSchedule rewards;
    rewards.initial_subsidy = reader.u64();
    rewards.halving_interval = reader.u64();
    rewards.storage_reward_pool = reader.u64();
    std::uint64_t genesis_len = reader.u64();
    (void)genesis_len;
    LedgerState genesis = LedgerState::deserialize(reader);
    ChainStore store(std::move(genesis), rewards);
    std::uint64_t count = reader.u64();
    for (std::uint64_t i = 0; i < count; ++i) {
        std::uint64_t len = reader.u64();
        (void)len;
        store.append(Block::deserialize(reader));
    }
    return store;
}

} // namespace segchain
