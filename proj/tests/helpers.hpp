#pragma once

#include <cstdint>
#include <vector>

#include "segchain/chain.hpp"
#include "segchain/rng.hpp"

namespace segtest {

using namespace segchain;

inline Address test_account(std::uint32_t i) {
    Address addr{};
    addr[0] = 0x02;
    addr[1] = static_cast<std::uint8_t>(i);
    addr[2] = static_cast<std::uint8_t>(i >> 8);
    return addr;
}

inline IdentityKey test_identity(std::uint32_t i) {
    std::vector<std::uint8_t> material{'t', 'e', 's', 't', '-', 'i', 'd'};
    put_u32(material, i);
    return hash_bytes(material).bytes;
}

inline LedgerState funded_genesis(std::uint32_t accounts,
                                  std::uint64_t funding = 1'000'000'000) {
    LedgerState genesis;
    for (std::uint32_t i = 0; i < accounts; ++i)
        genesis.records[test_account(i)] = funding;
    return genesis;
}

/// Deterministic chain builder for unit tests: random small transfers
/// between funded accounts, one fixed creator per block.
struct TestChain {
    std::uint32_t accounts;
    ChainStore store;
    RngStream rng;
    std::uint32_t nonce = 0;

    explicit TestChain(std::uint32_t account_count = 8, std::uint64_t seed = 7,
                       RewardSchedule rewards = {50'000'000, 100'000, 0})
        : accounts(account_count),
          store(funded_genesis(account_count), rewards),
          rng(seed, "test-chain") {}

    Block next_block(std::uint32_t txs) {
        Block block;
        block.header.height = static_cast<std::uint32_t>(store.height() + 1);
        block.header.prev_hash = store.block_hash_at(store.height());
        block.header.timestamp = block.header.height;
        block.creator = test_identity(0xffff);
        for (std::uint32_t i = 0; i < txs; ++i) {
            Transaction tx;
            tx.from = test_account(static_cast<std::uint32_t>(rng.next_below(accounts)));
            tx.to = test_account(static_cast<std::uint32_t>(rng.next_below(accounts)));
            tx.amount = 1 + rng.next_below(500);
            tx.fee = static_cast<std::uint32_t>(rng.next_below(3));
            tx.nonce = nonce++;
            block.transactions.push_back(tx);
        }
        block.seal_roots();
        return block;
    }

    void add_block(std::uint32_t txs) { store.append(next_block(txs)); }

    void grow_to(std::uint64_t height, std::uint32_t txs_per_block = 4) {
        while (store.height() < height)
            add_block(txs_per_block);
    }
};

} // namespace segtest
