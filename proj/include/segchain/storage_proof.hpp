#pragma once

#include <cstdint>
#include <set>
#include <span>

#include "segchain/assignment.hpp"
#include "segchain/membership.hpp"
#include "segchain/merkle.hpp"
#include "segchain/segmentation.hpp"

namespace segchain {

/// One audit: the segment-wide transaction ordinal CI_k a keeper must reveal.
struct StorageChallenge {
    std::uint32_t segment_index = 0;
    std::uint64_t challenged_tx_ordinal = 0; // 1-based across the whole segment
    Digest256 block_hash{};                  // BH_h it derives from
    IdentityKey prover{};
    std::uint32_t occupation = 0;
};

/// CI = ((BH `hash` ID `hash` occupation) mod len(k)) + 1, occupation encoded
/// big-endian in 4 bytes, chain left-associative.
std::uint64_t challenge_index(const Digest256& bh, const IdentityKey& id,
                              std::uint32_t occupation, std::uint64_t seg_tx_count);

StorageChallenge make_challenge(const Digest256& bh, const IdentityKey& prover,
                                std::uint32_t occupation, const SegmentCopy& segment);

struct TxLocation {
    std::uint64_t block_height = 0;
    std::uint64_t index_in_block = 0; // 1-based

    bool operator==(const TxLocation&) const = default;
};

/// Walk the segment's blocks in height order to find the ordinal's position.
TxLocation locate_ordinal(const SegmentCopy& segment, std::uint64_t ordinal);

struct ProofOfStorage {
    IdentityKey prover{};
    std::uint32_t occupation = 0;
    std::uint64_t claimed_ordinal = 0;
    std::uint64_t containing_block_height = 0;
    Transaction transaction{};
    MerkleBranch branch;
    PowRecord pow; // P*s difficulty, anchored at height h-s
};

/// Builds the proof from a held copy. The overload taking `held_heights`
/// models partial retention: challenges landing in a block the prover does
/// not hold throw MissingSegment.
ProofOfStorage build_proof(const SegmentCopy& segment, const StorageChallenge& challenge,
                           const PowRecord& pow);
ProofOfStorage build_proof(const SegmentCopy& segment,
                           const std::set<std::uint64_t>& held_heights,
                           const StorageChallenge& challenge, const PowRecord& pow);

enum class ProofFailure : std::uint8_t { none, bad_pow, wrong_ordinal, bad_branch, wrong_prover };
const char* proof_failure_name(ProofFailure failure);

/// Header plus the public per-block transaction count the ordinal walk needs.
struct HeaderInfo {
    BlockHeader header;
    std::uint64_t tx_count = 0;
};

struct VerifyContext {
    std::uint64_t chain_height = 0;    // h: the proving height
    std::uint32_t segments = 1;        // s
    std::uint64_t base_difficulty = 1; // P
};

/// Header-only verification; never touches segment bodies. headers[i]
/// describes height i (index 0 is the genesis header, tx_count 0). Checks:
/// P*s PoW anchored at height h-s, the prover is the assigned keeper of the
/// due segment, the recomputed challenge ordinal matches the claimed
/// location, and the Merkle branch reproduces the committed root.
bool verify_proof(const ProofOfStorage& proof, std::span<const HeaderInfo> headers,
                  const Digest256& bh, const AssignmentTable& assignment,
                  const VerifyContext& ctx, ProofFailure* reason = nullptr);

} // namespace segchain
