#include "segchain/storage_proof.hpp"

#include "segchain/bytes.hpp"
#include "segchain/errors.hpp"

namespace segchain {

std::uint64_t challenge_index(const Digest256& bh, const IdentityKey& id,
                              std::uint32_t occupation, std::uint64_t seg_tx_count) {
    if (seg_tx_count == 0)
        raise(Errc::empty_segment, "challenge over a segment with no transactions");
    Digest256 inner = hash_combine(bh.span(), std::span<const std::uint8_t>(id));
    std::vector<std::uint8_t> occ_be;
    put_u32(occ_be, occupation);
    Digest256 outer = hash_combine(inner.span(), occ_be);
    return digest_mod(outer, seg_tx_count) + 1;
}

StorageChallenge make_challenge(const Digest256& bh, const IdentityKey& prover,
                                std::uint32_t occupation, const SegmentCopy& segment) {
    StorageChallenge challenge;
    challenge.segment_index = segment.segment_index;
    challenge.block_hash = bh;
    challenge.prover = prover;
    challenge.occupation = occupation;
    challenge.challenged_tx_ordinal = challenge_index(bh, prover, occupation, segment.tx_count());
    return challenge;
}

TxLocation locate_ordinal(const SegmentCopy& segment, std::uint64_t ordinal) {
    if (ordinal < 1 || ordinal > segment.tx_count())
        raise(Errc::ordinal_out_of_range, "ordinal " + std::to_string(ordinal) +
                                              " outside 1.." + std::to_string(segment.tx_count()));
    std::uint64_t remaining = ordinal;
    for (const Block& block : segment.blocks) {
        std::uint64_t count = block.transactions.size();
        if (remaining <= count)
            return TxLocation{block.header.height, remaining};
        remaining -= count;
    }
    raise(Errc::ordinal_out_of_range, "ordinal walk overran the segment"); // unreachable
}

ProofOfStorage build_proof(const SegmentCopy& segment, const StorageChallenge& challenge,
                           const PowRecord& pow) {
    std::set<std::uint64_t> held;
    for (const Block& block : segment.blocks)
        held.insert(block.header.height);
    return build_proof(segment, held, challenge, pow);
}

ProofOfStorage build_proof(const SegmentCopy& segment,
                           const std::set<std::uint64_t>& held_heights,
                           const StorageChallenge& challenge, const PowRecord& pow) {
    TxLocation loc = locate_ordinal(segment, challenge.challenged_tx_ordinal);
    if (!held_heights.contains(loc.block_height))
        raise(Errc::missing_segment, "prover does not hold block " +
                                         std::to_string(loc.block_height));

    const Block* containing = nullptr;
    for (const Block& block : segment.blocks)
        if (block.header.height == loc.block_height)
            containing = &block;
    if (!containing)
        raise(Errc::missing_segment, "segment copy lacks block " +
                                         std::to_string(loc.block_height));

    std::vector<Digest256> leaves;
    leaves.reserve(containing->transactions.size());
    for (const Transaction& tx : containing->transactions)
        leaves.push_back(tx.hash());
    MerkleTree tree(std::move(leaves));

    ProofOfStorage proof;
    proof.prover = challenge.prover;
    proof.occupation = challenge.occupation;
    proof.claimed_ordinal = challenge.challenged_tx_ordinal;
    proof.containing_block_height = loc.block_height;
    proof.transaction = containing->transactions[loc.index_in_block - 1];
    proof.branch = tree.branch(loc.index_in_block);
    proof.pow = pow;
    return proof;
}

const char* proof_failure_name(ProofFailure failure) {
    switch (failure) {
    case ProofFailure::none: return "None";
    case ProofFailure::bad_pow: return "BadPow";
    case ProofFailure::wrong_ordinal: return "WrongOrdinal";
    case ProofFailure::bad_branch: return "BadBranch";
    case ProofFailure::wrong_prover: return "WrongProver";
    }
    return "Unknown";
}

namespace {

bool fail(ProofFailure why, ProofFailure* reason) {
    if (reason)
        *reason = why;
    return false;
}

} // namespace

bool verify_proof(const ProofOfStorage& proof, std::span<const HeaderInfo> headers,
                  const Digest256& bh, const AssignmentTable& assignment,
                  const VerifyContext& ctx, ProofFailure* reason) {
    if (reason)
        *reason = ProofFailure::none;
    const std::uint64_t h = ctx.chain_height;
    const std::uint32_t s = ctx.segments;
    if (s == 0 || headers.size() != h + 1)
        return fail(ProofFailure::bad_pow, reason);

    // (a) window PoW: P*s difficulty, anchored at height h-s, issued by the prover
    std::uint64_t anchor_height = h > s ? h - s : 0;
    if (proof.pow.claimed_difficulty < ctx.base_difficulty * s)
        return fail(ProofFailure::bad_pow, reason);
    if (proof.pow.identity_key != proof.prover)
        return fail(ProofFailure::bad_pow, reason);
    if (proof.pow.prev_block_ref != header_hash(headers[anchor_height].header))
        return fail(ProofFailure::bad_pow, reason);

    // (b) the prover must be the assigned keeper of the due segment
    std::uint32_t due_segment = prover_segment(h, s);
    if (proof.occupation < 1 || proof.occupation > assignment.occupations)
        return fail(ProofFailure::wrong_prover, reason);
    if (assignment.segments != s || assignment.at(proof.occupation, due_segment) != proof.prover)
        return fail(ProofFailure::wrong_prover, reason);

    // (c) recompute the challenge ordinal from the public per-block tx counts
    SegmentLayout layout;
    try {
        layout = SegmentLayout::make(h, s);
    } catch (const Error&) {
        return fail(ProofFailure::wrong_ordinal, reason);
    }
    HeightRange range = block_range(layout, due_segment);
    std::uint64_t seg_tx_count = 0;
    for (std::uint64_t height = range.first; height <= range.last; ++height)
        seg_tx_count += headers[height].tx_count;
    if (seg_tx_count == 0)
        return fail(ProofFailure::wrong_ordinal, reason);
    std::uint64_t expected = challenge_index(bh, proof.prover, proof.occupation, seg_tx_count);
    if (proof.claimed_ordinal != expected)
        return fail(ProofFailure::wrong_ordinal, reason);

    std::uint64_t remaining = expected;
    std::uint64_t containing = 0;
    for (std::uint64_t height = range.first; height <= range.last; ++height) {
        if (remaining <= headers[height].tx_count) {
            containing = height;
            break;
        }
        remaining -= headers[height].tx_count;
    }
    if (containing == 0 || proof.containing_block_height != containing ||
        proof.branch.leaf_index != remaining)
        return fail(ProofFailure::wrong_ordinal, reason);

    // (d) the branch must reproduce the committed transaction root
    const Digest256& root = headers[containing].header.tx_merkle_root;
    if (!verify_branch(proof.transaction.hash(), proof.branch, root))
        return fail(ProofFailure::bad_branch, reason);

    return true;
}

} // namespace segchain
