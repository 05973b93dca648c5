#pragma once

#include <string>
#include <vector>

#include "segchain/storage_proof.hpp"

namespace segchain {

/// JSON export of a Proof of Storage, hex-encoded fields in fixed order
/// (prover, occupation, ordinal, block height, transaction, branch, pow).
std::string proof_to_json(const ProofOfStorage& proof);
ProofOfStorage proof_from_json(const std::string& text); // throws ParseError

/// Everything a verifier needs besides the proof: the header chain with
/// public tx counts, the challenge block hash, the keeper assignment and the
/// verification context.
struct VerifyBundle {
    std::vector<HeaderInfo> headers; // index == height, 0 is genesis
    Digest256 block_hash{};          // BH_h
    AssignmentTable assignment;
    VerifyContext context;
};

std::string verify_bundle_to_json(const VerifyBundle& bundle);
VerifyBundle verify_bundle_from_json(const std::string& text); // throws ParseError

} // namespace segchain
