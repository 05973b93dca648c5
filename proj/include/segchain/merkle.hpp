#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "segchain/digest.hpp"

namespace segchain {

/// Which side of the running hash a branch sibling sits on.
enum class BranchSide : std::uint8_t { left, right };

struct MerkleBranch {
    std::uint64_t leaf_index = 0; // 1-based position of the proven leaf
    std::vector<std::pair<Digest256, BranchSide>> siblings;
};

/// Transaction Merkle tree, Bitcoin convention: each level pairs adjacent
/// nodes, duplicating the last node when the level has odd count;
/// parent = hash_combine(left, right). A single-leaf tree is its own root.
class MerkleTree {
public:
    explicit MerkleTree(std::vector<Digest256> leaves); // throws EmptyTree

    const Digest256& root() const { return levels_.back().front(); }
    std::size_t leaf_count() const { return levels_.front().size(); }
    std::size_t depth() const { return levels_.size() - 1; }
    const std::vector<std::vector<Digest256>>& levels() const { return levels_; }

    MerkleBranch branch(std::uint64_t leaf_index) const; // throws BadLeafIndex

private:
    std::vector<std::vector<Digest256>> levels_; // levels_[0] == leaves
};

Digest256 merkle_root(const std::vector<Digest256>& leaves);
MerkleBranch merkle_branch(const MerkleTree& tree, std::uint64_t leaf_index);

/// Fold `leaf` through the branch siblings; true iff the result equals `root`.
/// Malformed branches simply fail to verify.
bool verify_branch(const Digest256& leaf, const MerkleBranch& branch, const Digest256& root);

} // namespace segchain
