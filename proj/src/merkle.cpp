#include "segchain/merkle.hpp"

#include "segchain/errors.hpp"

namespace segchain {

MerkleTree::MerkleTree(std::vector<Digest256> leaves) {
    if (leaves.empty())
        raise(Errc::empty_tree, "merkle tree needs at least one leaf");
    levels_.push_back(std::move(leaves));
    while (levels_.back().size() > 1) {
        const auto& level = levels_.back();
        std::vector<Digest256> next;
        next.reserve((level.size() + 1) / 2);
        for (std::size_t i = 0; i < level.size(); i += 2) {
            const Digest256& left = level[i];
            const Digest256& right = (i + 1 < level.size()) ? level[i + 1] : level[i];
            next.push_back(hash_combine(left, right));
        }
        levels_.push_back(std::move(next));
    }
}

MerkleBranch MerkleTree::branch(std::uint64_t leaf_index) const {
    if (leaf_index < 1 || leaf_index > leaf_count())
        raise(Errc::bad_leaf_index, "leaf index " + std::to_string(leaf_index) +
                                        " outside 1.." + std::to_string(leaf_count()));
    MerkleBranch out;
    out.leaf_index = leaf_index;
    std::size_t pos = leaf_index - 1;
    for (std::size_t depth = 0; depth + 1 < levels_.size(); ++depth) {
        const auto& level = levels_[depth];
        std::size_t sibling = pos ^ 1;
        if (sibling >= level.size())
            sibling = pos; // odd level: last node pairs with itself
        BranchSide side = (sibling >= pos) ? BranchSide::right : BranchSide::left;
        out.siblings.emplace_back(level[sibling], side);
        pos /= 2;
    }
    return out;
}

Digest256 merkle_root(const std::vector<Digest256>& leaves) {
    return MerkleTree(leaves).root();
}

MerkleBranch merkle_branch(const MerkleTree& tree, std::uint64_t leaf_index) {
    return tree.branch(leaf_index);
}

bool verify_branch(const Digest256& leaf, const MerkleBranch& branch, const Digest256& root) {
    Digest256 acc = leaf;
    for (const auto& [sibling, side] : branch.siblings)
        acc = (side == BranchSide::right) ? hash_combine(acc, sibling)
                                          : hash_combine(sibling, acc);
    return acc == root;
}

} // namespace segchain
