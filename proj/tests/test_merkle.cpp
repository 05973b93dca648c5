#include <doctest.h>

#include <cmath>

#include "segchain/errors.hpp"
#include "segchain/merkle.hpp"
#include "segchain/rng.hpp"

using namespace segchain;

namespace {

std::vector<Digest256> numbered_leaves(std::size_t count) {
    std::vector<Digest256> leaves;
    for (std::size_t i = 1; i <= count; ++i) {
        std::uint8_t byte = static_cast<std::uint8_t>(i);
        leaves.push_back(hash_bytes(std::span<const std::uint8_t>(&byte, 1)));
    }
    return leaves;
}

} // namespace

TEST_CASE("single leaf tree is its own root") {
    auto leaves = numbered_leaves(1);
    MerkleTree tree(leaves);
    CHECK(tree.root() == leaves[0]);
    CHECK(tree.depth() == 0);
    CHECK(tree.branch(1).siblings.empty());
    CHECK(verify_branch(leaves[0], tree.branch(1), tree.root()));
}

TEST_CASE("empty leaf list is rejected") {
    CHECK_THROWS_AS(MerkleTree(std::vector<Digest256>{}), Error);
    try {
        merkle_root({});
    } catch (const Error& e) {
        CHECK(e.code() == Errc::empty_tree);
    }
}

TEST_CASE("3-leaf tree duplicates the last leaf") {
    auto three = numbered_leaves(3);
    auto four = three;
    four.push_back(three[2]); // independent 4-leaf tree with leaf4 == leaf3
    CHECK(merkle_root(three) == merkle_root(four));
}

TEST_CASE("4-leaf branch for the third leaf matches the red-node shape") {
    auto leaves = numbered_leaves(4);
    MerkleTree tree(leaves);
    MerkleBranch branch = tree.branch(3);
    REQUIRE(branch.siblings.size() == 2);
    // sibling leaf 4 on the right, then the hash of leaves 1,2 on the left
    CHECK(branch.siblings[0].first == leaves[3]);
    CHECK(branch.siblings[0].second == BranchSide::right);
    CHECK(branch.siblings[1].first == hash_combine(leaves[0], leaves[1]));
    CHECK(branch.siblings[1].second == BranchSide::left);
    CHECK(verify_branch(leaves[2], branch, tree.root()));
}

TEST_CASE("every branch of an 8-leaf tree verifies") {
    auto leaves = numbered_leaves(8);
    MerkleTree tree(leaves);
    for (std::uint64_t i = 1; i <= 8; ++i)
        CHECK(verify_branch(leaves[i - 1], tree.branch(i), tree.root()));
    CHECK_THROWS_AS(tree.branch(0), Error);
    CHECK_THROWS_AS(tree.branch(9), Error);
}

TEST_CASE("round trip over random trees up to 64 leaves") {
    RngStream rng(5, "merkle-roundtrip");
    for (std::size_t count = 1; count <= 64; ++count) {
        std::vector<Digest256> leaves(count);
        for (auto& leaf : leaves)
            for (auto& byte : leaf.bytes)
                byte = static_cast<std::uint8_t>(rng.next_below(256));
        MerkleTree tree(leaves);
        if (count > 1)
            CHECK(tree.depth() == static_cast<std::size_t>(std::ceil(std::log2(count))));
        for (std::uint64_t i = 1; i <= count; ++i)
            CHECK(verify_branch(leaves[i - 1], tree.branch(i), tree.root()));
    }
}

TEST_CASE("single-bit mutations break verification") {
    auto leaves = numbered_leaves(6);
    MerkleTree tree(leaves);
    MerkleBranch branch = tree.branch(4);
    const Digest256 root = tree.root();
    const Digest256 leaf = leaves[3];

    CHECK(verify_branch(leaf, branch, root));

    Digest256 bad_leaf = leaf;
    bad_leaf.bytes[0] ^= 0x01;
    CHECK(!verify_branch(bad_leaf, branch, root));

    Digest256 bad_root = root;
    bad_root.bytes[31] ^= 0x80;
    CHECK(!verify_branch(leaf, branch, bad_root));

    MerkleBranch bad_sibling = branch;
    bad_sibling.siblings[1].first.bytes[7] ^= 0x10;
    CHECK(!verify_branch(leaf, bad_sibling, root));

    MerkleBranch flipped_side = branch;
    flipped_side.siblings[0].second = flipped_side.siblings[0].second == BranchSide::left
                                          ? BranchSide::right
                                          : BranchSide::left;
    CHECK(!verify_branch(leaf, flipped_side, root));

    // a branch against a different tree's root
    auto other = numbered_leaves(7);
    CHECK(!verify_branch(leaf, branch, merkle_root(other)));
}

TEST_CASE("root is permutation sensitive") {
    auto leaves = numbered_leaves(5);
    auto swapped = leaves;
    std::swap(swapped[1], swapped[3]);
    CHECK(merkle_root(leaves) != merkle_root(swapped));
}
