#include <doctest.h>

#include <algorithm>
#include <set>

#include "helpers.hpp"
#include "segchain/assignment.hpp"
#include "segchain/errors.hpp"
#include "segchain/rng.hpp"

using namespace segchain;
using segtest::test_identity;

TEST_CASE("s=1 assigns everyone to segment 1 regardless of the block hash") {
    std::vector<std::vector<IdentityKey>> rows = {{test_identity(1)}, {test_identity(2)}};
    for (const char* tag : {"a", "b", "c"}) {
        AssignmentTable table = assign_storage(rows, hash_bytes(tag));
        CHECK(table.at(1, 1) == test_identity(1));
        CHECK(table.at(2, 1) == test_identity(2));
    }
}

TEST_CASE("golden three-node permutation") {
    // ids and block hash fixed; expected order computed independently from
    // the frozen combinator vectors: rid(b) < rid(a) < rid(c)
    IdentityKey a = hash_bytes("node-a").bytes;
    IdentityKey b = hash_bytes("node-b").bytes;
    IdentityKey c = hash_bytes("node-c").bytes;
    Digest256 bh = hash_bytes("assignment golden bh");
    AssignmentTable table = assign_storage({{a, b, c}}, bh);
    CHECK(table.at(1, 1) == b);
    CHECK(table.at(1, 2) == a);
    CHECK(table.at(1, 3) == c);
}

TEST_CASE("assignment is deterministic and per-row bijective") {
    RngStream rng(77, "assign-prop");
    for (int round = 0; round < 20; ++round) {
        std::uint32_t m = 1 + static_cast<std::uint32_t>(rng.next_below(4));
        std::uint32_t s = 1 + static_cast<std::uint32_t>(rng.next_below(6));
        std::vector<std::vector<IdentityKey>> rows(m);
        std::uint32_t id = 0;
        for (auto& row : rows)
            for (std::uint32_t j = 0; j < s; ++j)
                row.push_back(test_identity(1000 * round + id++));
        Digest256 bh;
        for (auto& byte : bh.bytes)
            byte = static_cast<std::uint8_t>(rng.next_below(256));

        AssignmentTable table = assign_storage(rows, bh);
        AssignmentTable again = assign_storage(rows, bh);
        CHECK(table.grid == again.grid);
        for (std::uint32_t occ = 1; occ <= m; ++occ) {
            std::set<IdentityKey> seen;
            for (std::uint32_t seg = 1; seg <= s; ++seg)
                seen.insert(table.at(occ, seg));
            CHECK(seen.size() == s);
            CHECK(seen == std::set<IdentityKey>(rows[occ - 1].begin(), rows[occ - 1].end()));
        }
    }
}

TEST_CASE("different block hashes give mostly distinct permutations") {
    std::vector<std::vector<IdentityKey>> rows(2);
    std::uint32_t id = 0;
    for (auto& row : rows)
        for (int j = 0; j < 8; ++j)
            row.push_back(test_identity(500 + id++));
    RngStream rng(123, "assign-batch");
    std::set<std::vector<IdentityKey>> outcomes;
    for (int i = 0; i < 100; ++i) {
        Digest256 bh;
        for (auto& byte : bh.bytes)
            byte = static_cast<std::uint8_t>(rng.next_below(256));
        outcomes.insert(assign_storage(rows, bh).grid);
    }
    CHECK(outcomes.size() >= 99);
}

TEST_CASE("segment of a fixed node is uniform: chi-square at 0.001") {
    const std::uint32_t s = 8;
    std::vector<std::vector<IdentityKey>> rows(1);
    for (std::uint32_t j = 0; j < s; ++j)
        rows[0].push_back(test_identity(900 + j));
    const IdentityKey watched = rows[0][0];

    const int trials = 10'000;
    RngStream rng(2024, "assign-chi2");
    std::vector<int> counts(s + 1, 0);
    for (int t = 0; t < trials; ++t) {
        Digest256 bh;
        for (auto& byte : bh.bytes)
            byte = static_cast<std::uint8_t>(rng.next_below(256));
        AssignmentTable table = assign_storage(rows, bh);
        for (std::uint32_t seg = 1; seg <= s; ++seg)
            if (table.at(1, seg) == watched)
                counts[seg] += 1;
    }
    double expected = double(trials) / s;
    double chi2 = 0;
    for (std::uint32_t seg = 1; seg <= s; ++seg) {
        double d = counts[seg] - expected;
        chi2 += d * d / expected;
    }
    // 0.999 quantile of chi-square with 7 degrees of freedom
    CHECK(chi2 < 24.322);
}

TEST_CASE("ragged rosters are rejected") {
    std::vector<std::vector<IdentityKey>> rows = {{test_identity(1), test_identity(2)},
                                                  {test_identity(3)}};
    try {
        assign_storage(rows, hash_bytes("bh"));
        CHECK(false);
    } catch (const Error& e) {
        CHECK(e.code() == Errc::ragged_roster);
    }
}

TEST_CASE("apply_assignment rewrites the roster grid") {
    Roster roster(2, 3);
    std::uint32_t id = 0;
    for (std::uint32_t occ = 1; occ <= 2; ++occ)
        for (std::uint32_t seg = 1; seg <= 3; ++seg) {
            NodeRecord node;
            node.identity_key = test_identity(id++);
            node.occupation = occ;
            roster.place(node, seg);
        }
    AssignmentTable table = assign_storage(roster, hash_bytes("epoch"), 42);
    apply_assignment(roster, table);
    for (std::uint32_t occ = 1; occ <= 2; ++occ)
        for (std::uint32_t seg = 1; seg <= 3; ++seg) {
            CHECK(roster.at(occ, seg).identity_key == table.at(occ, seg));
            CHECK(*roster.at(occ, seg).assigned_segment == seg);
        }
}
