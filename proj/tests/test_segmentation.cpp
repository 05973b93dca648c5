#include <doctest.h>

#include "helpers.hpp"
#include "segchain/errors.hpp"
#include "segchain/segmentation.hpp"

using namespace segchain;
using segtest::TestChain;

TEST_CASE("figure-2 layouts") {
    SUBCASE("h=4 s=2") {
        SegmentLayout layout = SegmentLayout::make(4, 2);
        CHECK(segment_of_height(layout, 1) == 1);
        CHECK(segment_of_height(layout, 2) == 1);
        CHECK(segment_of_height(layout, 3) == 2);
        CHECK(segment_of_height(layout, 4) == 2);
    }
    SUBCASE("h=4 s=3") {
        SegmentLayout layout = SegmentLayout::make(4, 3);
        CHECK(segment_of_height(layout, 1) == 1);
        CHECK(segment_of_height(layout, 2) == 2);
        CHECK(segment_of_height(layout, 3) == 3);
        CHECK(segment_of_height(layout, 4) == 3);
    }
    SUBCASE("s=1 takes everything") {
        SegmentLayout layout = SegmentLayout::make(9, 1);
        for (std::uint64_t h = 1; h <= 9; ++h)
            CHECK(segment_of_height(layout, h) == 1);
    }
}

TEST_CASE("layout errors") {
    CHECK_THROWS_AS(SegmentLayout::make(3, 4), Error); // s > h
    CHECK_THROWS_AS(SegmentLayout::make(3, 0), Error);
    SegmentLayout layout = SegmentLayout::make(6, 2);
    CHECK_THROWS_AS(segment_of_height(layout, 0), Error);
    CHECK_THROWS_AS(segment_of_height(layout, 7), Error);
    CHECK_THROWS_AS(block_range(layout, 0), Error);
    CHECK_THROWS_AS(block_range(layout, 3), Error);
}

TEST_CASE("partition property: ranges tile 1..h exactly once") {
    for (std::uint64_t h = 1; h <= 40; ++h) {
        for (std::uint32_t s = 1; s <= h; ++s) {
            SegmentLayout layout = SegmentLayout::make(h, s);
            std::uint64_t expected_next = 1;
            for (std::uint32_t k = 1; k <= s; ++k) {
                HeightRange range = block_range(layout, k);
                CHECK(range.first == expected_next);
                CHECK(range.last >= range.first);
                std::uint64_t len = range.last - range.first + 1;
                if (k < s)
                    CHECK(len == layout.base_len());
                else
                    CHECK(len == layout.base_len() + layout.remainder());
                for (std::uint64_t height = range.first; height <= range.last; ++height)
                    CHECK(segment_of_height(layout, height) == k);
                expected_next = range.last + 1;
            }
            CHECK(expected_next == h + 1);
        }
    }
}

TEST_CASE("prover segment") {
    CHECK(prover_segment(5, 3) == 3);
    for (std::uint64_t h = 0; h < 20; ++h)
        CHECK(prover_segment(h, 1) == 1);
    std::uint32_t s = 4;
    std::vector<int> seen(s + 1, 0);
    for (std::uint64_t h = 1; h <= 3 * s; ++h)
        seen[prover_segment(h, s)] += 1;
    for (std::uint32_t k = 1; k <= s; ++k)
        CHECK(seen[k] == 3);
}

TEST_CASE("rebuild 2 to 3 segments replays block 1 from state 0") {
    TestChain chain(4, 13);
    chain.grow_to(4, 3);
    auto old_copies = rebuild_segments({}, chain.store, SegmentLayout::make(4, 2));
    REQUIRE(old_copies.size() == 2);
    CHECK(old_copies[1].boundary_state.height_basis == 2); // state 2

    auto new_copies = rebuild_segments(old_copies, chain.store, SegmentLayout::make(4, 3));
    REQUIRE(new_copies.size() == 3);
    // segment 2 now starts at block 2, so its boundary is state 1
    CHECK(new_copies[1].boundary_state.height_basis == 1);
    CHECK(new_copies[1].boundary_state ==
          derive_state(chain.store.genesis_state(), chain.store.blocks().subspan(0, 1),
                       chain.store.rewards()));
    // old copies left intact for the retention iteration
    CHECK(old_copies[1].boundary_state.height_basis == 2);
}

TEST_CASE("identity rebuild returns the input copies") {
    TestChain chain(4, 17);
    chain.grow_to(6, 2);
    SegmentLayout layout = SegmentLayout::make(6, 2);
    auto copies = rebuild_segments({}, chain.store, layout);
    auto again = rebuild_segments(copies, chain.store, layout);
    REQUIRE(again.size() == copies.size());
    for (std::size_t i = 0; i < copies.size(); ++i) {
        CHECK(again[i].blocks.size() == copies[i].blocks.size());
        CHECK(again[i].boundary_state == copies[i].boundary_state);
    }
}

TEST_CASE("full-replay oracle over random growth steps") {
    TestChain chain(6, 29);
    chain.grow_to(64, 2);
    for (std::uint32_t s : {3u, 7u, 11u}) {
        auto old_copies = rebuild_segments({}, chain.store, SegmentLayout::make(64, s));
        std::uint32_t grown = s + 10;
        auto copies = rebuild_segments(old_copies, chain.store, SegmentLayout::make(64, grown));
        REQUIRE(copies.size() == grown);

        // concatenation reproduces the chain
        std::uint64_t next_height = 1;
        for (const SegmentCopy& copy : copies) {
            CHECK(copy.first_height() == next_height);
            for (const Block& block : copy.blocks) {
                CHECK(block.header.height == next_height);
                CHECK(block == chain.store.at(next_height));
                ++next_height;
            }
        }
        CHECK(next_height == 65);

        // every boundary equals a from-genesis replay
        for (const SegmentCopy& copy : copies) {
            LedgerState oracle = derive_state(
                chain.store.genesis_state(),
                chain.store.blocks().subspan(0, copy.boundary_state.height_basis),
                chain.store.rewards());
            CHECK(copy.boundary_state == oracle);
        }

        // boundary consistency between consecutive segments
        for (std::size_t k = 0; k + 1 < copies.size(); ++k) {
            LedgerState derived = derive_state(copies[k].boundary_state, copies[k].blocks,
                                               chain.store.rewards());
            CHECK(derived == copies[k + 1].boundary_state);
        }
    }
}

TEST_CASE("rebuild reports missing blocks") {
    TestChain chain(4, 31);
    chain.grow_to(3, 1);
    CHECK_THROWS_AS(rebuild_segments({}, chain.store, SegmentLayout{10, 2}), Error);
    try {
        rebuild_segments({}, chain.store, SegmentLayout{5, 1});
    } catch (const Error& e) {
        CHECK(e.code() == Errc::missing_blocks);
    }
}
