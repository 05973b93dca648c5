#pragma once

#include <cstdint>
#include <vector>

#include "segchain/chain.hpp"

namespace segchain {

/// Partition of heights 1..h into s contiguous segments: segments 1..s-1 hold
/// h/s blocks each, segment s additionally holds the h mod s remainder.
struct SegmentLayout {
    std::uint64_t h = 0;
    std::uint32_t s = 1;

    std::uint64_t base_len() const { return h / s; }
    std::uint64_t remainder() const { return h % s; }

    bool operator==(const SegmentLayout&) const = default;

    /// Throws DegenerateLayout when s == 0 or s > h (a segment would be empty).
    static SegmentLayout make(std::uint64_t h, std::uint32_t s);
};

struct HeightRange {
    std::uint64_t first = 0;
    std::uint64_t last = 0; // inclusive

    bool operator==(const HeightRange&) const = default;
};

std::uint32_t segment_of_height(const SegmentLayout& layout, std::uint64_t height);
HeightRange block_range(const SegmentLayout& layout, std::uint32_t segment_index);

/// Segment whose keepers owe a Proof of Storage at height h: (h mod s) + 1.
std::uint32_t prover_segment(std::uint64_t h, std::uint32_t s);

/// (h-at-change, s) pair versioning segment copies across layout changes.
struct LayoutVersion {
    std::uint64_t h = 0;
    std::uint32_t s = 0;

    auto operator<=>(const LayoutVersion&) const = default;
};

/// One stored segment: its block run plus the boundary state reached after
/// the previous segment's last block, so the copy is independently replayable.
struct SegmentCopy {
    std::uint32_t segment_index = 0;
    std::vector<Block> blocks;
    LedgerState boundary_state;
    LayoutVersion layout_version;

    std::uint64_t first_height() const { return boundary_state.height_basis + 1; }
    std::uint64_t tx_count() const;
};

/// Recut the chain for a new layout. Boundary states are recomputed by
/// replaying from the nearest earlier available state (genesis or an old
/// copy's boundary). Old copies are left untouched; callers keep them for one
/// further block iteration per the storage-adjustment-delay rule.
std::vector<SegmentCopy> rebuild_segments(const std::vector<SegmentCopy>& old_copies,
                                          const ChainStore& chain,
                                          const SegmentLayout& new_layout);

} // namespace segchain
