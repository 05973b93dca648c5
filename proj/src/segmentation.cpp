#include "segchain/segmentation.hpp"

#include <algorithm>
#include <map>

#include "segchain/errors.hpp"

namespace segchain {

SegmentLayout SegmentLayout::make(std::uint64_t h, std::uint32_t s) {
    if (s == 0)
        raise(Errc::degenerate_layout, "segment count must be positive");
    if (s > h)
        raise(Errc::degenerate_layout, "s=" + std::to_string(s) + " exceeds chain height " +
                                           std::to_string(h));
    return SegmentLayout{h, s};
}

std::uint32_t segment_of_height(const SegmentLayout& layout, std::uint64_t height) {
    if (layout.s == 0 || layout.base_len() == 0)
        raise(Errc::degenerate_layout, "layout has empty segments");
    if (height < 1 || height > layout.h)
        raise(Errc::height_out_of_range, "height " + std::to_string(height) +
                                             " outside 1.." + std::to_string(layout.h));
    std::uint64_t base = layout.base_len();
    // anything past the first s-1 equal runs belongs to the last segment
    std::uint64_t last_first = (std::uint64_t(layout.s) - 1) * base + 1;
    if (height >= last_first)
        return layout.s;
    return static_cast<std::uint32_t>((height - 1) / base + 1);
}

HeightRange block_range(const SegmentLayout& layout, std::uint32_t segment_index) {
    if (segment_index < 1 || segment_index > layout.s)
        raise(Errc::height_out_of_range, "segment " + std::to_string(segment_index) +
                                             " outside 1.." + std::to_string(layout.s));
    std::uint64_t base = layout.base_len();
    HeightRange range;
    range.first = (std::uint64_t(segment_index) - 1) * base + 1;
    range.last = (segment_index == layout.s) ? layout.h : segment_index * base;
    return range;
}

std::uint32_t prover_segment(std::uint64_t h, std::uint32_t s) {
    if (s == 0)
        raise(Errc::degenerate_layout, "segment count must be positive");
    return static_cast<std::uint32_t>(h % s) + 1;
}

std::uint64_t SegmentCopy::tx_count() const {
    std::uint64_t total = 0;
    for (const Block& block : blocks)
        total += block.transactions.size();
    return total;
}

std::vector<SegmentCopy> rebuild_segments(const std::vector<SegmentCopy>& old_copies,
                                          const ChainStore& chain,
                                          const SegmentLayout& new_layout) {
    if (new_layout.h > chain.height()) {
        std::string missing;
        for (std::uint64_t h = chain.height() + 1; h <= new_layout.h; ++h)
            missing += (missing.empty() ? "" : ",") + std::to_string(h);
        raise(Errc::missing_blocks, "chain store lacks heights " + missing);
    }

    // Short-circuit: same layout means the copies are already correct.
    if (!old_copies.empty() && old_copies.front().layout_version ==
                                   LayoutVersion{new_layout.h, new_layout.s} &&
        old_copies.size() == new_layout.s)
        return old_copies;

    // States available without replaying from scratch: genesis plus every old
    // copy's boundary (a node may fetch predecessor segments; the chain store
    // plays the network's role for the block bodies).
    std::map<std::uint64_t, const LedgerState*> known_states;
    known_states[0] = &chain.genesis_state();
    for (const SegmentCopy& copy : old_copies)
        known_states[copy.boundary_state.height_basis] = &copy.boundary_state;

    std::vector<SegmentCopy> rebuilt;
    rebuilt.reserve(new_layout.s);
    LedgerState rolling = chain.genesis_state();

    for (std::uint32_t seg = 1; seg <= new_layout.s; ++seg) {
        HeightRange range = block_range(new_layout, seg);
        std::uint64_t boundary_height = range.first - 1;

        // jump to the nearest available state at or below the boundary when
        // it is closer than what we carry forward
        auto it = known_states.upper_bound(boundary_height);
        --it; // known_states always holds height 0
        if (rolling.height_basis > boundary_height || it->first > rolling.height_basis)
            rolling = *it->second;
        while (rolling.height_basis < boundary_height)
            apply_block_to(rolling, chain.at(rolling.height_basis + 1), chain.rewards());

        SegmentCopy copy;
        copy.segment_index = seg;
        copy.boundary_state = rolling;
        copy.layout_version = LayoutVersion{new_layout.h, new_layout.s};
        copy.blocks.reserve(range.last - range.first + 1);
        for (std::uint64_t h = range.first; h <= range.last; ++h)
            copy.blocks.push_back(chain.at(h));

        // roll forward so the next segment's boundary continues from here
        for (const Block& block : copy.blocks)
            apply_block_to(rolling, block, chain.rewards());

        rebuilt.push_back(std::move(copy));
    }
    return rebuilt;
}

} // namespace segchain
