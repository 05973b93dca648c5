#pragma once

#include <cstdint>
#include <vector>

#include "segchain/digest.hpp"
#include "segchain/membership.hpp"

namespace segchain {

/// Result of one storage-assignment epoch: per occupation, a bijection from
/// that occupation's active nodes onto segments 1..s.
struct AssignmentTable {
    std::uint32_t occupations = 0;
    std::uint32_t segments = 0;
    std::uint64_t epoch = 0; // block height whose hash seeded the ranking
    std::vector<IdentityKey> grid;

    const IdentityKey& at(std::uint32_t occupation, std::uint32_t segment) const;
};

/// Ranked reassignment: within each occupation compute RID = ID `hash` BH,
/// sort ascending as 256-bit integers (ties on the raw ID bytes), and give
/// the j-th ranked node segment j. Rows must all have the same size.
AssignmentTable assign_storage(const std::vector<std::vector<IdentityKey>>& occupation_rows,
                               const Digest256& bh, std::uint64_t epoch = 0);
AssignmentTable assign_storage(const Roster& roster, const Digest256& bh,
                               std::uint64_t epoch = 0);

/// Rewrites the roster grid so each identity sits in its newly assigned cell.
void apply_assignment(Roster& roster, const AssignmentTable& table);

} // namespace segchain
