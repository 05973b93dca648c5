#include "segchain/assignment.hpp"

#include <algorithm>
#include <map>

#include "segchain/errors.hpp"

namespace segchain {

const IdentityKey& AssignmentTable::at(std::uint32_t occupation, std::uint32_t segment) const {
    if (occupation < 1 || occupation > occupations || segment < 1 || segment > segments)
        raise(Errc::bad_occupation, "assignment cell out of range");
    return grid[std::size_t(occupation - 1) * segments + (segment - 1)];
}

AssignmentTable assign_storage(const std::vector<std::vector<IdentityKey>>& occupation_rows,
                               const Digest256& bh, std::uint64_t epoch) {
    if (occupation_rows.empty())
        raise(Errc::ragged_roster, "no occupations");
    std::size_t segments = occupation_rows.front().size();
    if (segments == 0)
        raise(Errc::ragged_roster, "occupation rows are empty");
    for (const auto& row : occupation_rows)
        if (row.size() != segments)
            raise(Errc::ragged_roster, "occupation sizes differ");

    AssignmentTable table;
    table.occupations = static_cast<std::uint32_t>(occupation_rows.size());
    table.segments = static_cast<std::uint32_t>(segments);
    table.epoch = epoch;
    table.grid.reserve(occupation_rows.size() * segments);

    std::vector<std::pair<Digest256, IdentityKey>> ranked;
    for (const auto& row : occupation_rows) {
        ranked.clear();
        ranked.reserve(row.size());
        for (const IdentityKey& id : row)
            ranked.emplace_back(hash_combine(std::span<const std::uint8_t>(id), bh.span()), id);
        std::sort(ranked.begin(), ranked.end());
        for (const auto& [rid, id] : ranked)
            table.grid.push_back(id);
    }
    return table;
}

AssignmentTable assign_storage(const Roster& roster, const Digest256& bh, std::uint64_t epoch) {
    auto rows = roster.occupation_rows();
    for (const auto& row : rows)
        if (row.size() != roster.segments())
            raise(Errc::ragged_roster, "roster grid has empty cells");
    return assign_storage(rows, bh, epoch);
}

void apply_assignment(Roster& roster, const AssignmentTable& table) {
    if (table.occupations != roster.occupations() || table.segments != roster.segments())
        raise(Errc::ragged_roster, "assignment shape does not match roster");
    std::map<IdentityKey, NodeRecord> records;
    for (const NodeRecord* node : roster.all())
        records[node->identity_key] = *node;
    for (std::uint32_t occ = 1; occ <= table.occupations; ++occ) {
        for (std::uint32_t seg = 1; seg <= table.segments; ++seg) {
            auto it = records.find(table.at(occ, seg));
            if (it == records.end())
                raise(Errc::ragged_roster, "assigned identity missing from roster");
            roster.place(it->second, seg);
        }
    }
}

} // namespace segchain
