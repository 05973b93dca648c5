#pragma once

#include <stdexcept>
#include <string>

namespace segchain {

enum class Errc {
    empty_tree,
    bad_leaf_index,
    invalid_transaction,
    height_mismatch,
    height_out_of_range,
    degenerate_layout,
    missing_blocks,
    insufficient_difficulty,
    duplicate_identity,
    stale_prev_block_ref,
    bad_occupation,
    ragged_roster,
    empty_segment,
    ordinal_out_of_range,
    missing_segment,
    placement_infeasible,
    domain_error,
    config_error,
    parse_error,
    io_error,
};

const char* errc_name(Errc code);

class Error : public std::runtime_error {
public:
    Error(Errc code, const std::string& message);
    Errc code() const { return code_; }

private:
    Errc code_;
};

[[noreturn]] void raise(Errc code, const std::string& message);

} // namespace segchain
