#include "segchain/errors.hpp"

namespace segchain {

const char* errc_name(Errc code) {
    switch (code) {
    case Errc::empty_tree: return "EmptyTree";
    case Errc::bad_leaf_index: return "BadLeafIndex";
    case Errc::invalid_transaction: return "InvalidTransaction";
    case Errc::height_mismatch: return "HeightMismatch";
    case Errc::height_out_of_range: return "HeightOutOfRange";
    case Errc::degenerate_layout: return "DegenerateLayout";
    case Errc::missing_blocks: return "MissingBlocks";
    case Errc::insufficient_difficulty: return "InsufficientDifficulty";
    case Errc::duplicate_identity: return "DuplicateIdentity";
    case Errc::stale_prev_block_ref: return "StalePrevBlockRef";
    case Errc::bad_occupation: return "BadOccupation";
    case Errc::ragged_roster: return "RaggedRoster";
    case Errc::empty_segment: return "EmptySegment";
    case Errc::ordinal_out_of_range: return "OrdinalOutOfRange";
    case Errc::missing_segment: return "MissingSegment";
    case Errc::placement_infeasible: return "PlacementInfeasible";
    case Errc::domain_error: return "DomainError";
    case Errc::config_error: return "ConfigError";
    case Errc::parse_error: return "ParseError";
    case Errc::io_error: return "IOError";
    }
    return "UnknownError";
}

Error::Error(Errc code, const std::string& message)
    : std::runtime_error(std::string(errc_name(code)) + ": " + message), code_(code) {}

void raise(Errc code, const std::string& message) {
    throw Error(code, message);
}

} // namespace segchain
