#include "segchain/proof_io.hpp"

#include <json.hpp>

#include "segchain/errors.hpp"

namespace segchain {

using ordered_json = nlohmann::ordered_json;

namespace {

template <std::size_t N>
std::array<std::uint8_t, N> fixed_bytes(const ordered_json& j, const char* field) {
    if (!j.is_string())
        raise(Errc::parse_error, std::string(field) + " must be a hex string");
    auto raw = bytes_from_hex(j.get<std::string>());
    if (!raw || raw->size() != N)
        raise(Errc::parse_error, std::string(field) + " must be " + std::to_string(N) +
                                     " hex-encoded bytes");
    std::array<std::uint8_t, N> out{};
    std::copy(raw->begin(), raw->end(), out.begin());
    return out;
}

Digest256 digest_field(const ordered_json& j, const char* field) {
    Digest256 d;
    d.bytes = fixed_bytes<32>(j, field);
    return d;
}

ordered_json branch_to_json(const MerkleBranch& branch) {
    ordered_json siblings = ordered_json::array();
    for (const auto& [hash, side] : branch.siblings)
        siblings.push_back({{"hash", hash.hex()},
                            {"side", side == BranchSide::left ? "left" : "right"}});
    return ordered_json{{"leaf_index", branch.leaf_index}, {"siblings", siblings}};
}

MerkleBranch branch_from_json(const ordered_json& j) {
    MerkleBranch branch;
    branch.leaf_index = j.at("leaf_index").get<std::uint64_t>();
    for (const auto& entry : j.at("siblings")) {
        std::string side = entry.at("side").get<std::string>();
        if (side != "left" && side != "right")
            raise(Errc::parse_error, "branch side must be left or right");
        branch.siblings.emplace_back(digest_field(entry.at("hash"), "sibling hash"),
                                     side == "left" ? BranchSide::left : BranchSide::right);
    }
    return branch;
}

} // namespace

std::string proof_to_json(const ProofOfStorage& proof) {
    ordered_json pow{{"prev_block_ref", proof.pow.prev_block_ref.hex()},
                     {"identity_key", to_hex(proof.pow.identity_key)},
                     {"claimed_difficulty", proof.pow.claimed_difficulty},
                     {"nonce", to_hex(proof.pow.nonce)}};
    if (proof.pow.occupation)
        pow["occupation"] = *proof.pow.occupation;

    ordered_json j{{"prover", to_hex(proof.prover)},
                   {"occupation", proof.occupation},
                   {"claimed_ordinal", proof.claimed_ordinal},
                   {"containing_block_height", proof.containing_block_height},
                   {"transaction", to_hex(proof.transaction.serialize())},
                   {"branch", branch_to_json(proof.branch)},
                   {"pow", pow}};
    return j.dump(2) + "\n";
}

ProofOfStorage proof_from_json(const std::string& text) {
    ordered_json j;
    try {
        j = ordered_json::parse(text);
    } catch (const std::exception& e) {
        raise(Errc::parse_error, std::string("proof JSON: ") + e.what());
    }
    try {
        ProofOfStorage proof;
        proof.prover = fixed_bytes<32>(j.at("prover"), "prover");
        proof.occupation = j.at("occupation").get<std::uint32_t>();
        proof.claimed_ordinal = j.at("claimed_ordinal").get<std::uint64_t>();
        proof.containing_block_height = j.at("containing_block_height").get<std::uint64_t>();
        auto raw_tx = bytes_from_hex(j.at("transaction").get<std::string>());
        if (!raw_tx || raw_tx->size() != Transaction::kSerializedSize)
            raise(Errc::parse_error, "transaction must be 82 hex-encoded bytes");
        ByteReader reader(*raw_tx);
        proof.transaction = Transaction::deserialize(reader);
        proof.branch = branch_from_json(j.at("branch"));
        const auto& pow = j.at("pow");
        proof.pow.prev_block_ref = digest_field(pow.at("prev_block_ref"), "prev_block_ref");
        proof.pow.identity_key = fixed_bytes<32>(pow.at("identity_key"), "identity_key");
        proof.pow.claimed_difficulty = pow.at("claimed_difficulty").get<std::uint64_t>();
        proof.pow.nonce = fixed_bytes<32>(pow.at("nonce"), "nonce");
        if (pow.contains("occupation"))
            proof.pow.occupation = pow.at("occupation").get<std::uint32_t>();
        return proof;
    } catch (const Error&) {
        throw;
    } catch (const std::exception& e) {
        raise(Errc::parse_error, std::string("proof JSON: ") + e.what());
    }
}

std::string verify_bundle_to_json(const VerifyBundle& bundle) {
    ordered_json headers = ordered_json::array();
    for (const HeaderInfo& info : bundle.headers)
        headers.push_back({{"header", to_hex(info.header.serialize())},
                           {"tx_count", info.tx_count}});
    ordered_json grid = ordered_json::array();
    for (const IdentityKey& key : bundle.assignment.grid)
        grid.push_back(to_hex(key));
    ordered_json j{{"chain_height", bundle.context.chain_height},
                   {"segments", bundle.context.segments},
                   {"base_difficulty", bundle.context.base_difficulty},
                   {"block_hash", bundle.block_hash.hex()},
                   {"assignment",
                    ordered_json{{"occupations", bundle.assignment.occupations},
                                 {"segments", bundle.assignment.segments},
                                 {"epoch", bundle.assignment.epoch},
                                 {"grid", grid}}},
                   {"headers", headers}};
    return j.dump(2) + "\n";
}

VerifyBundle verify_bundle_from_json(const std::string& text) {
    ordered_json j;
    try {
        j = ordered_json::parse(text);
    } catch (const std::exception& e) {
        raise(Errc::parse_error, std::string("headers JSON: ") + e.what());
    }
    try {
        VerifyBundle bundle;
        bundle.context.chain_height = j.at("chain_height").get<std::uint64_t>();
        bundle.context.segments = j.at("segments").get<std::uint32_t>();
        bundle.context.base_difficulty = j.at("base_difficulty").get<std::uint64_t>();
        bundle.block_hash = digest_field(j.at("block_hash"), "block_hash");
        const auto& assignment = j.at("assignment");
        bundle.assignment.occupations = assignment.at("occupations").get<std::uint32_t>();
        bundle.assignment.segments = assignment.at("segments").get<std::uint32_t>();
        bundle.assignment.epoch = assignment.at("epoch").get<std::uint64_t>();
        for (const auto& entry : assignment.at("grid"))
            bundle.assignment.grid.push_back(fixed_bytes<32>(entry, "grid identity"));
        if (bundle.assignment.grid.size() !=
            std::size_t(bundle.assignment.occupations) * bundle.assignment.segments)
            raise(Errc::parse_error, "assignment grid size mismatch");
        for (const auto& entry : j.at("headers")) {
            auto raw = bytes_from_hex(entry.at("header").get<std::string>());
            if (!raw || raw->size() != BlockHeader::kSerializedSize)
                raise(Errc::parse_error, "header must be 112 hex-encoded bytes");
            ByteReader reader(*raw);
            HeaderInfo info;
            info.header = BlockHeader::deserialize(reader);
            info.tx_count = entry.at("tx_count").get<std::uint64_t>();
            bundle.headers.push_back(info);
        }
        return bundle;
    } catch (const Error&) {
        throw;
    } catch (const std::exception& e) {
        raise(Errc::parse_error, std::string("headers JSON: ") + e.what());
    }
}

} // namespace segchain
