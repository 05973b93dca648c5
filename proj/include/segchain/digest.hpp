#pragma once

#include <array>
#include <compare>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace segchain {

/// 32-byte SHA-256 digest, interpretable as an unsigned 256-bit big-endian
/// integer. Lexicographic byte order equals integer order.
struct Digest256 {
    std::array<std::uint8_t, 32> bytes{};

    auto operator<=>(const Digest256&) const = default;

    std::span<const std::uint8_t> span() const { return {bytes.data(), bytes.size()}; }
    std::string hex() const;
    static std::optional<Digest256> from_hex(std::string_view text);
};

Digest256 hash_bytes(std::span<const std::uint8_t> data);
Digest256 hash_bytes(std::string_view data);

/// The binary `hash` combinator used by the ranking and challenge formulas:
/// SHA-256 over length-prefixed operands, i.e. H(len(a)_be32 || a || len(b)_be32 || b).
/// Chained uses are left-associative.
Digest256 hash_combine(std::span<const std::uint8_t> a, std::span<const std::uint8_t> b);
Digest256 hash_combine(const Digest256& a, const Digest256& b);

/// Digest taken as a big-endian integer, reduced modulo `modulus` (> 0).
std::uint64_t digest_mod(const Digest256& d, std::uint64_t modulus);

std::uint32_t leading_zero_bits(const Digest256& d);

std::string to_hex(std::span<const std::uint8_t> data);
std::optional<std::vector<std::uint8_t>> bytes_from_hex(std::string_view text);

} // namespace segchain
