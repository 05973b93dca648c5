#include "segchain/digest.hpp"

#include <openssl/sha.h>

#include "segchain/bytes.hpp"
#include "segchain/errors.hpp"

namespace segchain {

namespace {

constexpr char kHexDigits[] = "0123456789abcdef";

int hex_value(char c) {
    if (c >= '0' && c <= '9') return c - '0';
    if (c >= 'a' && c <= 'f') return c - 'a' + 10;
    if (c >= 'A' && c <= 'F') return c - 'A' + 10;
    return -1;
}

} // namespace

std::string Digest256::hex() const {
    return to_hex(span());
}

std::optional<Digest256> Digest256::from_hex(std::string_view text) {
    auto raw = bytes_from_hex(text);
    if (!raw || raw->size() != 32)
        return std::nullopt;
    Digest256 d;
    std::copy(raw->begin(), raw->end(), d.bytes.begin());
    return d;
}

Digest256 hash_bytes(std::span<const std::uint8_t> data) {
    Digest256 out;
    SHA256(data.data(), data.size(), out.bytes.data());
    return out;
}

Digest256 hash_bytes(std::string_view data) {
    return hash_bytes(std::span<const std::uint8_t>(
        reinterpret_cast<const std::uint8_t*>(data.data()), data.size()));
}

Digest256 hash_combine(std::span<const std::uint8_t> a, std::span<const std::uint8_t> b) {
    std::vector<std::uint8_t> buf;
    buf.reserve(8 + a.size() + b.size());
    put_u32(buf, static_cast<std::uint32_t>(a.size()));
    put_bytes(buf, a);
    put_u32(buf, static_cast<std::uint32_t>(b.size()));
    put_bytes(buf, b);
    return hash_bytes(buf);
}

Digest256 hash_combine(const Digest256& a, const Digest256& b) {
    return hash_combine(a.span(), b.span());
}

std::uint64_t digest_mod(const Digest256& d, std::uint64_t modulus) {
    if (modulus == 0)
        raise(Errc::domain_error, "digest_mod by zero");
    // Horner reduction over the big-endian bytes; the intermediate fits in
    // 128 bits since r < modulus <= 2^64.
    unsigned __int128 r = 0;
    for (std::uint8_t byte : d.bytes)
        r = (r * 256 + byte) % modulus;
    return static_cast<std::uint64_t>(r);
}

std::uint32_t leading_zero_bits(const Digest256& d) {
    std::uint32_t bits = 0;
    for (std::uint8_t byte : d.bytes) {
        if (byte == 0) {
            bits += 8;
            continue;
        }
        for (int i = 7; i >= 0 && !(byte >> i & 1); --i)
            ++bits;
        break;
    }
    return bits;
}

std::string to_hex(std::span<const std::uint8_t> data) {
    std::string out;
    out.reserve(data.size() * 2);
    for (std::uint8_t byte : data) {
        out.push_back(kHexDigits[byte >> 4]);
        out.push_back(kHexDigits[byte & 0xf]);
    }
    return out;
}

std::optional<std::vector<std::uint8_t>> bytes_from_hex(std::string_view text) {
    if (text.size() % 2 != 0)
        return std::nullopt;
    std::vector<std::uint8_t> out;
    out.reserve(text.size() / 2);
    for (std::size_t i = 0; i < text.size(); i += 2) {
        int hi = hex_value(text[i]);
        int lo = hex_value(text[i + 1]);
        if (hi < 0 || lo < 0)
            return std::nullopt;
        out.push_back(static_cast<std::uint8_t>(hi << 4 | lo));
    }
    return out;
}

} // namespace segchain
