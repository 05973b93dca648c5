#pragma once

#include <cstdint>
#include <cstring>
#include <span>
#include <vector>

#include "segchain/errors.hpp"

namespace segchain {

// Fixed-width big-endian wire helpers shared by all canonical encodings.

inline void put_u32(std::vector<std::uint8_t>& out, std::uint32_t v) {
    out.push_back(static_cast<std::uint8_t>(v >> 24));
    out.push_back(static_cast<std::uint8_t>(v >> 16));
    out.push_back(static_cast<std::uint8_t>(v >> 8));
    out.push_back(static_cast<std::uint8_t>(v));
}

inline void put_u64(std::vector<std::uint8_t>& out, std::uint64_t v) {
    put_u32(out, static_cast<std::uint32_t>(v >> 32));
    put_u32(out, static_cast<std::uint32_t>(v));
}

inline void put_bytes(std::vector<std::uint8_t>& out, std::span<const std::uint8_t> data) {
    out.insert(out.end(), data.begin(), data.end());
}

inline std::uint32_t read_u32(const std::uint8_t* p) {
    return (std::uint32_t(p[0]) << 24) | (std::uint32_t(p[1]) << 16) |
           (std::uint32_t(p[2]) << 8) | std::uint32_t(p[3]);
}

inline std::uint64_t read_u64(const std::uint8_t* p) {
    return (std::uint64_t(read_u32(p)) << 32) | read_u32(p + 4);
}

class ByteReader {
public:
    explicit ByteReader(std::span<const std::uint8_t> data) : data_(data) {}

    std::uint32_t u32() {
        need(4);
        std::uint32_t v = read_u32(data_.data() + pos_);
        pos_ += 4;
        return v;
    }

    std::uint64_t u64() {
        need(8);
        std::uint64_t v = read_u64(data_.data() + pos_);
        pos_ += 8;
        return v;
    }

    void take(std::uint8_t* dst, std::size_t n) {
        need(n);
        std::memcpy(dst, data_.data() + pos_, n);
        pos_ += n;
    }

    template <std::size_t N>
    void take(std::array<std::uint8_t, N>& dst) {
        take(dst.data(), N);
    }

    std::size_t remaining() const { return data_.size() - pos_; }
    bool done() const { return pos_ == data_.size(); }

private:
    void need(std::size_t n) {
        if (data_.size() - pos_ < n)
            raise(Errc::parse_error, "truncated input");
    }

    std::span<const std::uint8_t> data_;
    std::size_t pos_ = 0;
};

} // namespace segchain
