#include "segchain/rng.hpp"

#include <limits>
#include <vector>

#include "segchain/bytes.hpp"
#include "segchain/digest.hpp"

namespace segchain {

RngStream::RngStream(std::uint64_t seed, std::string_view name) {
    std::vector<std::uint8_t> material;
    put_u64(material, seed);
    material.insert(material.end(), name.begin(), name.end());
    Digest256 d = hash_bytes(material);
    gen_.seed(read_u64(d.bytes.data()));
}

std::uint64_t RngStream::next_below(std::uint64_t bound) {
    if (bound <= 1)
        return 0;
    const std::uint64_t max = std::numeric_limits<std::uint64_t>::max();
    const std::uint64_t limit = max - max % bound;
    for (;;) {
        std::uint64_t v = gen_();
        if (v < limit)
            return v % bound;
    }
}

double RngStream::next_unit() {
    return static_cast<double>(gen_() >> 11) * 0x1.0p-53;
}

} // namespace segchain
