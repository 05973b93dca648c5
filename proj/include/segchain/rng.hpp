#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace segchain {

/// Deterministic named random stream. All randomness in a run flows from one
/// 64-bit seed; independent subsystems draw from differently named streams so
/// a change in one subsystem's consumption never perturbs another's draws.
class RngStream {
public:
    RngStream(std::uint64_t seed, std::string_view name);

    std::uint64_t next_u64() { return gen_(); }

    /// Uniform in [0, bound), bound > 0. Rejection sampling; avoids the
    /// implementation-defined std distributions so streams are reproducible.
    std::uint64_t next_below(std::uint64_t bound);

    /// Uniform in [0, 1) with 53 bits of precision.
    double next_unit();

    bool next_bernoulli(double p) { return next_unit() < p; }

private:
    std::mt19937_64 gen_;
};

} // namespace segchain
