#pragma once

#include <cstdint>
#include <random>

namespace grp {

/// Deterministic random source. Only raw mt19937_64 outputs are used —
/// std::uniform_int_distribution is implementation-defined, and traces and
/// generated scenarios must be reproducible byte for byte everywhere.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : eng_(seed) {}

    std::uint64_t next() { return eng_(); }

    /// Uniform-ish value in [0, n). Modulo bias is irrelevant here: draws
    /// feed scenario shuffles and loss coins, not statistics.
    std::uint64_t below(std::uint64_t n) { return n == 0 ? 0 : eng_() % n; }

    bool coin() { return (eng_() & 1) != 0; }

private:
    std::mt19937_64 eng_;
};

} // namespace grp
