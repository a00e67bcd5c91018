#pragma once

#include <cstdint>
#include <random>

namespace hybridnet {

// Deterministic random stream keyed by (run seed, node, round, purpose).
// Bounded draws avoid std distributions, whose output differs between
// standard library implementations and would break byte-stable CSVs.
class Rng {
public:
    Rng(std::uint64_t seed, std::uint64_t node, std::uint64_t round = 0, std::uint64_t purpose = 0);

    std::uint64_t next() { return eng_(); }

    // Uniform in [0, bound). bound must be positive.
    std::uint64_t below(std::uint64_t bound);

    // Uniform in [lo, hi], inclusive.
    std::int64_t range(std::int64_t lo, std::int64_t hi);

    // Uniform in [0, 1) with 53 bits.
    double unit() { return static_cast<double>(eng_() >> 11) * 0x1.0p-53; }

    bool bernoulli(double p) { return p >= 1.0 || (p > 0.0 && unit() < p); }

private:
    std::mt19937_64 eng_;
};

// Purpose tags keep streams of different subroutines apart.
enum class Stream : std::uint64_t {
    generator = 1,
    balancing,
    multiplication,
    seeding,
    delays,
    marking,
    spanner,
    baswana_sen,
    hierarchy,
    adversary,
    test,
};

inline Rng stream(std::uint64_t seed, Stream s, std::uint64_t node, std::uint64_t round = 0) {
    return Rng(seed, node, round, static_cast<std::uint64_t>(s));
}

}  // namespace hybridnet
