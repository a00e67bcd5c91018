#include "hybridnet/rng.hpp"

#include <stdexcept>

namespace hybridnet {

namespace {

std::seed_seq make_seq(std::uint64_t a, std::uint64_t b, std::uint64_t c, std::uint64_t d) {
    auto lo = [](std::uint64_t x) { return static_cast<std::uint32_t>(x & 0xffffffffu); };
    auto hi = [](std::uint64_t x) { return static_cast<std::uint32_t>(x >> 32); };
    return std::seed_seq{lo(a), hi(a), lo(b), hi(b), lo(c), hi(c), lo(d), hi(d)};
}

}  // namespace

Rng::Rng(std::uint64_t seed, std::uint64_t node, std::uint64_t round, std::uint64_t purpose) {
    auto seq = make_seq(seed, node, round, purpose);
    eng_.seed(seq);
}

std::uint64_t Rng::below(std::uint64_t bound) {
    if (bound == 0) throw std::invalid_argument("Rng::below: bound must be positive");
    // reject the low 2^64 mod bound values so every residue is equally likely
    const std::uint64_t threshold = (std::uint64_t{0} - bound) % bound;
    std::uint64_t x = eng_();
    while (x < threshold) x = eng_();
    return x % bound;
}

std::int64_t Rng::range(std::int64_t lo, std::int64_t hi) {
    if (hi < lo) throw std::invalid_argument("Rng::range: empty range");
    return lo + static_cast<std::int64_t>(below(static_cast<std::uint64_t>(hi - lo) + 1));
}

}  // namespace hybridnet
