#ifndef QKDPQC_RANDOM_HPP
#define QKDPQC_RANDOM_HPP

#include <array>
#include <cstdint>
#include <span>

#include "qkdpqc/sm3.hpp"

namespace qkdpqc {

/// 32 bytes of fresh entropy; one per handshake/cycle.
struct Nonce {
    std::array<std::uint8_t, 32> bytes{};

    bool operator==(const Nonce&) const = default;
};

/// Source of random bytes. Cryptographic call sites take this by reference so
/// tests can inject a seeded generator.
class RandomSource {
public:
    virtual ~RandomSource() = default;
    virtual void fill(std::uint8_t* out, std::size_t len) = 0;

    void fill(std::span<std::uint8_t> out) { fill(out.data(), out.size()); }

    template <std::size_t N>
    std::array<std::uint8_t, N> bytes() {
        std::array<std::uint8_t, N> a;
        fill(a.data(), N);
        return a;
    }
};

/// Operating-system entropy (std::random_device).
class OsRandom final : public RandomSource {
public:
    void fill(std::uint8_t* out, std::size_t len) override;
};

/// Deterministic SM3-in-counter-mode generator. Same seed, same stream.
class SeededRandom final : public RandomSource {
public:
    explicit SeededRandom(std::uint64_t seed);
    explicit SeededRandom(const std::array<std::uint8_t, 32>& seed);

    void fill(std::uint8_t* out, std::size_t len) override;

private:
    void refill();

    std::array<std::uint8_t, 32> seed_;
    std::uint64_t counter_ = 0;
    Digest256 block_{};
    std::size_t block_pos_ = 32;  // empty
};

Nonce gen_nonce(RandomSource& rng);

/// Uniform double in [0, 1) with 53 bits of precision.
double uniform_double(RandomSource& rng);

/// Standard normal deviate (Box-Muller, no state).
double gaussian(RandomSource& rng);

}  // namespace qkdpqc

#endif
