#include "qkdpqc/random.hpp"

#include <cmath>
#include <cstring>
#include <numbers>
#include <random>

namespace qkdpqc {

void OsRandom::fill(std::uint8_t* out, std::size_t len) {
    static thread_local std::random_device dev;
    std::size_t i = 0;
    while (i < len) {
        const std::uint32_t r = dev();
        const std::size_t take = std::min(len - i, std::size_t(4));
        std::memcpy(out + i, &r, take);
        i += take;
    }
}

SeededRandom::SeededRandom(std::uint64_t seed) : seed_{} {
    for (int i = 0; i < 8; ++i) seed_[i] = std::uint8_t(seed >> (8 * i));
}

SeededRandom::SeededRandom(const std::array<std::uint8_t, 32>& seed) : seed_(seed) {}

void SeededRandom::refill() {
    Sm3 h;
    h.update(seed_.data(), seed_.size());
    std::uint8_t ctr[8];
    for (int i = 0; i < 8; ++i) ctr[i] = std::uint8_t(counter_ >> (8 * i));
    h.update(ctr, 8);
    block_ = h.finish();
    block_pos_ = 0;
    ++counter_;
}

void SeededRandom::fill(std::uint8_t* out, std::size_t len) {
    std::size_t i = 0;
    while (i < len) {
        if (block_pos_ == 32) refill();
        const std::size_t take = std::min(len - i, std::size_t(32) - block_pos_);
        std::memcpy(out + i, block_.data() + block_pos_, take);
        block_pos_ += take;
        i += take;
    }
}

Nonce gen_nonce(RandomSource& rng) {
    Nonce n;
    rng.fill(n.bytes.data(), n.bytes.size());
    return n;
}

double uniform_double(RandomSource& rng) {
    std::uint8_t b[8];
    rng.fill(b, 8);
    std::uint64_t x = 0;
    for (int i = 0; i < 8; ++i) x = x << 8 | b[i];
    return double(x >> 11) * 0x1.0p-53;
}

double gaussian(RandomSource& rng) {
    double u;
    do {
        u = uniform_double(rng);
    } while (u == 0.0);
    const double v = uniform_double(rng);
    return std::sqrt(-2.0 * std::log(u)) * std::cos(2.0 * std::numbers::pi * v);
}

}  // namespace qkdpqc
