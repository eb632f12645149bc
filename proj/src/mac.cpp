#include "qkdpqc/mac.hpp"

#include <bit>

namespace qkdpqc {

namespace {

inline bool get_bit(std::span<const std::uint8_t> bytes, std::size_t i) {
    return (bytes[i / 8] >> (i % 8)) & 1u;
}

/// tag_bit[i] = parity over j of seed_bit[i+j] * digest_bit[j]  (Toeplitz rows
/// are shifted windows of the seed).
std::array<std::uint8_t, 16> toeplitz_hash(std::span<const std::uint8_t> seed,
                                           const Digest256& digest) {
    std::array<std::uint8_t, 16> out{};
    for (std::size_t i = 0; i < kMacTagBits; ++i) {
        unsigned acc = 0;
        for (std::size_t j = 0; j < 256; ++j)
            acc ^= unsigned(get_bit(seed, i + j) & get_bit(digest, j));
        if (acc) out[i / 8] |= std::uint8_t(1u << (i % 8));
    }
    return out;
}

}  // namespace

PresharedKeyPool::PresharedKeyPool(std::string pool_id, Bytes secret_bytes)
    : id_(std::move(pool_id)), bytes_(std::move(secret_bytes)) {}

PresharedKeyPool PresharedKeyPool::from_random(std::string pool_id, std::size_t bits,
                                               RandomSource& rng) {
    Bytes b((bits + 7) / 8);
    rng.fill(b.data(), b.size());
    return PresharedKeyPool(std::move(pool_id), std::move(b));
}

void PresharedKeyPool::replenish(std::span<const std::uint8_t> bytes) {
    bytes_.insert(bytes_.end(), bytes.begin(), bytes.end());
}

Bytes PresharedKeyPool::consume(std::uint32_t bits, std::uint64_t* start) {
    if (remaining_bits() < bits) throw PoolExhausted();
    if (start) *start = cursor_;
    Bytes out((bits + 7) / 8, 0);
    for (std::uint32_t i = 0; i < bits; ++i) {
        const std::uint64_t src = cursor_ + i;
        if ((bytes_[src / 8] >> (src % 8)) & 1u) out[i / 8] |= std::uint8_t(1u << (i % 8));
    }
    cursor_ += bits;
    return out;
}

void PresharedKeyPool::flip_bit(std::uint64_t bit_index) {
    bytes_.at(bit_index / 8) ^= std::uint8_t(1u << (bit_index % 8));
    seed_loaded_ = false;  // force re-derivation from (possibly corrupt) bytes
}

void PresharedKeyPool::ensure_seed() {
    if (seed_loaded_) return;
    // The Toeplitz seed is the first kToeplitzSeedBits of the pool; cursor
    // starts after it so pad ranges and the seed never overlap.
    if (capacity_bits() < kToeplitzSeedBits) throw PoolExhausted();
    for (std::size_t i = 0; i < toeplitz_seed_.size(); ++i) toeplitz_seed_[i] = bytes_[i];
    if (cursor_ < kToeplitzSeedBits) cursor_ = kToeplitzSeedBits;
    seed_loaded_ = true;
}

ItsMacTag mac_tag(PresharedKeyPool& pool, std::span<const std::uint8_t> message) {
    pool.ensure_seed();
    if (pool.remaining_bits() < kMacTagBits) throw PoolExhausted();

    const Digest256 d = sm3(message);
    ItsMacTag t;
    t.range_len = kMacTagBits;
    const Bytes pad = pool.consume(kMacTagBits, &t.range_start);
    t.tag = toeplitz_hash(pool.toeplitz_seed_, d);
    for (std::size_t i = 0; i < 16; ++i) t.tag[i] ^= pad[i];
    return t;
}

class MacVerifyAccess {
public:
    static MacResult run(PresharedKeyPool& pool, std::span<const std::uint8_t> message,
                         const ItsMacTag& tag) {
        pool.ensure_seed();
        if (tag.range_len != kMacTagBits) return MacResult::Reject;
        if (tag.range_start != pool.cursor_bits()) return MacResult::PoolDesync;
        if (pool.remaining_bits() < kMacTagBits) return MacResult::PoolDesync;

        const Digest256 d = sm3(message);
        const Bytes pad = pool.consume(kMacTagBits, nullptr);
        std::array<std::uint8_t, 16> expect = toeplitz_hash(pool.toeplitz_seed_, d);
        for (std::size_t i = 0; i < 16; ++i) expect[i] ^= pad[i];
        return expect == tag.tag ? MacResult::Accept : MacResult::Reject;
    }
};

MacResult mac_verify(PresharedKeyPool& pool, std::span<const std::uint8_t> message,
                     const ItsMacTag& tag) {
    return MacVerifyAccess::run(pool, message, tag);
}

}  // namespace qkdpqc
