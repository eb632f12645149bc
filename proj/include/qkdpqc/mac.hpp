#ifndef QKDPQC_MAC_HPP
#define QKDPQC_MAC_HPP

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>

#include "qkdpqc/random.hpp"
#include "qkdpqc/sm3.hpp"

namespace qkdpqc {

/// Information-theoretic Wegman-Carter MAC: a Toeplitz universal hash of the
/// message digest, masked with fresh one-time-pad bits. The Toeplitz seed is
/// consumed from the pool once, then reused; every tag consumes 128 fresh pad
/// bits. Key ranges never overlap.
inline constexpr std::size_t kMacTagBits = 128;
inline constexpr std::size_t kToeplitzSeedBits = 384;  // >= 128 + 256 - 1

struct ItsMacTag {
    std::array<std::uint8_t, 16> tag{};
    std::uint64_t range_start = 0;  // pool cursor (bits) of the consumed pad
    std::uint32_t range_len = 0;    // bits consumed for this tag

    bool operator==(const ItsMacTag&) const = default;
};

class PoolExhausted : public std::runtime_error {
public:
    PoolExhausted() : std::runtime_error("preshared pool exhausted") {}
};

/// Ordered secret bit reservoir shared by two endpoints. Single-owner mutable
/// state; the cursor only moves forward and bits are never reused.
class PresharedKeyPool {
public:
    PresharedKeyPool() = default;
    PresharedKeyPool(std::string pool_id, Bytes secret_bytes);

    static PresharedKeyPool from_random(std::string pool_id, std::size_t bits,
                                        RandomSource& rng);

    const std::string& id() const { return id_; }
    std::uint64_t capacity_bits() const { return bytes_.size() * 8; }
    std::uint64_t cursor_bits() const { return cursor_; }
    std::uint64_t remaining_bits() const { return capacity_bits() - cursor_; }
    bool toeplitz_seed_loaded() const { return seed_loaded_; }

    /// Appends fresh secret bytes (e.g. distilled QKD key).
    void replenish(std::span<const std::uint8_t> bytes);

    /// Consumes `bits` from the cursor; throws PoolExhausted.
    Bytes consume(std::uint32_t bits, std::uint64_t* start = nullptr);

    /// Test hook: corrupts one stored bit (simulated pool tamper).
    void flip_bit(std::uint64_t bit_index);

private:
    friend ItsMacTag mac_tag(PresharedKeyPool&, std::span<const std::uint8_t>);
    friend class MacVerifyAccess;

    void ensure_seed();

    std::string id_;
    Bytes bytes_;
    std::uint64_t cursor_ = 0;
    bool seed_loaded_ = false;
    std::array<std::uint8_t, kToeplitzSeedBits / 8> toeplitz_seed_{};
};

enum class MacResult { Accept, Reject, PoolDesync };

ItsMacTag mac_tag(PresharedKeyPool& pool, std::span<const std::uint8_t> message);
MacResult mac_verify(PresharedKeyPool& pool, std::span<const std::uint8_t> message,
                     const ItsMacTag& tag);

}  // namespace qkdpqc

#endif
