#ifndef QKDPQC_SM3_HPP
#define QKDPQC_SM3_HPP

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace qkdpqc {

using Bytes = std::vector<std::uint8_t>;
using Digest256 = std::array<std::uint8_t, 32>;

/// Incremental SM3 (GB/T 32905-2016). 256-bit digest.
class Sm3 {
public:
    Sm3();
    void update(const std::uint8_t* data, std::size_t len);
    void update(std::span<const std::uint8_t> data) { update(data.data(), data.size()); }
    Digest256 finish();

private:
    void compress(const std::uint8_t block[64]);

    std::array<std::uint32_t, 8> state_;
    std::uint64_t total_len_ = 0;
    std::uint8_t buf_[64];
    std::size_t buf_len_ = 0;
};

Digest256 sm3(std::span<const std::uint8_t> message);
Digest256 sm3(const std::string& message);

std::string to_hex(std::span<const std::uint8_t> bytes);

}  // namespace qkdpqc

#endif
