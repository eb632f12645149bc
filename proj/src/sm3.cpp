#include "qkdpqc/sm3.hpp"

#include <cstring>

namespace qkdpqc {

namespace {

inline std::uint32_t rotl(std::uint32_t x, unsigned n) {
    return (x << n) | (x >> (32 - n));
}

inline std::uint32_t p0(std::uint32_t x) { return x ^ rotl(x, 9) ^ rotl(x, 17); }
inline std::uint32_t p1(std::uint32_t x) { return x ^ rotl(x, 15) ^ rotl(x, 23); }

inline std::uint32_t ff(std::uint32_t x, std::uint32_t y, std::uint32_t z, int j) {
    return j < 16 ? (x ^ y ^ z) : ((x & y) | (x & z) | (y & z));
}

inline std::uint32_t gg(std::uint32_t x, std::uint32_t y, std::uint32_t z, int j) {
    return j < 16 ? (x ^ y ^ z) : ((x & y) | (~x & z));
}

inline std::uint32_t load_be32(const std::uint8_t* p) {
    return (std::uint32_t(p[0]) << 24) | (std::uint32_t(p[1]) << 16) |
           (std::uint32_t(p[2]) << 8) | std::uint32_t(p[3]);
}

inline void store_be32(std::uint8_t* p, std::uint32_t v) {
    p[0] = std::uint8_t(v >> 24);
    p[1] = std::uint8_t(v >> 16);
    p[2] = std::uint8_t(v >> 8);
    p[3] = std::uint8_t(v);
}

}  // namespace

Sm3::Sm3()
    : state_{0x7380166FU, 0x4914B2B9U, 0x172442D7U, 0xDA8A0600U,
             0xA96F30BCU, 0x163138AAU, 0xE38DEE4DU, 0xB0FB0E4EU} {}

void Sm3::compress(const std::uint8_t block[64]) {
    std::uint32_t w[68];
    for (int i = 0; i < 16; ++i) w[i] = load_be32(block + 4 * i);
    for (int i = 16; i < 68; ++i) {
        w[i] = p1(w[i - 16] ^ w[i - 9] ^ rotl(w[i - 3], 15)) ^ rotl(w[i - 13], 7) ^ w[i - 6];
    }

    std::uint32_t a = state_[0], b = state_[1], c = state_[2], d = state_[3];
    std::uint32_t e = state_[4], f = state_[5], g = state_[6], h = state_[7];

    for (int j = 0; j < 64; ++j) {
        const std::uint32_t tj = j < 16 ? 0x79CC4519U : 0x7A879D8AU;
        const std::uint32_t ss1 = rotl(rotl(a, 12) + e + rotl(tj, unsigned(j % 32)), 7);
        const std::uint32_t ss2 = ss1 ^ rotl(a, 12);
        const std::uint32_t tt1 = ff(a, b, c, j) + d + ss2 + (w[j] ^ w[j + 4]);
        const std::uint32_t tt2 = gg(e, f, g, j) + h + ss1 + w[j];
        d = c;
        c = rotl(b, 9);
        b = a;
        a = tt1;
        h = g;
        g = rotl(f, 19);
        f = e;
        e = p0(tt2);
    }

    state_[0] ^= a;
    state_[1] ^= b;
    state_[2] ^= c;
    state_[3] ^= d;
    state_[4] ^= e;
    state_[5] ^= f;
    state_[6] ^= g;
    state_[7] ^= h;
}

void Sm3::update(const std::uint8_t* data, std::size_t len) {
    total_len_ += len;
    if (buf_len_ > 0) {
        const std::size_t take = std::min(len, std::size_t(64) - buf_len_);
        std::memcpy(buf_ + buf_len_, data, take);
        buf_len_ += take;
        data += take;
        len -= take;
        if (buf_len_ == 64) {
            compress(buf_);
            buf_len_ = 0;
        }
    }
    while (len >= 64) {
        compress(data);
        data += 64;
        len -= 64;
    }
    if (len > 0) {
        std::memcpy(buf_, data, len);
        buf_len_ = len;
    }
}

Digest256 Sm3::finish() {
    const std::uint64_t bit_len = total_len_ * 8;
    const std::uint8_t pad = 0x80;
    update(&pad, 1);
    const std::uint8_t zero = 0x00;
    while (buf_len_ != 56) update(&zero, 1);
    std::uint8_t len_be[8];
    for (int i = 0; i < 8; ++i) len_be[i] = std::uint8_t(bit_len >> (56 - 8 * i));
    update(len_be, 8);

    Digest256 out;
    for (int i = 0; i < 8; ++i) store_be32(out.data() + 4 * i, state_[i]);
    return out;
}

Digest256 sm3(std::span<const std::uint8_t> message) {
    Sm3 h;
    h.update(message);
    return h.finish();
}

Digest256 sm3(const std::string& message) {
    return sm3(std::span<const std::uint8_t>(
        reinterpret_cast<const std::uint8_t*>(message.data()), message.size()));
}

std::string to_hex(std::span<const std::uint8_t> bytes) {
    static const char* digits = "0123456789abcdef";
    std::string s;
    s.reserve(bytes.size() * 2);
    for (std::uint8_t b : bytes) {
        s.push_back(digits[b >> 4]);
        s.push_back(digits[b & 0xF]);
    }
    return s;
}

}  // namespace qkdpqc
