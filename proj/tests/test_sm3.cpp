#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "qkdpqc/sm3.hpp"

#ifdef QKDPQC_HAVE_OPENSSL
#include <openssl/evp.h>
#endif

using namespace qkdpqc;

TEST_CASE("standard and cross-checked reference digests") {
    // "abcd"x16 is the GB/T 32905 standard's published vector; the others were
    // computed with OpenSSL's independent SM3 implementation.
    CHECK(to_hex(sm3(std::string("abc"))) ==
          "66c7f0f462eeedd9d1f2d46bdc10e4e24167c4875cf2f7a2297da02b8f4ba8e0");
    CHECK(to_hex(sm3(std::string(""))) ==
          "1ab21d8355cfa17f8e61194831e81a8f22bec8c728fefb747ed035eb5082aa2b");
    std::string abcd;
    for (int i = 0; i < 16; ++i) abcd += "abcd";
    CHECK(to_hex(sm3(abcd)) ==
          "debe9ff92275b8a138604889c18e5a4d6fdb70e5387e5765293dcba39c0c5732");
    CHECK(to_hex(sm3(std::string("The quick brown fox jumps over the lazy dog"))) ==
          "5fdfe814b8573ca021983970fc79b2218c9570369b4859684e2e4c3fc76cb8ea");
    Bytes all(256);
    for (int i = 0; i < 256; ++i) all[i] = std::uint8_t(i);
    CHECK(to_hex(sm3(all)) ==
          "59d171dbfd251d5a4cd77d6ba2b7109b7d64a4cd7fa8182beb100a016fa3ac44");
}

TEST_CASE("determinism and fixed length over random inputs") {
    std::mt19937_64 rng(7);
    for (int t = 0; t < 10000; ++t) {
        Bytes msg(rng() % 200);
        for (auto& b : msg) b = std::uint8_t(rng());
        const Digest256 a = sm3(msg);
        const Digest256 b = sm3(msg);
        REQUIRE(a == b);
        REQUIRE(a.size() == 32);
    }
}

TEST_CASE("incremental updates match one-shot") {
    std::mt19937_64 rng(11);
    for (int t = 0; t < 200; ++t) {
        Bytes msg(rng() % 500);
        for (auto& b : msg) b = std::uint8_t(rng());
        Sm3 h;
        std::size_t pos = 0;
        while (pos < msg.size()) {
            const std::size_t take = std::min<std::size_t>(1 + rng() % 97, msg.size() - pos);
            h.update(msg.data() + pos, take);
            pos += take;
        }
        REQUIRE(h.finish() == sm3(msg));
    }
}

#ifdef QKDPQC_HAVE_OPENSSL
TEST_CASE("fuzz against OpenSSL's SM3") {
    std::mt19937_64 rng(13);
    for (int t = 0; t < 10000; ++t) {
        Bytes msg(rng() % 300);
        for (auto& b : msg) b = std::uint8_t(rng());

        unsigned char ref[EVP_MAX_MD_SIZE];
        unsigned int ref_len = 0;
        REQUIRE(EVP_Digest(msg.data(), msg.size(), ref, &ref_len, EVP_sm3(), nullptr) == 1);
        REQUIRE(ref_len == 32);

        const Digest256 ours = sm3(msg);
        REQUIRE(std::equal(ours.begin(), ours.end(), ref));
    }
}
#endif
