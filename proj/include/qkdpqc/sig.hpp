#ifndef QKDPQC_SIG_HPP
#define QKDPQC_SIG_HPP

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "qkdpqc/random.hpp"
#include "qkdpqc/ring.hpp"
#include "qkdpqc/sm3.hpp"

namespace qkdpqc {

/// Module-lattice Fiat-Shamir-with-aborts signature over Z_q[x]/(x^n + 1).
/// Two shipped parameter sets: `reference` (Dilithium-class dimensions) and
/// `desk` (small ring for fast property tests). See SigParams::validate for
/// the constraints.
struct SigParams {
    std::string name;
    std::uint16_t id = 0;     // params-id in file headers
    std::uint32_t n = 0;      // ring dimension, power of two
    std::uint32_t q = 0;      // prime, q ≡ 1 (mod 2n)
    std::uint32_t k = 0;      // module rank (rows of A)
    std::uint32_t l = 0;      // module rank (cols of A)
    std::uint32_t eta = 0;    // secret coefficient bound
    std::uint32_t tau = 0;    // challenge weight (±1 count)
    std::uint32_t beta = 0;   // tau * eta
    std::uint32_t gamma1 = 0; // masking bound, power of two
    std::uint32_t gamma2 = 0; // low-bits bound, 2*gamma2 | q-1
    std::uint32_t d = 0;      // dropped bits of t
    std::uint32_t omega = 0;  // max hint weight
    std::uint32_t max_restarts = 512;

    void validate() const;  // throws std::invalid_argument

    std::uint32_t high_bits_range() const { return (q - 1) / (2 * gamma2); }
    std::size_t public_key_bytes() const;
    std::size_t secret_key_bytes() const;
    std::size_t signature_bytes() const;

    static const SigParams& reference();
    static const SigParams& desk();
    static const SigParams* by_id(std::uint16_t id);
};

struct SigPublicKey {
    std::array<std::uint8_t, 32> rho{};  // seed of matrix A
    std::vector<Poly> t1;                // compressed t, k polys

    bool operator==(const SigPublicKey&) const = default;
};

struct SigSecretKey {
    std::array<std::uint8_t, 32> rho{};
    std::vector<Poly> s1;  // l polys, coeffs in [-eta, eta] mod q
    std::vector<Poly> s2;  // k polys
    std::vector<Poly> t0;  // low part of t, k polys
    SigPublicKey pub;      // copy of the public part

    bool operator==(const SigSecretKey&) const = default;
};

struct SigKeypair {
    SigPublicKey pub;
    SigSecretKey sec;
};

struct LatticeSignature {
    std::array<std::uint8_t, 32> c_tilde{};  // challenge hash
    std::vector<Poly> z;                     // l polys, ||z||inf < gamma1 - beta
    Bytes hints;                             // k*n bit bitmap

    bool operator==(const LatticeSignature&) const = default;
};

struct SignStats {
    std::uint64_t attempts = 0;
    std::uint64_t z_rejects = 0;
    std::uint64_t low_bits_rejects = 0;
    std::uint64_t t0_rejects = 0;
    std::uint64_t hint_rejects = 0;
};

class AbortLimitExceeded : public std::runtime_error {
public:
    AbortLimitExceeded() : std::runtime_error("sig: restart budget exhausted") {}
};

class SigScheme {
public:
    explicit SigScheme(const SigParams& params);

    const SigParams& params() const { return p_; }
    const NttContext& ring() const { return ntt_; }

    /// Deterministic in the seed.
    SigKeypair keygen(const std::array<std::uint8_t, 32>& seed) const;

    LatticeSignature sign(const SigSecretKey& sk, std::span<const std::uint8_t> msg,
                          RandomSource& rng, SignStats* stats = nullptr) const;
    bool verify(const SigPublicKey& pk, std::span<const std::uint8_t> msg,
                const LatticeSignature& sig) const;

    /// Exact per-coefficient acceptance probability of the ||z||inf check,
    /// used by the restart-rate test.
    double z_accept_probability() const;

    Bytes encode_public(const SigPublicKey& pk) const;
    Bytes encode_secret(const SigSecretKey& sk) const;
    Bytes encode_signature(const LatticeSignature& sig) const;
    std::optional<SigPublicKey> decode_public(std::span<const std::uint8_t> in) const;
    std::optional<SigSecretKey> decode_secret(std::span<const std::uint8_t> in) const;
    std::optional<LatticeSignature> decode_signature(std::span<const std::uint8_t> in) const;

    /// Matrix A expanded from rho, NTT domain, row-major k*l.
    std::vector<Poly> expand_a(const std::array<std::uint8_t, 32>& rho) const;

private:
    friend class SigSigner;
    friend class SigVerifier;

    SigParams p_;
    NttContext ntt_;
};

/// Caches the expanded matrix and NTT-domain secrets of one keypair.
class SigSigner {
public:
    SigSigner(const SigScheme& scheme, SigSecretKey sk);
    LatticeSignature sign(std::span<const std::uint8_t> msg, RandomSource& rng,
                          SignStats* stats = nullptr) const;
    const SigSecretKey& secret() const { return sk_; }

private:
    const SigScheme& scheme_;
    SigSecretKey sk_;
    std::vector<Poly> a_hat_, s1_hat_, s2_hat_, t0_hat_;
};

class SigVerifier {
public:
    SigVerifier(const SigScheme& scheme, SigPublicKey pk);
    bool verify(std::span<const std::uint8_t> msg, const LatticeSignature& sig) const;
    bool verify_bytes(std::span<const std::uint8_t> msg,
                      std::span<const std::uint8_t> sig_bytes) const;
    const SigPublicKey& key() const { return pk_; }

private:
    const SigScheme& scheme_;
    SigPublicKey pk_;
    std::vector<Poly> a_hat_, t1_shift_hat_;  // t1 * 2^d, NTT domain
};

}  // namespace qkdpqc

#endif
