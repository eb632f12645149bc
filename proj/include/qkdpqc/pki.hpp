#ifndef QKDPQC_PKI_HPP
#define QKDPQC_PKI_HPP

#include <cstdint>
#include <map>
#include <optional>
#include <string>

#include "qkdpqc/sig.hpp"

namespace qkdpqc {

struct Validity {
    std::int64_t not_before = 0;  // seconds, simulated clock
    std::int64_t not_after = 0;

    bool operator==(const Validity&) const = default;
};

/// Identity + public key + CA signature binding; the unit of PKI trust.
struct Certificate {
    std::string subject;     // UTF-8, <= 256 bytes
    Bytes subject_pk;        // encoded signature public key
    std::uint64_t serial = 0;
    Validity validity;
    std::string issuer;
    Bytes ca_signature;      // over canonical_encode of the fields above

    bool operator==(const Certificate&) const = default;
};

/// Length-prefixed concatenation of all fields except the CA signature.
/// Injective and platform-stable. Throws std::invalid_argument on oversize
/// fields.
Bytes canonical_encode(const Certificate& cert);
std::optional<Certificate> canonical_decode(std::span<const std::uint8_t> in);

class CertificateAuthority {
public:
    CertificateAuthority(std::string id, const SigScheme& scheme, SigKeypair keypair);

    const std::string& id() const { return id_; }
    const SigPublicKey& public_key() const { return keypair_.pub; }
    std::uint64_t next_serial() const { return next_serial_; }

    /// Serial numbers are strictly increasing. Throws std::invalid_argument
    /// on a malformed subject key or validity window.
    Certificate issue(const std::string& subject_id, const Bytes& subject_pk,
                      Validity validity, RandomSource& rng);

private:
    std::string id_;
    const SigScheme& scheme_;
    SigKeypair keypair_;
    std::uint64_t next_serial_ = 1;
};

/// Trusted CA public keys keyed by issuer identity.
class TrustStore {
public:
    void add(const std::string& issuer_id, const SigPublicKey& pk);
    const SigPublicKey* find(const std::string& issuer_id) const;

private:
    std::map<std::string, SigPublicKey> keys_;
};

enum class CertVerdict { Accept, UnknownIssuer, BadSignature, Expired, NotYetValid, Malformed };

const char* to_string(CertVerdict v);

CertVerdict verify_certificate(const SigScheme& scheme, const TrustStore& store,
                               const Certificate& cert, std::int64_t now);

// --- certificate / key files -----------------------------------------------
// Layout: 8-byte magic, 2-byte version (LE), 2-byte params-id (LE), payload.

inline constexpr std::uint16_t kFileVersion = 1;
inline constexpr char kMagicPublicKey[8] = {'Q', 'P', 'Q', 'C', '-', 'P', 'U', 'B'};
inline constexpr char kMagicSecretKey[8] = {'Q', 'P', 'Q', 'C', '-', 'S', 'E', 'C'};
inline constexpr char kMagicCertificate[8] = {'Q', 'P', 'Q', 'C', '-', 'C', 'R', 'T'};

Bytes wrap_file(const char magic[8], std::uint16_t params_id, std::span<const std::uint8_t> payload);
std::optional<Bytes> unwrap_file(const char magic[8], std::uint16_t* params_id,
                                 std::span<const std::uint8_t> file);

Bytes encode_certificate_file(const Certificate& cert, std::uint16_t params_id);
std::optional<Certificate> decode_certificate_file(std::span<const std::uint8_t> file,
                                                   std::uint16_t* params_id = nullptr);

}  // namespace qkdpqc

#endif
