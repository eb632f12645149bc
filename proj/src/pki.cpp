#include "qkdpqc/pki.hpp"

#include <cstring>

namespace qkdpqc {

namespace {

void put_u16(Bytes& out, std::uint16_t v) {
    out.push_back(std::uint8_t(v));
    out.push_back(std::uint8_t(v >> 8));
}

void put_u64(Bytes& out, std::uint64_t v) {
    for (int i = 0; i < 8; ++i) out.push_back(std::uint8_t(v >> (8 * i)));
}

void put_field(Bytes& out, std::span<const std::uint8_t> f) {
    if (f.size() > 0xFFFF) throw std::invalid_argument("pki: field too long");
    put_u16(out, std::uint16_t(f.size()));
    out.insert(out.end(), f.begin(), f.end());
}

void put_field(Bytes& out, const std::string& s) {
    put_field(out, std::span<const std::uint8_t>(
                       reinterpret_cast<const std::uint8_t*>(s.data()), s.size()));
}

struct Reader {
    std::span<const std::uint8_t> in;
    std::size_t pos = 0;

    bool u16(std::uint16_t& v) {
        if (pos + 2 > in.size()) return false;
        v = std::uint16_t(in[pos]) | std::uint16_t(in[pos + 1]) << 8;
        pos += 2;
        return true;
    }

    bool u64(std::uint64_t& v) {
        if (pos + 8 > in.size()) return false;
        v = 0;
        for (int i = 0; i < 8; ++i) v |= std::uint64_t(in[pos + i]) << (8 * i);
        pos += 8;
        return true;
    }

    bool field(Bytes& f) {
        std::uint16_t len;
        if (!u16(len) || pos + len > in.size()) return false;
        f.assign(in.begin() + pos, in.begin() + pos + len);
        pos += len;
        return true;
    }

    bool field(std::string& s) {
        Bytes f;
        if (!field(f)) return false;
        s.assign(f.begin(), f.end());
        return true;
    }
};

}  // namespace

Bytes canonical_encode(const Certificate& cert) {
    if (cert.subject.size() > 256) throw std::invalid_argument("pki: subject too long");
    Bytes out;
    put_field(out, cert.subject);
    put_field(out, cert.subject_pk);
    put_u64(out, cert.serial);
    put_u64(out, std::uint64_t(cert.validity.not_before));
    put_u64(out, std::uint64_t(cert.validity.not_after));
    put_field(out, cert.issuer);
    return out;
}

namespace {

bool decode_fields(Reader& r, Certificate& c) {
    std::uint64_t nb, na;
    if (!r.field(c.subject) || !r.field(c.subject_pk) || !r.u64(c.serial) || !r.u64(nb) ||
        !r.u64(na) || !r.field(c.issuer))
        return false;
    c.validity.not_before = std::int64_t(nb);
    c.validity.not_after = std::int64_t(na);
    return c.subject.size() <= 256;
}

}  // namespace

std::optional<Certificate> canonical_decode(std::span<const std::uint8_t> in) {
    Certificate c;
    Reader r{in};
    if (!decode_fields(r, c) || r.pos != in.size()) return std::nullopt;
    return c;
}

CertificateAuthority::CertificateAuthority(std::string id, const SigScheme& scheme,
                                           SigKeypair keypair)
    : id_(std::move(id)), scheme_(scheme), keypair_(std::move(keypair)) {}

Certificate CertificateAuthority::issue(const std::string& subject_id, const Bytes& subject_pk,
                                        Validity validity, RandomSource& rng) {
    if (!scheme_.decode_public(subject_pk))
        throw std::invalid_argument("pki: invalid subject key");
    if (validity.not_before >= validity.not_after)
        throw std::invalid_argument("pki: invalid validity window");

    Certificate cert;
    cert.subject = subject_id;
    cert.subject_pk = subject_pk;
    cert.serial = next_serial_++;
    cert.validity = validity;
    cert.issuer = id_;

    const Bytes tbs = canonical_encode(cert);
    cert.ca_signature = scheme_.encode_signature(scheme_.sign(keypair_.sec, tbs, rng));
    return cert;
}

void TrustStore::add(const std::string& issuer_id, const SigPublicKey& pk) {
    keys_[issuer_id] = pk;
}

const SigPublicKey* TrustStore::find(const std::string& issuer_id) const {
    const auto it = keys_.find(issuer_id);
    return it == keys_.end() ? nullptr : &it->second;
}

const char* to_string(CertVerdict v) {
    switch (v) {
        case CertVerdict::Accept: return "accept";
        case CertVerdict::UnknownIssuer: return "unknown-issuer";
        case CertVerdict::BadSignature: return "bad-signature";
        case CertVerdict::Expired: return "expired";
        case CertVerdict::NotYetValid: return "not-yet-valid";
        case CertVerdict::Malformed: return "malformed";
    }
    return "?";
}

CertVerdict verify_certificate(const SigScheme& scheme, const TrustStore& store,
                               const Certificate& cert, std::int64_t now) {
    if (cert.subject.size() > 256 || cert.validity.not_before >= cert.validity.not_after)
        return CertVerdict::Malformed;
    if (!scheme.decode_public(cert.subject_pk)) return CertVerdict::Malformed;

    const SigPublicKey* ca_pk = store.find(cert.issuer);
    if (!ca_pk) return CertVerdict::UnknownIssuer;

    const auto sig = scheme.decode_signature(cert.ca_signature);
    if (!sig) return CertVerdict::Malformed;
    const Bytes tbs = canonical_encode(cert);
    if (!scheme.verify(*ca_pk, tbs, *sig)) return CertVerdict::BadSignature;

    if (now < cert.validity.not_before) return CertVerdict::NotYetValid;
    if (now > cert.validity.not_after) return CertVerdict::Expired;
    return CertVerdict::Accept;
}

Bytes wrap_file(const char magic[8], std::uint16_t params_id,
                std::span<const std::uint8_t> payload) {
    Bytes out(magic, magic + 8);
    put_u16(out, kFileVersion);
    put_u16(out, params_id);
    out.insert(out.end(), payload.begin(), payload.end());
    return out;
}

std::optional<Bytes> unwrap_file(const char magic[8], std::uint16_t* params_id,
                                 std::span<const std::uint8_t> file) {
    if (file.size() < 12 || std::memcmp(file.data(), magic, 8) != 0) return std::nullopt;
    const std::uint16_t version = std::uint16_t(file[8]) | std::uint16_t(file[9]) << 8;
    if (version != kFileVersion) return std::nullopt;
    if (params_id) *params_id = std::uint16_t(file[10]) | std::uint16_t(file[11]) << 8;
    return Bytes(file.begin() + 12, file.end());
}

Bytes encode_certificate_file(const Certificate& cert, std::uint16_t params_id) {
    Bytes payload = canonical_encode(cert);
    put_field(payload, cert.ca_signature);
    return wrap_file(kMagicCertificate, params_id, payload);
}

std::optional<Certificate> decode_certificate_file(std::span<const std::uint8_t> file,
                                                   std::uint16_t* params_id) {
    const auto payload = unwrap_file(kMagicCertificate, params_id, file);
    if (!payload) return std::nullopt;
    Certificate c;
    Reader r{*payload};
    if (!decode_fields(r, c) || !r.field(c.ca_signature) || r.pos != payload->size())
        return std::nullopt;
    return c;
}

}  // namespace qkdpqc
