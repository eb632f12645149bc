#include "qkdpqc/auth.hpp"

namespace qkdpqc {

const char* to_string(MessageClass c) {
    switch (c) {
        case MessageClass::BasisSift: return "basis-sift";
        case MessageClass::ECVerify: return "ec-verify";
        case MessageClass::PARandomTransfer: return "pa-random-transfer";
        case MessageClass::FinalKeyVerify: return "final-key-verify";
    }
    return "?";
}

const char* to_string(AuthMode m) {
    return m == AuthMode::Pqc ? "pqc" : "psk";
}

const char* to_string(SessionState s) {
    switch (s) {
        case SessionState::Init: return "init";
        case SessionState::CertExchanged: return "cert-exchanged";
        case SessionState::Ready: return "ready";
        case SessionState::Failed: return "failed";
    }
    return "?";
}

const char* to_string(VerifyOutcome v) {
    switch (v) {
        case VerifyOutcome::Accept: return "accept";
        case VerifyOutcome::BadTag: return "bad-tag";
        case VerifyOutcome::Replay: return "replay";
        case VerifyOutcome::StaleCycle: return "stale-cycle";
        case VerifyOutcome::NotReady: return "not-ready";
    }
    return "?";
}

// ---------------------------------------------------------------- wire format

namespace {

void put_be32(Bytes& out, std::uint32_t v) {
    for (int i = 3; i >= 0; --i) out.push_back(std::uint8_t(v >> (8 * i)));
}

void put_be64(Bytes& out, std::uint64_t v) {
    for (int i = 7; i >= 0; --i) out.push_back(std::uint8_t(v >> (8 * i)));
}

}  // namespace

Bytes encode_wire(const AuthenticatedMessage& m) {
    if (m.tag.size() > 0xFFFF) throw std::invalid_argument("auth: tag too long");
    Bytes out;
    out.push_back(std::uint8_t(m.cls));
    put_be64(out, m.cycle);
    put_be32(out, std::uint32_t(m.payload.size()));
    out.insert(out.end(), m.payload.begin(), m.payload.end());
    out.push_back(std::uint8_t(m.tag.size() >> 8));
    out.push_back(std::uint8_t(m.tag.size()));
    out.insert(out.end(), m.tag.begin(), m.tag.end());
    return out;
}

std::optional<AuthenticatedMessage> decode_wire(std::span<const std::uint8_t> in) {
    if (in.size() < 1 + 8 + 4) return std::nullopt;
    AuthenticatedMessage m;
    const std::uint8_t cls = in[0];
    if (cls < 1 || cls > 4) return std::nullopt;
    m.cls = MessageClass(cls);
    std::size_t pos = 1;
    m.cycle = 0;
    for (int i = 0; i < 8; ++i) m.cycle = m.cycle << 8 | in[pos++];
    std::uint32_t plen = 0;
    for (int i = 0; i < 4; ++i) plen = plen << 8 | in[pos++];
    if (pos + plen + 2 > in.size()) return std::nullopt;
    m.payload.assign(in.begin() + pos, in.begin() + pos + plen);
    pos += plen;
    const std::uint16_t tlen = std::uint16_t(in[pos]) << 8 | in[pos + 1];
    pos += 2;
    if (pos + tlen != in.size()) return std::nullopt;
    m.tag.assign(in.begin() + pos, in.begin() + pos + tlen);
    m.digest = sm3(m.payload);
    return m;
}

Bytes encode_mac_tag(const ItsMacTag& t) {
    Bytes out(t.tag.begin(), t.tag.end());
    put_be64(out, t.range_start);
    put_be32(out, t.range_len);
    return out;
}

std::optional<ItsMacTag> decode_mac_tag(std::span<const std::uint8_t> in) {
    if (in.size() != 16 + 8 + 4) return std::nullopt;
    ItsMacTag t;
    std::copy(in.begin(), in.begin() + 16, t.tag.begin());
    t.range_start = 0;
    for (int i = 0; i < 8; ++i) t.range_start = t.range_start << 8 | in[16 + i];
    t.range_len = 0;
    for (int i = 0; i < 4; ++i) t.range_len = t.range_len << 8 | in[24 + i];
    return t;
}

// ---------------------------------------------------------------- AuthSession

AuthSession::AuthSession(std::string id, const SigScheme& scheme, SigKeypair keypair,
                         Certificate own_cert, TrustStore trust, RandomSource& rng,
                         std::int64_t now)
    : mode_(AuthMode::Pqc),
      id_(std::move(id)),
      scheme_(&scheme),
      keypair_(std::move(keypair)),
      own_cert_(std::move(own_cert)),
      trust_(std::move(trust)),
      now_(now),
      rng_(&rng) {
    signer_ = std::make_unique<SigSigner>(scheme, keypair_->sec);
}

AuthSession::AuthSession(std::string id, PresharedKeyPool pool, RandomSource& rng)
    : mode_(AuthMode::PresharedKey), id_(std::move(id)), pool_(std::move(pool)), rng_(&rng) {}

void AuthSession::fail(const std::string& reason) {
    state_ = SessionState::Failed;
    failure_reason_ = reason;
    log("fail", reason);
}

void AuthSession::log(const std::string& event, const std::string& verdict) {
    if (!transcript_enabled_) return;
    transcript_.push_back("t=" + std::to_string(cycle_) + " session=" + id_ +
                          " event=" + event + " verdict=" + verdict);
}

Phase1Message AuthSession::phase1_start() {
    if (state_ != SessionState::Init)
        throw StateViolation("phase1_start in state " + std::string(to_string(state_)));
    self_nonce_ = gen_nonce(*rng_);
    state_ = SessionState::CertExchanged;
    log("phase1-start", "ok");
    Phase1Message m;
    if (mode_ == AuthMode::Pqc) m.cert = *own_cert_;
    m.nonce = self_nonce_;
    return m;
}

void AuthSession::phase1_complete(const Phase1Message& peer) {
    if (state_ != SessionState::CertExchanged)
        throw StateViolation("phase1_complete in state " + std::string(to_string(state_)));

    if (mode_ == AuthMode::Pqc) {
        if (!peer.cert) {
            fail("cert-invalid: missing certificate");
            return;
        }
        const CertVerdict v = verify_certificate(*scheme_, *trust_, *peer.cert, now_);
        if (v != CertVerdict::Accept) {
            fail(std::string("cert-invalid: ") + to_string(v));
            return;
        }
        const auto peer_pk = scheme_->decode_public(peer.cert->subject_pk);
        if (!peer_pk) {
            fail("cert-invalid: malformed");
            return;
        }
        peer_verifier_.emplace(*scheme_, *peer_pk);
    }
    peer_nonce_ = peer.nonce;
    state_ = SessionState::Ready;
    log("phase1-complete", "ready");
}

Bytes AuthSession::tag_input(const Nonce& nonce, const Digest256& digest) const {
    // R || D, R being the verifier's nonce
    Bytes in(nonce.bytes.begin(), nonce.bytes.end());
    in.insert(in.end(), digest.begin(), digest.end());
    return in;
}

AuthenticatedMessage AuthSession::authenticate_message(MessageClass cls,
                                                       std::span<const std::uint8_t> payload) {
    if (state_ != SessionState::Ready) throw NotReady();

    AuthenticatedMessage m;
    m.cls = cls;
    m.cycle = cycle_;
    m.payload.assign(payload.begin(), payload.end());
    m.digest = sm3(payload);

    const Bytes in = tag_input(peer_nonce_, m.digest);
    if (mode_ == AuthMode::Pqc) {
        m.tag = scheme_->encode_signature(signer_->sign(in, *rng_));
    } else {
        m.tag = encode_mac_tag(mac_tag(*pool_, in));
    }
    log(std::string("tag ") + to_string(cls), "ok");
    return m;
}

VerifyOutcome AuthSession::verify_message(const AuthenticatedMessage& m) {
    if (state_ != SessionState::Ready) return VerifyOutcome::NotReady;
    if (m.cycle != cycle_) {
        log(std::string("verify ") + to_string(m.cls), "stale-cycle");
        return VerifyOutcome::StaleCycle;
    }

    const auto key = std::make_tuple(self_nonce_.bytes, std::uint8_t(m.cls), m.cycle);
    if (ledger_.count(key)) {
        log(std::string("verify ") + to_string(m.cls), "replay");
        return VerifyOutcome::Replay;
    }

    const Digest256 d = sm3(m.payload);
    if (d != m.digest) {
        log(std::string("verify ") + to_string(m.cls), "bad-tag");
        return VerifyOutcome::BadTag;
    }
    const Bytes in = tag_input(self_nonce_, d);

    bool ok = false;
    if (mode_ == AuthMode::Pqc) {
        ok = peer_verifier_ && peer_verifier_->verify_bytes(in, m.tag);
    } else {
        const auto tag = decode_mac_tag(m.tag);
        ok = tag && mac_verify(*pool_, in, *tag) == MacResult::Accept;
    }
    if (!ok) {
        log(std::string("verify ") + to_string(m.cls), "bad-tag");
        return VerifyOutcome::BadTag;
    }

    ledger_.insert(key);
    log(std::string("verify ") + to_string(m.cls), "accept");
    return VerifyOutcome::Accept;
}

Nonce AuthSession::refresh_nonce() {
    self_nonce_ = gen_nonce(*rng_);
    return self_nonce_;
}

void AuthSession::set_peer_nonce(const Nonce& n) { peer_nonce_ = n; }

// ---------------------------------------------------------------- cycle runner

CycleVerdict run_auth_cycle(AuthSession& a, AuthSession& b,
                            const std::array<Bytes, 4>& payloads_a_to_b,
                            const std::array<Bytes, 4>& payloads_b_to_a) {
    if (a.state() != SessionState::Ready || b.state() != SessionState::Ready)
        throw StateViolation("run_auth_cycle requires both sessions Ready");

    CycleVerdict verdict;
    verdict.pass = true;

    for (std::size_t i = 0; i < kAllMessageClasses.size(); ++i) {
        const MessageClass cls = kAllMessageClasses[i];

        const AuthenticatedMessage ab = a.authenticate_message(cls, payloads_a_to_b[i]);
        const VerifyOutcome vb = b.verify_message(ab);
        if (vb != VerifyOutcome::Accept) {
            verdict.pass = false;
            verdict.failing_class = cls;
            verdict.failing_direction = "a->b";
            verdict.reason = to_string(vb);
            break;
        }

        const AuthenticatedMessage ba = b.authenticate_message(cls, payloads_b_to_a[i]);
        const VerifyOutcome va = a.verify_message(ba);
        if (va != VerifyOutcome::Accept) {
            verdict.pass = false;
            verdict.failing_class = cls;
            verdict.failing_direction = "b->a";
            verdict.reason = to_string(va);
            break;
        }
    }

    // fresh nonces for the next cycle, piggybacked on the final message
    const Nonce na = a.refresh_nonce();
    const Nonce nb = b.refresh_nonce();
    a.set_peer_nonce(nb);
    b.set_peer_nonce(na);
    a.advance_cycle();
    b.advance_cycle();
    return verdict;
}

}  // namespace qkdpqc
