#ifndef QKDPQC_AUTH_HPP
#define QKDPQC_AUTH_HPP

#include <array>
#include <cstdint>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <tuple>
#include <vector>

#include "qkdpqc/mac.hpp"
#include "qkdpqc/pki.hpp"
#include "qkdpqc/sig.hpp"

namespace qkdpqc {

enum class AuthMode { Pqc, PresharedKey };

/// The four QKD classical message classes that require authentication.
enum class MessageClass : std::uint8_t {
    BasisSift = 1,
    ECVerify = 2,
    PARandomTransfer = 3,
    FinalKeyVerify = 4,
};

inline constexpr std::array<MessageClass, 4> kAllMessageClasses = {
    MessageClass::BasisSift, MessageClass::ECVerify, MessageClass::PARandomTransfer,
    MessageClass::FinalKeyVerify};

const char* to_string(MessageClass c);
const char* to_string(AuthMode m);

struct AuthenticatedMessage {
    MessageClass cls = MessageClass::BasisSift;
    std::uint64_t cycle = 0;
    Bytes payload;
    Digest256 digest{};  // digest(payload)
    Bytes tag;           // LatticeSignature (PQC) or ItsMacTag (PresharedKey), encoded

    bool operator==(const AuthenticatedMessage&) const = default;
};

/// Wire format: 1-byte class, 8-byte cycle, 4-byte payload length, payload,
/// 2-byte tag length, tag. Big-endian integers.
Bytes encode_wire(const AuthenticatedMessage& m);
std::optional<AuthenticatedMessage> decode_wire(std::span<const std::uint8_t> in);

Bytes encode_mac_tag(const ItsMacTag& t);
std::optional<ItsMacTag> decode_mac_tag(std::span<const std::uint8_t> in);

enum class SessionState { Init, CertExchanged, Ready, Failed };

enum class VerifyOutcome { Accept, BadTag, Replay, StaleCycle, NotReady };

const char* to_string(SessionState s);
const char* to_string(VerifyOutcome v);

class StateViolation : public std::runtime_error {
public:
    explicit StateViolation(const std::string& what) : std::runtime_error("auth: " + what) {}
};

class NotReady : public std::runtime_error {
public:
    NotReady() : std::runtime_error("auth: session not ready") {}
};

struct Phase1Message {
    std::optional<Certificate> cert;  // present in PQC mode
    Nonce nonce;
};

/// Per-peer two-phase authentication session (one side). PQC mode exchanges
/// CA-issued certificates and signs R_peer || digest; PresharedKey mode tags
/// the same bytes with the Wegman-Carter MAC. Single-owner mutable state.
class AuthSession {
public:
    /// PQC mode.
    AuthSession(std::string id, const SigScheme& scheme, SigKeypair keypair,
                Certificate own_cert, TrustStore trust, RandomSource& rng,
                std::int64_t now = 0);
    /// PresharedKey mode. The pool must be synchronized with the peer's copy.
    AuthSession(std::string id, PresharedKeyPool pool, RandomSource& rng);

    AuthMode mode() const { return mode_; }
    const std::string& id() const { return id_; }
    SessionState state() const { return state_; }
    const std::string& failure_reason() const { return failure_reason_; }
    std::uint64_t cycle() const { return cycle_; }
    const Nonce& own_nonce() const { return self_nonce_; }
    const Nonce& peer_nonce() const { return peer_nonce_; }
    PresharedKeyPool* pool() { return pool_ ? &*pool_ : nullptr; }

    /// Phase 1, first half: emit own certificate (PQC) and a fresh nonce.
    /// Init -> CertExchanged. A second call is a StateViolation.
    Phase1Message phase1_start();

    /// Phase 1, second half: verify the peer's certificate against the trust
    /// store and record its nonce. CertExchanged -> Ready (or Failed).
    void phase1_complete(const Phase1Message& peer);

    /// Tag payload for the peer: tag covers R_peer || digest(payload).
    /// Requires Ready; PresharedKey mode may throw PoolExhausted.
    AuthenticatedMessage authenticate_message(MessageClass cls, std::span<const std::uint8_t> payload);

    /// Check a received message against R_self || digest and the replay
    /// ledger. Accepting adds a ledger entry.
    VerifyOutcome verify_message(const AuthenticatedMessage& m);

    /// Per-cycle nonce refresh (piggybacked on the cycle's final message).
    Nonce refresh_nonce();
    void set_peer_nonce(const Nonce& n);
    void advance_cycle() { ++cycle_; }

    /// Optional transcript sink: one structured line per protocol event.
    void enable_transcript() { transcript_enabled_ = true; }
    const std::vector<std::string>& transcript() const { return transcript_; }

private:
    void fail(const std::string& reason);
    void log(const std::string& event, const std::string& verdict);
    Bytes tag_input(const Nonce& nonce, const Digest256& digest) const;

    AuthMode mode_;
    std::string id_;
    SessionState state_ = SessionState::Init;
    std::string failure_reason_;

    // PQC mode
    const SigScheme* scheme_ = nullptr;
    std::optional<SigKeypair> keypair_;
    std::optional<Certificate> own_cert_;
    std::optional<TrustStore> trust_;
    std::optional<SigVerifier> peer_verifier_;
    std::unique_ptr<SigSigner> signer_;
    std::int64_t now_ = 0;

    // PresharedKey mode
    std::optional<PresharedKeyPool> pool_;

    RandomSource* rng_;
    Nonce self_nonce_{};
    Nonce peer_nonce_{};
    std::uint64_t cycle_ = 0;
    std::set<std::tuple<std::array<std::uint8_t, 32>, std::uint8_t, std::uint64_t>> ledger_;

    bool transcript_enabled_ = false;
    std::vector<std::string> transcript_;
};

struct CycleVerdict {
    bool pass = false;
    std::optional<MessageClass> failing_class;
    std::string failing_direction;  // "a->b" or "b->a"
    std::string reason;
};

/// One 1 s authentication cycle: each side authenticates all four message
/// classes to the other (two-way, eight verifications). Fresh nonces are
/// exchanged for the next cycle. Payload bytes are delivered unmodified.
CycleVerdict run_auth_cycle(AuthSession& a, AuthSession& b,
                            const std::array<Bytes, 4>& payloads_a_to_b,
                            const std::array<Bytes, 4>& payloads_b_to_a);

}  // namespace qkdpqc

#endif
