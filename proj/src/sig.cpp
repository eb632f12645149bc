#include "qkdpqc/sig.hpp"

#include <bit>
#include <cmath>
#include <cstring>

namespace qkdpqc {

namespace {

// ---------------------------------------------------------------- utilities

/// SM3 in counter mode over an arbitrary seed; deterministic byte stream.
class Xof {
public:
    explicit Xof(Bytes seed) : seed_(std::move(seed)) {}

    std::uint8_t byte() {
        if (pos_ == 32) refill();
        return block_[pos_++];
    }

    void fill(std::uint8_t* out, std::size_t len) {
        for (std::size_t i = 0; i < len; ++i) out[i] = byte();
    }

    std::uint32_t bits(unsigned width) {  // width <= 24
        std::uint32_t v = 0;
        const unsigned nb = (width + 7) / 8;
        for (unsigned i = 0; i < nb; ++i) v |= std::uint32_t(byte()) << (8 * i);
        return v & ((1u << width) - 1);
    }

private:
    void refill() {
        Sm3 h;
        h.update(seed_.data(), seed_.size());
        std::uint8_t ctr[8];
        for (int i = 0; i < 8; ++i) ctr[i] = std::uint8_t(counter_ >> (8 * i));
        h.update(ctr, 8);
        block_ = h.finish();
        pos_ = 0;
        ++counter_;
    }

    Bytes seed_;
    std::uint64_t counter_ = 0;
    Digest256 block_{};
    std::size_t pos_ = 32;
};

class BitWriter {
public:
    explicit BitWriter(Bytes& out) : out_(out) {}

    void put(std::uint32_t v, unsigned width) {
        for (unsigned i = 0; i < width; ++i) {
            if (bit_ == 0) out_.push_back(0);
            if ((v >> i) & 1u) out_.back() |= std::uint8_t(1u << bit_);
            bit_ = (bit_ + 1) % 8;
        }
    }

    void align() { bit_ = 0; }

private:
    Bytes& out_;
    unsigned bit_ = 0;
};

class BitReader {
public:
    explicit BitReader(std::span<const std::uint8_t> in) : in_(in) {}

    bool get(std::uint32_t& v, unsigned width) {
        v = 0;
        for (unsigned i = 0; i < width; ++i) {
            const std::size_t byte = pos_ / 8;
            if (byte >= in_.size()) return false;
            if ((in_[byte] >> (pos_ % 8)) & 1u) v |= 1u << i;
            ++pos_;
        }
        return true;
    }

    void align() { pos_ = (pos_ + 7) / 8 * 8; }
    std::size_t byte_pos() const { return pos_ / 8; }

private:
    std::span<const std::uint8_t> in_;
    std::size_t pos_ = 0;
};

inline std::int32_t centered(std::uint32_t x, std::uint32_t q) {
    return std::int32_t(x) > std::int32_t(q / 2) ? std::int32_t(x) - std::int32_t(q)
                                                 : std::int32_t(x);
}

std::uint32_t inf_norm(const Poly& a, std::uint32_t q) {
    std::uint32_t m = 0;
    for (std::uint32_t x : a) m = std::max(m, std::uint32_t(std::abs(centered(x, q))));
    return m;
}

std::uint32_t inf_norm(const std::vector<Poly>& v, std::uint32_t q) {
    std::uint32_t m = 0;
    for (const Poly& a : v) m = std::max(m, inf_norm(a, q));
    return m;
}

/// x = x1 * 2^d + x0 with x0 in (-2^(d-1), 2^(d-1)].
void power2round(std::uint32_t x, std::uint32_t d, std::uint32_t& x1, std::int32_t& x0) {
    const std::uint32_t half = 1u << (d - 1);
    const std::uint32_t mask = (1u << d) - 1;
    std::int32_t r0 = std::int32_t(x & mask);
    if (r0 > std::int32_t(half)) r0 -= std::int32_t(1u << d);
    x1 = (x - std::uint32_t(r0)) >> d;
    x0 = r0;
}

/// Decompose(x, alpha = 2*gamma2): x = x1*alpha + x0, x0 in (-gamma2, gamma2],
/// with the q-1 wraparound folded into x1 = 0.
void decompose(std::uint32_t x, std::uint32_t q, std::uint32_t gamma2,
               std::uint32_t& x1, std::int32_t& x0) {
    const std::uint32_t alpha = 2 * gamma2;
    std::int32_t r0 = std::int32_t(x % alpha);
    if (r0 > std::int32_t(gamma2)) r0 -= std::int32_t(alpha);
    if (x - std::uint32_t(r0) == q - 1) {
        x1 = 0;
        x0 = r0 - 1;
    } else {
        x1 = (x - std::uint32_t(r0)) / alpha;
        x0 = r0;
    }
}

std::uint32_t high_bits(std::uint32_t x, std::uint32_t q, std::uint32_t gamma2) {
    std::uint32_t x1;
    std::int32_t x0;
    decompose(x, q, gamma2, x1, x0);
    return x1;
}

std::uint32_t use_hint(bool hint, std::uint32_t x, std::uint32_t q, std::uint32_t gamma2) {
    std::uint32_t x1;
    std::int32_t x0;
    decompose(x, q, gamma2, x1, x0);
    if (!hint) return x1;
    const std::uint32_t m = (q - 1) / (2 * gamma2);
    return x0 > 0 ? (x1 + 1) % m : (x1 + m - 1) % m;
}

bool is_prime(std::uint32_t x) {
    if (x < 2) return false;
    for (std::uint32_t p = 2; std::uint64_t(p) * p <= x; ++p)
        if (x % p == 0) return false;
    return true;
}

unsigned width_of(std::uint32_t max_value) { return std::bit_width(max_value); }

}  // namespace

// ---------------------------------------------------------------- SigParams

void SigParams::validate() const {
    auto fail = [](const char* msg) { throw std::invalid_argument(std::string("SigParams: ") + msg); };
    if (n == 0 || (n & (n - 1)) != 0) fail("n must be a power of two");
    if (!is_prime(q)) fail("q must be prime");
    if ((std::uint64_t(q) - 1) % (2ull * n) != 0) fail("q != 1 mod 2n");
    if (k == 0 || l == 0) fail("module ranks must be positive");
    if (k > 255 || l > 255) fail("module ranks too large");
    if (eta == 0 || tau == 0) fail("eta and tau must be positive");
    if (tau > 64 || tau > n) fail("tau must be <= min(64, n)");
    if (beta != tau * eta) fail("beta must equal tau*eta");
    if (gamma1 == 0 || (gamma1 & (gamma1 - 1)) != 0) fail("gamma1 must be a power of two");
    if (gamma1 <= beta) fail("gamma1 must exceed beta");
    if (gamma2 == 0 || (q - 1) % (2 * gamma2) != 0) fail("2*gamma2 must divide q-1");
    if (gamma2 <= beta) fail("gamma2 must exceed beta");
    if (high_bits_range() < 2) fail("(q-1)/(2*gamma2) must be >= 2");
    if (d == 0 || d >= width_of(q)) fail("bad d");
    if (omega == 0 || omega > std::uint64_t(k) * n) fail("bad omega");
    if (max_restarts == 0) fail("max_restarts must be positive");
}

std::size_t SigParams::public_key_bytes() const {
    const unsigned w_t1 = width_of((q - 1) >> d);
    return 32 + (std::size_t(k) * n * w_t1 + 7) / 8;
}

std::size_t SigParams::secret_key_bytes() const {
    const unsigned w_s = width_of(2 * eta);
    const std::size_t s_bytes = (std::size_t(l + k) * n * w_s + 7) / 8;
    const std::size_t t0_bytes = (std::size_t(k) * n * d + 7) / 8;
    return 32 + s_bytes + t0_bytes + public_key_bytes();
}

std::size_t SigParams::signature_bytes() const {
    const unsigned w_z = width_of(2 * (gamma1 - beta - 1));
    return 32 + (std::size_t(l) * n * w_z + 7) / 8 + (std::size_t(k) * n + 7) / 8;
}

const SigParams& SigParams::reference() {
    static const SigParams p = [] {
        SigParams p;
        p.name = "reference";
        p.id = 1;
        p.n = 256;
        p.q = 8380417;
        p.k = 4;
        p.l = 4;
        p.eta = 2;
        p.tau = 39;
        p.beta = 78;
        p.gamma1 = 1u << 17;
        p.gamma2 = (p.q - 1) / 88;
        p.d = 13;
        p.omega = 80;
        p.validate();
        return p;
    }();
    return p;
}

const SigParams& SigParams::desk() {
    static const SigParams p = [] {
        SigParams p;
        p.name = "desk";
        p.id = 2;
        p.n = 64;
        p.q = 12289;
        p.k = 2;
        p.l = 2;
        p.eta = 2;
        p.tau = 8;
        p.beta = 16;
        p.gamma1 = 1u << 14;
        p.gamma2 = (p.q - 1) / 4;
        p.d = 4;
        p.omega = 16;
        p.validate();
        return p;
    }();
    return p;
}

const SigParams* SigParams::by_id(std::uint16_t id) {
    if (id == reference().id) return &reference();
    if (id == desk().id) return &desk();
    return nullptr;
}

// ---------------------------------------------------------------- SigScheme

SigScheme::SigScheme(const SigParams& params) : p_(params), ntt_(params.n, params.q) {
    p_.validate();
}

std::vector<Poly> SigScheme::expand_a(const std::array<std::uint8_t, 32>& rho) const {
    const unsigned w_q = width_of(p_.q);
    std::vector<Poly> a(std::size_t(p_.k) * p_.l);
    for (std::uint32_t i = 0; i < p_.k; ++i) {
        for (std::uint32_t j = 0; j < p_.l; ++j) {
            Bytes seed(rho.begin(), rho.end());
            seed.push_back(std::uint8_t(j));
            seed.push_back(std::uint8_t(i));
            Xof xof(std::move(seed));
            Poly& poly = a[std::size_t(i) * p_.l + j];
            poly.resize(p_.n);
            for (std::uint32_t c = 0; c < p_.n;) {
                const std::uint32_t v = xof.bits(w_q);
                if (v < p_.q) poly[c++] = v;
            }
        }
    }
    return a;  // already treated as NTT-domain samples (uniform either way)
}

namespace {

Poly expand_small(Xof& xof, std::uint32_t n, std::uint32_t eta, std::uint32_t q) {
    const std::uint32_t m = 2 * eta + 1;
    const std::uint32_t lim = 256 - 256 % m;
    Poly poly(n);
    for (std::uint32_t c = 0; c < n;) {
        const std::uint8_t b = xof.byte();
        if (b >= lim) continue;
        const std::uint32_t v = b % m;  // [0, 2*eta]
        poly[c++] = (q + eta - v) % q;  // centered in [-eta, eta]
    }
    return poly;
}

Poly sample_in_ball(const std::array<std::uint8_t, 32>& c_tilde, std::uint32_t n,
                    std::uint32_t tau, std::uint32_t q) {
    Xof xof(Bytes(c_tilde.begin(), c_tilde.end()));
    std::uint64_t signs = 0;
    for (int i = 0; i < 8; ++i) signs |= std::uint64_t(xof.byte()) << (8 * i);

    Poly c(n, 0);
    for (std::uint32_t i = n - tau; i < n; ++i) {
        std::uint8_t j;
        do {
            j = xof.byte();
        } while (j > i);
        c[i] = c[j];
        c[j] = (signs & 1) ? q - 1 : 1;
        signs >>= 1;
    }
    return c;
}

Bytes pack_w1(const std::vector<Poly>& w1, const SigParams& p) {
    const unsigned w = width_of(p.high_bits_range() - 1);
    Bytes out;
    BitWriter bw(out);
    for (const Poly& poly : w1)
        for (std::uint32_t x : poly) bw.put(x, w);
    return out;
}

}  // namespace

SigKeypair SigScheme::keygen(const std::array<std::uint8_t, 32>& seed) const {
    Bytes s0(seed.begin(), seed.end());
    s0.push_back(0x00);
    Bytes s1b(seed.begin(), seed.end());
    s1b.push_back(0x01);
    const Digest256 rho_d = sm3(s0);
    const Digest256 sigma = sm3(s1b);

    SigSecretKey sk;
    std::copy(rho_d.begin(), rho_d.end(), sk.rho.begin());

    sk.s1.resize(p_.l);
    sk.s2.resize(p_.k);
    for (std::uint32_t i = 0; i < p_.l + p_.k; ++i) {
        Bytes seed_i(sigma.begin(), sigma.end());
        seed_i.push_back(std::uint8_t(i & 0xFF));
        seed_i.push_back(std::uint8_t(i >> 8));
        Xof xof(std::move(seed_i));
        Poly s = expand_small(xof, p_.n, p_.eta, p_.q);
        if (i < p_.l)
            sk.s1[i] = std::move(s);
        else
            sk.s2[i - p_.l] = std::move(s);
    }

    // t = A*s1 + s2
    const std::vector<Poly> a_hat = expand_a(sk.rho);
    std::vector<Poly> s1_hat = sk.s1;
    for (Poly& poly : s1_hat) ntt_.forward(poly);

    SigPublicKey pk;
    pk.rho = sk.rho;
    pk.t1.resize(p_.k);
    sk.t0.resize(p_.k);
    for (std::uint32_t i = 0; i < p_.k; ++i) {
        Poly acc(p_.n, 0);
        for (std::uint32_t j = 0; j < p_.l; ++j)
            ntt_.pointwise_accumulate(acc, a_hat[std::size_t(i) * p_.l + j], s1_hat[j]);
        ntt_.inverse(acc);
        Poly t(p_.n);
        for (std::uint32_t c = 0; c < p_.n; ++c)
            t[c] = std::uint32_t((std::uint64_t(acc[c]) + sk.s2[i][c]) % p_.q);

        pk.t1[i].resize(p_.n);
        sk.t0[i].resize(p_.n);
        for (std::uint32_t c = 0; c < p_.n; ++c) {
            std::uint32_t hi;
            std::int32_t lo;
            power2round(t[c], p_.d, hi, lo);
            pk.t1[i][c] = hi;
            sk.t0[i][c] = std::uint32_t((lo + std::int32_t(p_.q)) % std::int32_t(p_.q));
        }
    }

    sk.pub = pk;
    return SigKeypair{std::move(pk), std::move(sk)};
}

double SigScheme::z_accept_probability() const {
    const double per_coeff = (2.0 * (p_.gamma1 - p_.beta) - 1.0) / (2.0 * p_.gamma1);
    return std::pow(per_coeff, double(p_.l) * p_.n);
}

// ---------------------------------------------------------------- SigSigner

SigSigner::SigSigner(const SigScheme& scheme, SigSecretKey sk)
    : scheme_(scheme), sk_(std::move(sk)) {
    const auto& ntt = scheme_.ring();
    a_hat_ = scheme_.expand_a(sk_.rho);
    s1_hat_ = sk_.s1;
    s2_hat_ = sk_.s2;
    t0_hat_ = sk_.t0;
    for (Poly& p : s1_hat_) ntt.forward(p);
    for (Poly& p : s2_hat_) ntt.forward(p);
    for (Poly& p : t0_hat_) ntt.forward(p);
}

LatticeSignature SigSigner::sign(std::span<const std::uint8_t> msg, RandomSource& rng,
                                 SignStats* stats) const {
    const SigParams& p = scheme_.params();
    const auto& ntt = scheme_.ring();
    const unsigned w_y = width_of(2 * p.gamma1 - 1);
    const unsigned y_bytes = (w_y + 7) / 8;
    const std::uint32_t gamma1mb = p.gamma1 - p.beta;

    for (std::uint32_t attempt = 0; attempt < p.max_restarts; ++attempt) {
        if (stats) ++stats->attempts;

        // masking vector y, coeffs uniform in [-gamma1+1, gamma1]; kept as
        // integers because gamma1 may exceed q/2 and the norm check below
        // must see true magnitudes, not mod-q representatives
        std::vector<std::vector<std::int32_t>> y(p.l, std::vector<std::int32_t>(p.n));
        std::vector<Poly> y_hat(p.l, Poly(p.n));
        for (std::uint32_t j = 0; j < p.l; ++j) {
            for (std::uint32_t c = 0; c < p.n; ++c) {
                std::uint8_t raw[4] = {0, 0, 0, 0};
                rng.fill(raw, y_bytes);
                std::uint32_t v = 0;
                for (unsigned i = 0; i < y_bytes; ++i) v |= std::uint32_t(raw[i]) << (8 * i);
                v &= (1u << w_y) - 1;  // [0, 2*gamma1)
                y[j][c] = std::int32_t(p.gamma1) - std::int32_t(v);
                y_hat[j][c] = std::uint32_t((y[j][c] % std::int32_t(p.q) + std::int32_t(p.q)) %
                                            std::int32_t(p.q));
            }
        }
        for (Poly& poly : y_hat) ntt.forward(poly);

        // w = A*y
        std::vector<Poly> w(p.k);
        for (std::uint32_t i = 0; i < p.k; ++i) {
            Poly acc(p.n, 0);
            for (std::uint32_t j = 0; j < p.l; ++j)
                ntt.pointwise_accumulate(acc, a_hat_[std::size_t(i) * p.l + j], y_hat[j]);
            ntt.inverse(acc);
            w[i] = std::move(acc);
        }

        std::vector<Poly> w1(p.k, Poly(p.n));
        for (std::uint32_t i = 0; i < p.k; ++i)
            for (std::uint32_t c = 0; c < p.n; ++c)
                w1[i][c] = high_bits(w[i][c], p.q, p.gamma2);

        // challenge c = H(high-bits(w) || message)
        Sm3 h;
        const Bytes w1p = pack_w1(w1, p);
        h.update(w1p.data(), w1p.size());
        h.update(msg.data(), msg.size());
        const Digest256 c_tilde = h.finish();

        Poly c = sample_in_ball(c_tilde, p.n, p.tau, p.q);
        Poly c_hat = c;
        ntt.forward(c_hat);

        // z = y + c*s1, rejection on integer magnitudes (|c*s1| <= beta < q/2,
        // so the centered mod-q value of c*s1 is its true integer value)
        std::vector<Poly> z(p.l, Poly(p.n));
        bool z_ok = true;
        for (std::uint32_t j = 0; j < p.l; ++j) {
            Poly cs1 = ntt.pointwise(c_hat, s1_hat_[j]);
            ntt.inverse(cs1);
            for (std::uint32_t cc = 0; cc < p.n; ++cc) {
                const std::int64_t zc = std::int64_t(y[j][cc]) + centered(cs1[cc], p.q);
                if (std::llabs(zc) >= std::int64_t(gamma1mb)) z_ok = false;
                z[j][cc] = std::uint32_t((zc % std::int64_t(p.q) + std::int64_t(p.q)) %
                                         std::int64_t(p.q));
            }
        }
        if (!z_ok) {
            if (stats) ++stats->z_rejects;
            continue;
        }

        // r = w - c*s2 must keep its low bits small
        std::vector<Poly> r(p.k, Poly(p.n));
        bool low_ok = true;
        for (std::uint32_t i = 0; i < p.k; ++i) {
            Poly cs2 = ntt.pointwise(c_hat, s2_hat_[i]);
            ntt.inverse(cs2);
            for (std::uint32_t cc = 0; cc < p.n; ++cc)
                r[i][cc] = std::uint32_t((std::uint64_t(w[i][cc]) + p.q - cs2[cc]) % p.q);
            for (std::uint32_t cc = 0; cc < p.n && low_ok; ++cc) {
                std::uint32_t hi;
                std::int32_t lo;
                decompose(r[i][cc], p.q, p.gamma2, hi, lo);
                if (std::uint32_t(std::abs(lo)) >= p.gamma2 - p.beta) low_ok = false;
            }
        }
        if (!low_ok) {
            if (stats) ++stats->low_bits_rejects;
            continue;
        }

        // c*t0 small, hints sparse
        std::vector<Poly> ct0(p.k);
        bool t0_ok = true;
        for (std::uint32_t i = 0; i < p.k; ++i) {
            ct0[i] = ntt.pointwise(c_hat, t0_hat_[i]);
            ntt.inverse(ct0[i]);
            if (inf_norm(ct0[i], p.q) >= p.gamma2) t0_ok = false;
        }
        if (!t0_ok) {
            if (stats) ++stats->t0_rejects;
            continue;
        }

        Bytes hints((std::size_t(p.k) * p.n + 7) / 8, 0);
        std::uint32_t hint_count = 0;
        for (std::uint32_t i = 0; i < p.k; ++i) {
            for (std::uint32_t cc = 0; cc < p.n; ++cc) {
                // verifier will see v = r + c*t0
                const std::uint32_t v =
                    std::uint32_t((std::uint64_t(r[i][cc]) + ct0[i][cc]) % p.q);
                const bool hint = high_bits(v, p.q, p.gamma2) != w1[i][cc];
                if (hint) {
                    const std::size_t bit = std::size_t(i) * p.n + cc;
                    hints[bit / 8] |= std::uint8_t(1u << (bit % 8));
                    ++hint_count;
                }
            }
        }
        if (hint_count > p.omega) {
            if (stats) ++stats->hint_rejects;
            continue;
        }

        LatticeSignature sig;
        sig.c_tilde = c_tilde;
        sig.z = std::move(z);
        sig.hints = std::move(hints);
        return sig;
    }
    throw AbortLimitExceeded();
}

// -------------------------------------------------------------- SigVerifier

SigVerifier::SigVerifier(const SigScheme& scheme, SigPublicKey pk)
    : scheme_(scheme), pk_(std::move(pk)) {
    const SigParams& p = scheme_.params();
    const auto& ntt = scheme_.ring();
    a_hat_ = scheme_.expand_a(pk_.rho);
    t1_shift_hat_.resize(p.k);
    for (std::uint32_t i = 0; i < p.k; ++i) {
        Poly t(p.n);
        for (std::uint32_t c = 0; c < p.n; ++c)
            t[c] = std::uint32_t((std::uint64_t(pk_.t1[i][c]) << p.d) % p.q);
        ntt.forward(t);
        t1_shift_hat_[i] = std::move(t);
    }
}

bool SigVerifier::verify(std::span<const std::uint8_t> msg, const LatticeSignature& sig) const {
    const SigParams& p = scheme_.params();
    const auto& ntt = scheme_.ring();

    if (sig.z.size() != p.l) return false;
    for (const Poly& poly : sig.z)
        if (poly.size() != p.n) return false;
    if (sig.hints.size() != (std::size_t(p.k) * p.n + 7) / 8) return false;
    if (inf_norm(sig.z, p.q) >= p.gamma1 - p.beta) return false;

    std::uint32_t hint_count = 0;
    for (std::uint8_t b : sig.hints) hint_count += std::uint32_t(std::popcount(b));
    if (hint_count > p.omega) return false;

    Poly c = sample_in_ball(sig.c_tilde, p.n, p.tau, p.q);
    Poly c_hat = c;
    ntt.forward(c_hat);

    std::vector<Poly> z_hat = sig.z;
    for (Poly& poly : z_hat) ntt.forward(poly);

    std::vector<Poly> w1(p.k, Poly(p.n));
    for (std::uint32_t i = 0; i < p.k; ++i) {
        Poly acc(p.n, 0);
        for (std::uint32_t j = 0; j < p.l; ++j)
            ntt.pointwise_accumulate(acc, a_hat_[std::size_t(i) * p.l + j], z_hat[j]);
        const Poly ct1 = ntt.pointwise(c_hat, t1_shift_hat_[i]);
        for (std::uint32_t cc = 0; cc < p.n; ++cc)
            acc[cc] = std::uint32_t((std::uint64_t(acc[cc]) + p.q - ct1[cc]) % p.q);
        ntt.inverse(acc);
        for (std::uint32_t cc = 0; cc < p.n; ++cc) {
            const std::size_t bit = std::size_t(i) * p.n + cc;
            const bool hint = (sig.hints[bit / 8] >> (bit % 8)) & 1u;
            w1[i][cc] = use_hint(hint, acc[cc], p.q, p.gamma2);
        }
    }

    Sm3 h;
    const Bytes w1p = pack_w1(w1, p);
    h.update(w1p.data(), w1p.size());
    h.update(msg.data(), msg.size());
    return h.finish() == sig.c_tilde;
}

bool SigVerifier::verify_bytes(std::span<const std::uint8_t> msg,
                               std::span<const std::uint8_t> sig_bytes) const {
    const auto sig = scheme_.decode_signature(sig_bytes);
    return sig && verify(msg, *sig);
}

// ------------------------------------------------------------ serialization
// Little-endian fixed-width coefficient packing; sections byte-aligned.

namespace {

void pack_polys(BitWriter& bw, const std::vector<Poly>& polys, unsigned width,
                auto&& to_value) {
    for (const Poly& poly : polys)
        for (std::uint32_t x : poly) bw.put(std::uint32_t(to_value(x)), width);
    bw.align();
}

bool unpack_polys(BitReader& br, std::vector<Poly>& polys, std::uint32_t count,
                  std::uint32_t n, unsigned width, auto&& from_value) {
    polys.assign(count, Poly(n));
    for (Poly& poly : polys) {
        for (std::uint32_t c = 0; c < n; ++c) {
            std::uint32_t v;
            if (!br.get(v, width)) return false;
            std::int64_t x;
            if (!from_value(v, x)) return false;
            poly[c] = std::uint32_t(x);
        }
    }
    br.align();
    return true;
}

}  // namespace

Bytes SigScheme::encode_public(const SigPublicKey& pk) const {
    Bytes out(pk.rho.begin(), pk.rho.end());
    BitWriter bw(out);
    const unsigned w_t1 = width_of((p_.q - 1) >> p_.d);
    pack_polys(bw, pk.t1, w_t1, [](std::uint32_t x) { return x; });
    return out;
}

std::optional<SigPublicKey> SigScheme::decode_public(std::span<const std::uint8_t> in) const {
    if (in.size() != p_.public_key_bytes()) return std::nullopt;
    SigPublicKey pk;
    std::copy(in.begin(), in.begin() + 32, pk.rho.begin());
    BitReader br(in.subspan(32));
    const unsigned w_t1 = width_of((p_.q - 1) >> p_.d);
    const std::uint32_t t1_max = (p_.q - 1) >> p_.d;
    auto from = [&](std::uint32_t v, std::int64_t& x) {
        if (v > t1_max) return false;
        x = v;
        return true;
    };
    if (!unpack_polys(br, pk.t1, p_.k, p_.n, w_t1, from)) return std::nullopt;
    return pk;
}

Bytes SigScheme::encode_secret(const SigSecretKey& sk) const {
    Bytes out(sk.rho.begin(), sk.rho.end());
    BitWriter bw(out);
    const unsigned w_s = width_of(2 * p_.eta);
    const std::uint32_t q = p_.q, eta = p_.eta;
    auto small = [q, eta](std::uint32_t x) {
        return std::uint32_t(std::int32_t(eta) - centered(x, q));  // [0, 2*eta]
    };
    pack_polys(bw, sk.s1, w_s, small);
    pack_polys(bw, sk.s2, w_s, small);
    const std::uint32_t half = 1u << (p_.d - 1);
    pack_polys(bw, sk.t0, p_.d, [q, half](std::uint32_t x) {
        return std::uint32_t(std::int32_t(half) - centered(x, q));  // [0, 2^d - 1]
    });
    const Bytes pub = encode_public(sk.pub);
    out.insert(out.end(), pub.begin(), pub.end());
    return out;
}

std::optional<SigSecretKey> SigScheme::decode_secret(std::span<const std::uint8_t> in) const {
    if (in.size() != p_.secret_key_bytes()) return std::nullopt;
    SigSecretKey sk;
    std::copy(in.begin(), in.begin() + 32, sk.rho.begin());
    BitReader br(in.subspan(32, in.size() - 32 - p_.public_key_bytes()));
    const unsigned w_s = width_of(2 * p_.eta);
    const std::uint32_t q = p_.q, eta = p_.eta;
    auto small = [q, eta](std::uint32_t v, std::int64_t& x) {
        if (v > 2 * eta) return false;
        x = (std::int64_t(q) + std::int64_t(eta) - std::int64_t(v)) % q;
        return true;
    };
    if (!unpack_polys(br, sk.s1, p_.l, p_.n, w_s, small)) return std::nullopt;
    if (!unpack_polys(br, sk.s2, p_.k, p_.n, w_s, small)) return std::nullopt;
    const std::uint32_t half = 1u << (p_.d - 1);
    auto t0v = [q, half](std::uint32_t v, std::int64_t& x) {
        x = (std::int64_t(q) + std::int64_t(half) - std::int64_t(v)) % q;
        return true;
    };
    if (!unpack_polys(br, sk.t0, p_.k, p_.n, p_.d, t0v)) return std::nullopt;
    const auto pub = decode_public(in.subspan(in.size() - p_.public_key_bytes()));
    if (!pub) return std::nullopt;
    sk.pub = *pub;
    return sk;
}

Bytes SigScheme::encode_signature(const LatticeSignature& sig) const {
    Bytes out(sig.c_tilde.begin(), sig.c_tilde.end());
    BitWriter bw(out);
    const std::uint32_t zmax = p_.gamma1 - p_.beta - 1;
    const unsigned w_z = width_of(2 * zmax);
    const std::uint32_t q = p_.q;
    pack_polys(bw, sig.z, w_z, [q, zmax](std::uint32_t x) {
        return std::uint32_t(std::int32_t(zmax) - centered(x, q));  // [0, 2*zmax]
    });
    out.insert(out.end(), sig.hints.begin(), sig.hints.end());
    return out;
}

std::optional<LatticeSignature> SigScheme::decode_signature(
    std::span<const std::uint8_t> in) const {
    if (in.size() != p_.signature_bytes()) return std::nullopt;
    LatticeSignature sig;
    std::copy(in.begin(), in.begin() + 32, sig.c_tilde.begin());
    const std::size_t hint_bytes = (std::size_t(p_.k) * p_.n + 7) / 8;
    BitReader br(in.subspan(32, in.size() - 32 - hint_bytes));
    const std::uint32_t zmax = p_.gamma1 - p_.beta - 1;
    const unsigned w_z = width_of(2 * zmax);
    const std::uint32_t q = p_.q;
    auto from = [q, zmax](std::uint32_t v, std::int64_t& x) {
        if (v > 2 * zmax) return false;
        x = (std::int64_t(q) + std::int64_t(zmax) - std::int64_t(v)) % q;
        return true;
    };
    if (!unpack_polys(br, sig.z, p_.l, p_.n, w_z, from)) return std::nullopt;
    sig.hints.assign(in.end() - hint_bytes, in.end());
    // unused padding bits of the hint bitmap must be zero
    const std::uint32_t tail_bits = std::uint32_t(hint_bytes * 8 - std::size_t(p_.k) * p_.n);
    if (tail_bits > 0 && (sig.hints.back() >> (8 - tail_bits)) != 0) return std::nullopt;
    return sig;
}

LatticeSignature SigScheme::sign(const SigSecretKey& sk, std::span<const std::uint8_t> msg,
                                 RandomSource& rng, SignStats* stats) const {
    return SigSigner(*this, sk).sign(msg, rng, stats);
}

bool SigScheme::verify(const SigPublicKey& pk, std::span<const std::uint8_t> msg,
                       const LatticeSignature& sig) const {
    return SigVerifier(*this, pk).verify(msg, sig);
}

}  // namespace qkdpqc
