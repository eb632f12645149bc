#include "qkdpqc/ring.hpp"

#include <bit>
#include <stdexcept>

namespace qkdpqc {

namespace {

std::uint64_t mul_mod(std::uint64_t a, std::uint64_t b, std::uint64_t q) {
    return (a * b) % q;  // q < 2^31, so a*b < 2^62
}

std::vector<std::uint64_t> prime_factors(std::uint64_t x) {
    std::vector<std::uint64_t> fs;
    for (std::uint64_t p = 2; p * p <= x; ++p) {
        if (x % p == 0) {
            fs.push_back(p);
            while (x % p == 0) x /= p;
        }
    }
    if (x > 1) fs.push_back(x);
    return fs;
}

/// Smallest generator of Z_q^* for prime q.
std::uint64_t find_generator(std::uint64_t q) {
    const auto fs = prime_factors(q - 1);
    for (std::uint64_t g = 2; g < q; ++g) {
        bool ok = true;
        for (std::uint64_t p : fs) {
            if (pow_mod(g, (q - 1) / p, q) == 1) {
                ok = false;
                break;
            }
        }
        if (ok) return g;
    }
    throw std::logic_error("no generator found");
}

}  // namespace

std::uint64_t pow_mod(std::uint64_t base, std::uint64_t exp, std::uint64_t mod) {
    std::uint64_t r = 1;
    base %= mod;
    while (exp > 0) {
        if (exp & 1) r = mul_mod(r, base, mod);
        base = mul_mod(base, base, mod);
        exp >>= 1;
    }
    return r;
}

NttContext::NttContext(std::uint32_t n, std::uint32_t q) : n_(n), q_(q) {
    if (n == 0 || (n & (n - 1)) != 0) throw std::invalid_argument("ring: n must be a power of two");
    if (q >= (1u << 31)) throw std::invalid_argument("ring: q too large");
    if ((std::uint64_t(q) - 1) % (2ull * n) != 0)
        throw std::invalid_argument("ring: q != 1 mod 2n");
    log_n_ = std::uint32_t(std::countr_zero(n));

    const std::uint64_t g = find_generator(q);
    const std::uint64_t psi = pow_mod(g, (q - 1) / (2ull * n), q);       // primitive 2n-th root
    const std::uint64_t psi_inv = pow_mod(psi, 2ull * n - 1, q);
    const std::uint64_t n_inv = pow_mod(n, q - 2, q);
    const std::uint64_t omega = mul_mod(psi, psi, q);                    // primitive n-th root
    const std::uint64_t omega_inv = mul_mod(psi_inv, psi_inv, q);

    psi_pow_.resize(n);
    psi_inv_pow_.resize(n);
    omega_pow_.resize(n);
    omega_inv_pow_.resize(n);
    std::uint64_t p1 = 1, p2 = 1, p3 = 1, p4 = 1;
    for (std::uint32_t i = 0; i < n; ++i) {
        psi_pow_[i] = std::uint32_t(p1);
        psi_inv_pow_[i] = std::uint32_t(mul_mod(p2, n_inv, q));
        omega_pow_[i] = std::uint32_t(p3);
        omega_inv_pow_[i] = std::uint32_t(p4);
        p1 = mul_mod(p1, psi, q);
        p2 = mul_mod(p2, psi_inv, q);
        p3 = mul_mod(p3, omega, q);
        p4 = mul_mod(p4, omega_inv, q);
    }

    bitrev_.resize(n);
    for (std::uint32_t i = 0; i < n; ++i) {
        std::uint32_t r = 0;
        for (std::uint32_t b = 0; b < log_n_; ++b) r |= ((i >> b) & 1u) << (log_n_ - 1 - b);
        bitrev_[i] = r;
    }
}

namespace {

void cyclic_ntt(Poly& a, std::uint32_t n, std::uint32_t q, std::uint32_t log_n,
                const std::vector<std::uint32_t>& root_pow,
                const std::vector<std::uint32_t>& bitrev) {
    for (std::uint32_t i = 0; i < n; ++i) {
        const std::uint32_t j = bitrev[i];
        if (i < j) std::swap(a[i], a[j]);
    }
    for (std::uint32_t s = 1; s <= log_n; ++s) {
        const std::uint32_t m = 1u << s;
        const std::uint32_t stride = n >> s;  // index step into root_pow
        for (std::uint32_t k = 0; k < n; k += m) {
            for (std::uint32_t j = 0; j < m / 2; ++j) {
                const std::uint64_t w = root_pow[j * stride];
                const std::uint64_t t = (w * a[k + j + m / 2]) % q;
                const std::uint32_t u = a[k + j];
                a[k + j] = std::uint32_t((u + t) % q);
                a[k + j + m / 2] = std::uint32_t((u + q - t) % q);
            }
        }
    }
}

}  // namespace

void NttContext::forward(Poly& a) const {
    if (a.size() != n_) throw std::invalid_argument("ring: size mismatch");
    for (std::uint32_t i = 0; i < n_; ++i)
        a[i] = std::uint32_t((std::uint64_t(a[i]) * psi_pow_[i]) % q_);
    cyclic_ntt(a, n_, q_, log_n_, omega_pow_, bitrev_);
}

void NttContext::inverse(Poly& a) const {
    if (a.size() != n_) throw std::invalid_argument("ring: size mismatch");
    cyclic_ntt(a, n_, q_, log_n_, omega_inv_pow_, bitrev_);
    for (std::uint32_t i = 0; i < n_; ++i)
        a[i] = std::uint32_t((std::uint64_t(a[i]) * psi_inv_pow_[i]) % q_);
}

Poly NttContext::pointwise(const Poly& a, const Poly& b) const {
    Poly c(n_);
    for (std::uint32_t i = 0; i < n_; ++i)
        c[i] = std::uint32_t((std::uint64_t(a[i]) * b[i]) % q_);
    return c;
}

void NttContext::pointwise_accumulate(Poly& acc, const Poly& a, const Poly& b) const {
    for (std::uint32_t i = 0; i < n_; ++i) {
        const std::uint64_t t = (std::uint64_t(a[i]) * b[i]) % q_;
        acc[i] = std::uint32_t((acc[i] + t) % q_);
    }
}

Poly NttContext::multiply(const Poly& a, const Poly& b) const {
    Poly fa = a, fb = b;
    forward(fa);
    forward(fb);
    Poly c = pointwise(fa, fb);
    inverse(c);
    return c;
}

}  // namespace qkdpqc
