#ifndef QKDPQC_RING_HPP
#define QKDPQC_RING_HPP

#include <cstdint>
#include <vector>

namespace qkdpqc {

/// Polynomial in Z_q[x]/(x^n + 1), coefficients in [0, q).
using Poly = std::vector<std::uint32_t>;

std::uint64_t pow_mod(std::uint64_t base, std::uint64_t exp, std::uint64_t mod);

/// Negacyclic NTT over Z_q[x]/(x^n + 1). Requires n a power of two and
/// q prime with q ≡ 1 (mod 2n). Twiddle tables are built once per (n, q).
class NttContext {
public:
    NttContext(std::uint32_t n, std::uint32_t q);

    std::uint32_t n() const { return n_; }
    std::uint32_t q() const { return q_; }

    void forward(Poly& a) const;   // coefficient -> evaluation domain
    void inverse(Poly& a) const;   // evaluation -> coefficient domain

    Poly pointwise(const Poly& a, const Poly& b) const;
    void pointwise_accumulate(Poly& acc, const Poly& a, const Poly& b) const;

    /// Negacyclic product in the coefficient domain (forward/pointwise/inverse).
    Poly multiply(const Poly& a, const Poly& b) const;

private:
    std::uint32_t n_, q_;
    std::uint32_t log_n_;
    std::vector<std::uint32_t> psi_pow_;       // psi^i, psi a primitive 2n-th root
    std::vector<std::uint32_t> psi_inv_pow_;   // psi^{-i} * n^{-1} folded in
    std::vector<std::uint32_t> omega_pow_;     // stage twiddles for the cyclic NTT
    std::vector<std::uint32_t> omega_inv_pow_;
    std::vector<std::uint32_t> bitrev_;
};

}  // namespace qkdpqc

#endif
