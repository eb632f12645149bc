#ifndef QKDPQC_QKD_MODEL_HPP
#define QKDPQC_QKD_MODEL_HPP

#include <cstdint>
#include <stdexcept>
#include <vector>

#include "qkdpqc/random.hpp"

namespace qkdpqc {

/// Decoy-state BB84 link over fiber: weak coherent pulses at three
/// intensities (signal mu, decoy nu, vacuum), Poissonian photon statistics,
/// dark counts and misalignment, vacuum+weak decoy bounds on the
/// single-photon contribution.
struct LinkParams {
    double length_km = 0.0;
    double atten_db_per_km = 0.21;
    double pulse_rate_hz = 625e6;
    double mu = 0.6;           // signal intensity
    double nu = 0.2;           // decoy intensity
    double vacuum = 0.0;       // vacuum-state intensity
    double det_eff = 0.1;      // detector efficiency
    double dark = 1e-8;        // dark count probability per gate
    double misalign = 0.01;    // optical misalignment error probability
    double sift_q = 0.5;       // basis-sift factor
    double ec_f = 1.16;        // error-correction efficiency
    double block_n = 1e6;      // finite-key block size

    void validate() const;  // throws std::invalid_argument
};

struct ChannelEstimate {
    double eta = 0.0;       // overall transmittance (channel * detector)
    double q_mu = 0.0;      // signal gain
    double q_nu = 0.0;      // decoy gain
    double e_mu = 0.0;      // signal QBER
    double e_nu = 0.0;      // decoy QBER
    double q1_lower = 0.0;  // single-photon gain lower bound
    double e1_upper = 0.0;  // single-photon error upper bound
};

ChannelEstimate channel_estimate(const LinkParams& p);

double binary_entropy(double x);

/// Multiplicative penalty for statistical fluctuations at block size N.
/// A stand-in for a rigorous finite-key bound; tends to 1 as N grows.
double finite_key_factor(double block_n);

/// Asymptotic GLLP-style rate times the finite-key factor, clamped at 0.
/// Bits per second.
double secure_key_rate(const LinkParams& p);

/// Expected sifted-key QBER when a fraction of pulses is intercepted and
/// resent in a random basis (each such pulse errs with probability 1/4).
double intercept_resend_qber(const LinkParams& p, double attack_fraction);

// --- polarization drift and per-cycle simulation ----------------------------

struct DriftParams {
    double day_sigma = 0.0;    // misalignment random-walk std per sqrt(s), day
    double night_sigma = 0.0;  // same, night
    double cap = 0.05;         // offset ceiling
    double day_start_h = 8.0;
    double day_end_h = 18.0;
    double qber_threshold = 0.03;
    double timer_s = 1800.0;          // feedback timer
    double feedback_duration_s = 30.0;
};

struct DriftState {
    double offset = 0.0;              // extra misalignment on top of baseline
    double elapsed_s = 0.0;           // since last feedback
    double feedback_remaining_s = 0.0;
};

bool is_day(const DriftParams& dp, double epoch_s);

/// Advances the bounded random walk by dt; offset stays in [0, cap].
DriftState step_drift(const DriftState& d, const DriftParams& dp, double dt,
                      double epoch_s, RandomSource& rng);

struct CycleResult {
    std::uint64_t cycle = 0;
    double time_s = 0.0;
    std::uint64_t sifted_bits = 0;
    double qber = 0.0;              // measured on this cycle's sifted bits
    std::uint64_t key_bits = 0;     // zero when auth failed or feedback active
    bool auth_pass = true;
    bool feedback_active = false;
};

/// One 1 s cycle: samples sifted bits and QBER at the drifted misalignment,
/// emits key at the secure rate, and triggers polarization feedback when the
/// QBER reaches the threshold or the timer expires. Feedback takes effect on
/// the following cycle and zeroes key output while active.
std::pair<CycleResult, DriftState> simulate_cycle(const LinkParams& p, const DriftParams& dp,
                                                  const DriftState& d, bool auth_pass,
                                                  std::uint64_t cycle, double epoch_s,
                                                  RandomSource& rng, double attack_fraction = 0.0);

struct RunOptions {
    std::uint64_t cycles = 0;
    double start_epoch_s = 0.0;
    std::uint64_t fail_from = 0;  // force auth-fail verdicts in [fail_from, fail_to)
    std::uint64_t fail_to = 0;
    double attack_fraction = 0.0;
};

std::vector<CycleResult> run_link(const LinkParams& p, const DriftParams& dp,
                                  const RunOptions& opt, RandomSource& rng);

}  // namespace qkdpqc

#endif
