#include "qkdpqc/qkd_model.hpp"

#include <algorithm>
#include <cmath>

namespace qkdpqc {

namespace {

constexpr double kBackgroundError = 0.5;  // dark counts are random

double clamp01(double x) { return std::clamp(x, 0.0, 1.0); }

}  // namespace

void LinkParams::validate() const {
    if (!(length_km >= 0)) throw std::invalid_argument("link: length must be >= 0");
    if (!(atten_db_per_km >= 0)) throw std::invalid_argument("link: attenuation must be >= 0");
    if (!(pulse_rate_hz > 0)) throw std::invalid_argument("link: pulse rate must be > 0");
    if (!(mu > nu && nu > 0)) throw std::invalid_argument("link: need mu > nu > 0");
    if (!(vacuum >= 0 && vacuum < nu)) throw std::invalid_argument("link: need 0 <= vacuum < nu");
    if (!(det_eff >= 0 && det_eff <= 1)) throw std::invalid_argument("link: det_eff in [0,1]");
    if (!(dark >= 0 && dark <= 1)) throw std::invalid_argument("link: dark in [0,1]");
    if (!(misalign >= 0 && misalign <= 1)) throw std::invalid_argument("link: misalign in [0,1]");
    if (!(sift_q > 0 && sift_q <= 1)) throw std::invalid_argument("link: sift_q in (0,1]");
    if (!(ec_f >= 1)) throw std::invalid_argument("link: ec_f must be >= 1");
    if (!(block_n > 0)) throw std::invalid_argument("link: block_n must be > 0");
}

ChannelEstimate channel_estimate(const LinkParams& p) {
    p.validate();
    ChannelEstimate c;
    const double channel = std::pow(10.0, -p.atten_db_per_km * p.length_km / 10.0);
    c.eta = p.det_eff * channel;
    const double y0 = p.dark;

    auto gain = [&](double intensity) { return y0 + 1.0 - std::exp(-c.eta * intensity); };
    auto err_gain = [&](double intensity) {
        return kBackgroundError * y0 + p.misalign * (1.0 - std::exp(-c.eta * intensity));
    };

    c.q_mu = clamp01(gain(p.mu));
    c.q_nu = clamp01(gain(p.nu));
    c.e_mu = c.q_mu > 0 ? clamp01(err_gain(p.mu) / c.q_mu) : 0.0;
    c.e_nu = c.q_nu > 0 ? clamp01(err_gain(p.nu) / c.q_nu) : 0.0;

    // vacuum + weak decoy bounds (two-intensity estimate of the
    // single-photon yield and error)
    const double mu = p.mu, nu = p.nu;
    double y1 = mu / (mu * nu - nu * nu) *
                (c.q_nu * std::exp(nu) - c.q_mu * std::exp(mu) * nu * nu / (mu * mu) -
                 (mu * mu - nu * nu) / (mu * mu) * y0);
    y1 = clamp01(y1);
    c.q1_lower = clamp01(y1 * mu * std::exp(-mu));

    if (y1 * nu > 0) {
        const double e1 =
            (c.e_nu * c.q_nu * std::exp(nu) - kBackgroundError * y0) / (y1 * nu);
        c.e1_upper = std::clamp(e1, 0.0, 0.5);
    } else {
        c.e1_upper = 0.5;  // no single-photon estimate: assume the worst
    }
    return c;
}

double binary_entropy(double x) {
    x = clamp01(x);
    if (x == 0.0 || x == 1.0) return 0.0;
    return -x * std::log2(x) - (1.0 - x) * std::log2(1.0 - x);
}

double finite_key_factor(double block_n) {
    if (!(block_n > 0)) throw std::invalid_argument("finite_key_factor: block_n must be > 0");
    return std::max(0.0, 1.0 - 10.0 / std::sqrt(block_n));
}

double secure_key_rate(const LinkParams& p) {
    const ChannelEstimate c = channel_estimate(p);
    const double per_pulse = c.q1_lower * (1.0 - binary_entropy(c.e1_upper)) -
                             c.q_mu * p.ec_f * binary_entropy(c.e_mu);
    return p.pulse_rate_hz * p.sift_q * std::max(0.0, per_pulse) * finite_key_factor(p.block_n);
}

double intercept_resend_qber(const LinkParams& p, double attack_fraction) {
    if (!(attack_fraction >= 0 && attack_fraction <= 1))
        throw std::invalid_argument("intercept_resend_qber: fraction in [0,1]");
    const double baseline = channel_estimate(p).e_mu;
    return attack_fraction * 0.25 + (1.0 - attack_fraction) * baseline;
}

// --- drift and cycles --------------------------------------------------------

bool is_day(const DriftParams& dp, double epoch_s) {
    const double hour = std::fmod(epoch_s / 3600.0, 24.0);
    return hour >= dp.day_start_h && hour < dp.day_end_h;
}

DriftState step_drift(const DriftState& d, const DriftParams& dp, double dt, double epoch_s,
                      RandomSource& rng) {
    if (!(dt > 0)) throw std::invalid_argument("step_drift: dt must be > 0");
    DriftState n = d;
    const double sigma = is_day(dp, epoch_s) ? dp.day_sigma : dp.night_sigma;
    n.offset += gaussian(rng) * sigma * std::sqrt(dt);
    n.offset = std::min(std::fabs(n.offset), dp.cap);  // reflect at zero
    n.elapsed_s += dt;
    return n;
}

std::pair<CycleResult, DriftState> simulate_cycle(const LinkParams& p, const DriftParams& dp,
                                                  const DriftState& d, bool auth_pass,
                                                  std::uint64_t cycle, double epoch_s,
                                                  RandomSource& rng, double attack_fraction) {
    LinkParams pe = p;
    pe.misalign = std::clamp(p.misalign + d.offset, 0.0, 1.0);
    if (attack_fraction > 0)
        pe.misalign = attack_fraction * 0.25 + (1.0 - attack_fraction) * pe.misalign;
    const ChannelEstimate est = channel_estimate(pe);

    CycleResult r;
    r.cycle = cycle;
    r.time_s = epoch_s;
    r.auth_pass = auth_pass;
    r.feedback_active = d.feedback_remaining_s > 0;

    const double mean_sifted = p.pulse_rate_hz * p.sift_q * est.q_mu;  // 1 s cycle
    const double sifted =
        std::max(0.0, std::round(mean_sifted + gaussian(rng) * std::sqrt(mean_sifted)));
    r.sifted_bits = std::uint64_t(sifted);
    if (sifted > 0) {
        const double mean_err = sifted * est.e_mu;
        const double err = std::clamp(
            std::round(mean_err + gaussian(rng) * std::sqrt(mean_err * (1.0 - est.e_mu))), 0.0,
            sifted);
        r.qber = std::min(err / sifted, 0.5);
    }

    if (auth_pass && !r.feedback_active) r.key_bits = std::uint64_t(secure_key_rate(pe));

    DriftState n = d;
    if (r.feedback_active) {
        // realignment in progress: offset held at baseline, timer reset
        n.feedback_remaining_s = std::max(0.0, n.feedback_remaining_s - 1.0);
        n.offset = 0.0;
        n.elapsed_s = 0.0;
    } else {
        n = step_drift(n, dp, 1.0, epoch_s, rng);
        if (r.qber >= dp.qber_threshold || n.elapsed_s >= dp.timer_s) {
            n.feedback_remaining_s = dp.feedback_duration_s;
            n.offset = 0.0;
            n.elapsed_s = 0.0;
        }
    }
    return {r, n};
}

std::vector<CycleResult> run_link(const LinkParams& p, const DriftParams& dp,
                                  const RunOptions& opt, RandomSource& rng) {
    std::vector<CycleResult> out;
    out.reserve(opt.cycles);
    DriftState d;
    for (std::uint64_t i = 0; i < opt.cycles; ++i) {
        const bool auth_pass = !(i >= opt.fail_from && i < opt.fail_to);
        auto [r, nd] = simulate_cycle(p, dp, d, auth_pass, i, opt.start_epoch_s + double(i), rng,
                                      opt.attack_fraction);
        out.push_back(r);
        d = nd;
    }
    return out;
}

}  // namespace qkdpqc
