// Acceptance gate: twelve end-to-end criteria, one pass/fail line each.
// Exits nonzero if any criterion fails.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <string>

#include "qkdpqc/files.hpp"

using namespace qkdpqc;

namespace {

const std::string kData = QKDPQC_DATA_DIR;

int g_failures = 0;

void criterion(int idx, const std::string& name, const std::function<bool()>& fn) {
    bool ok = false;
    std::string note;
    try {
        ok = fn();
    } catch (const std::exception& e) {
        note = std::string(" (exception: ") + e.what() + ")";
    }
    std::printf("[%s] criterion %2d: %s%s\n", ok ? "PASS" : "FAIL", idx, name.c_str(),
                note.c_str());
    std::fflush(stdout);
    if (!ok) ++g_failures;
}

std::array<std::uint8_t, 32> seed_from(std::uint64_t x) {
    std::array<std::uint8_t, 32> s{};
    for (int i = 0; i < 8; ++i) s[i] = std::uint8_t(x >> (8 * i));
    return s;
}

// --- criterion 1 -------------------------------------------------------------

bool combinatorics() {
    return preshared_pairs_required(100) == 4950 && preshared_pairs_required(10) == 45 &&
           join_cost(10, 2, AuthMode::PresharedKey) == 21 && join_cost(10, 2, AuthMode::Pqc) == 2;
}

// --- criterion 2 -------------------------------------------------------------

bool mitm_exclusion() {
    const SigScheme scheme(SigParams::desk());
    const auto ca_kp = scheme.keygen(seed_from(1));
    CertificateAuthority ca("CA", scheme, ca_kp);
    TrustStore trust;
    trust.add("CA", ca.public_key());
    SeededRandom rng_a(2), rng_b(3), rng_e(4);

    const auto kp_a = scheme.keygen(seed_from(10));
    const auto kp_e = scheme.keygen(seed_from(11));
    const Certificate cert_a = ca.issue("alice", scheme.encode_public(kp_a.pub), {0, 1 << 30}, rng_a);
    const auto evil_kp = scheme.keygen(seed_from(12));
    CertificateAuthority evil("EVIL", scheme, evil_kp);
    const Certificate cert_e = evil.issue("alice", scheme.encode_public(kp_e.pub), {0, 1 << 30}, rng_e);

    auto fresh_bob = [&]() {
        const auto kp_b = scheme.keygen(seed_from(20));
        const Certificate cert_b =
            ca.issue("bob", scheme.encode_public(kp_b.pub), {0, 1 << 30}, rng_b);
        return AuthSession("bob", scheme, kp_b, cert_b, trust, rng_b);
    };
    auto ready_pair = [&]() {
        AuthSession a("alice", scheme, kp_a, cert_a, trust, rng_a);
        AuthSession b = fresh_bob();
        const Phase1Message ma = a.phase1_start();
        const Phase1Message mb = b.phase1_start();
        a.phase1_complete(mb);
        b.phase1_complete(ma);
        return std::make_pair(std::move(a), std::move(b));
    };

    // exhaustive single-field substitutions
    {  // certificate from an untrusted issuer
        AuthSession b = fresh_bob();
        (void)b.phase1_start();
        b.phase1_complete({cert_e, gen_nonce(rng_e)});
        if (b.state() != SessionState::Failed) return false;
    }
    {  // public key swapped inside a legitimate certificate
        AuthSession b = fresh_bob();
        (void)b.phase1_start();
        Certificate c = cert_a;
        c.subject_pk = scheme.encode_public(kp_e.pub);
        b.phase1_complete({c, gen_nonce(rng_e)});
        if (b.state() != SessionState::Failed) return false;
    }
    {  // nonce substitution
        auto [a, b] = ready_pair();
        b.set_peer_nonce(gen_nonce(rng_e));
        const auto m = b.authenticate_message(MessageClass::BasisSift, Bytes{1});
        if (a.verify_message(m) == VerifyOutcome::Accept) return false;
    }
    {  // payload substitution (digest recomputed by the adversary)
        auto [a, b] = ready_pair();
        auto m = a.authenticate_message(MessageClass::BasisSift, Bytes{1, 2, 3});
        m.payload = Bytes{4, 5, 6};
        m.digest = sm3(m.payload);
        if (b.verify_message(m) == VerifyOutcome::Accept) return false;
    }
    {  // tag substitution
        auto [a, b] = ready_pair();
        auto m = a.authenticate_message(MessageClass::BasisSift, Bytes{1, 2, 3});
        rng_e.fill(m.tag.data(), m.tag.size());
        if (b.verify_message(m) == VerifyOutcome::Accept) return false;
    }

    // 10^4 random multi-field mutations
    auto [a, b] = ready_pair();
    std::mt19937_64 rng(5);
    for (int t = 0; t < 10000; ++t) {
        Bytes payload(1 + rng() % 32);
        for (auto& x : payload) x = std::uint8_t(rng());
        AuthenticatedMessage m = a.authenticate_message(MessageClass(1 + t % 4), payload);
        bool mutated = false;
        if (rng() % 2) {
            m.payload.push_back(std::uint8_t(rng()));
            m.digest = sm3(m.payload);
            mutated = true;
        }
        if (rng() % 2) {
            m.tag[rng() % m.tag.size()] ^= std::uint8_t(1 + rng() % 255);
            mutated = true;
        }
        if (!mutated) m.cycle += 1 + rng() % 9;
        if (b.verify_message(m) == VerifyOutcome::Accept) return false;
    }
    return true;
}

// --- criterion 3 -------------------------------------------------------------

bool intercept_resend() {
    std::mt19937_64 rng(6);
    auto coin = [&]() { return int(rng() & 1); };
    auto mc_qber = [&](double fraction) {
        const int pulses = 1000000;
        int errors = 0;
        std::uniform_real_distribution<double> u(0.0, 1.0);
        for (int i = 0; i < pulses; ++i) {
            const int bit = coin();
            const int basis = coin();
            int arriving = bit;
            if (u(rng) < fraction) {
                const int eve_basis = coin();
                int eve_bit = bit;
                if (eve_basis != basis) eve_bit = coin();
                arriving = eve_bit;
                if (eve_basis != basis) arriving = coin();  // Bob re-measures in Alice's basis
            }
            if (arriving != bit) ++errors;
        }
        return double(errors) / pulses;
    };

    const double full = mc_qber(1.0);
    if (std::fabs(full - 0.25) > 0.005) return false;

    const double fracs[5] = {0.1, 0.3, 0.5, 0.7, 0.9};
    double sx = 0, sy = 0, sxx = 0, sxy = 0, syy = 0;
    for (double f : fracs) {
        const double y = mc_qber(f);
        sx += f;
        sy += y;
        sxx += f * f;
        sxy += f * y;
        syy += y * y;
    }
    const double n = 5;
    const double num = n * sxy - sx * sy;
    const double r2 = num * num / ((n * sxx - sx * sx) * (n * syy - sy * sy));
    return r2 > 0.99;
}

// --- criterion 4 -------------------------------------------------------------

bool replay_defense() {
    const SigScheme scheme(SigParams::desk());
    const auto ca_kp = scheme.keygen(seed_from(30));
    CertificateAuthority ca("CA", scheme, ca_kp);
    TrustStore trust;
    trust.add("CA", ca.public_key());
    SeededRandom rng_a(31), rng_b(32);
    const auto kp_a = scheme.keygen(seed_from(33));
    const auto kp_b = scheme.keygen(seed_from(34));
    AuthSession a("alice", scheme, kp_a,
                  ca.issue("alice", scheme.encode_public(kp_a.pub), {0, 1 << 30}, rng_a), trust,
                  rng_a);
    AuthSession b("bob", scheme, kp_b,
                  ca.issue("bob", scheme.encode_public(kp_b.pub), {0, 1 << 30}, rng_b), trust,
                  rng_b);
    const Phase1Message ma = a.phase1_start();
    const Phase1Message mb = b.phase1_start();
    a.phase1_complete(mb);
    b.phase1_complete(ma);

    std::mt19937_64 rng(35);
    for (int t = 0; t < 10000; ++t) {
        Bytes payload(1 + rng() % 24);
        for (auto& x : payload) x = std::uint8_t(rng());
        const auto m = a.authenticate_message(MessageClass(1 + rng() % 4), payload);
        if (b.verify_message(m) != VerifyOutcome::Accept) {
            // same (class, cycle) slot may already be used this cycle; that is
            // itself the replay ledger working
            if (b.verify_message(m) == VerifyOutcome::Accept) return false;
        } else if (b.verify_message(m) == VerifyOutcome::Accept) {
            return false;  // redelivery accepted: replay defense failed
        }
        if (rng() % 3 == 0) {
            const Nonce na = a.refresh_nonce();
            const Nonce nb = b.refresh_nonce();
            a.set_peer_nonce(nb);
            b.set_peer_nonce(na);
            a.advance_cycle();
            b.advance_cycle();
        }
    }
    return true;
}

// --- criterion 5 -------------------------------------------------------------

bool signature_correctness() {
    std::mt19937_64 msg_rng(40);
    for (const SigParams* p : {&SigParams::desk(), &SigParams::reference()}) {
        const SigScheme scheme(*p);
        const auto kp = scheme.keygen(seed_from(p->id));
        const SigSigner signer(scheme, kp.sec);
        const SigVerifier verifier(scheme, kp.pub);
        SeededRandom rng(41);
        for (int t = 0; t < 1000; ++t) {
            Bytes m(1 + msg_rng() % 96);
            for (auto& x : m) x = std::uint8_t(msg_rng());
            if (!verifier.verify(m, signer.sign(m, rng))) return false;
        }

        // A*s1 + s2 == t1*2^d + t0 against schoolbook products
        auto a_hat = scheme.expand_a(kp.sec.rho);
        for (std::uint32_t i = 0; i < p->k; ++i) {
            Poly t(p->n, 0);
            for (std::uint32_t j = 0; j < p->l; ++j) {
                Poly a_ij = a_hat[std::size_t(i) * p->l + j];
                scheme.ring().inverse(a_ij);
                for (std::uint32_t x = 0; x < p->n; ++x)
                    for (std::uint32_t y = 0; y < p->n; ++y) {
                        const std::uint64_t prod =
                            std::uint64_t(a_ij[x]) * kp.sec.s1[j][y] % p->q;
                        const std::uint32_t k2 = x + y;
                        if (k2 < p->n)
                            t[k2] = std::uint32_t((t[k2] + prod) % p->q);
                        else
                            t[k2 - p->n] = std::uint32_t((t[k2 - p->n] + p->q - prod) % p->q);
                    }
            }
            for (std::uint32_t c = 0; c < p->n; ++c) {
                const std::uint64_t lhs = (std::uint64_t(t[c]) + kp.sec.s2[i][c]) % p->q;
                const std::uint64_t rhs =
                    ((std::uint64_t(kp.pub.t1[i][c]) << p->d) + kp.sec.t0[i][c]) % p->q;
                if (lhs != rhs) return false;
            }
        }
    }

    // exhaustive single-bit tampering of a 64-byte message
    const SigScheme scheme(SigParams::desk());
    const auto kp = scheme.keygen(seed_from(42));
    const SigSigner signer(scheme, kp.sec);
    const SigVerifier verifier(scheme, kp.pub);
    SeededRandom rng(43);
    Bytes m(64, 0x3C);
    const Bytes sig = scheme.encode_signature(signer.sign(m, rng));
    if (!verifier.verify_bytes(m, sig)) return false;
    for (std::size_t bit = 0; bit < m.size() * 8; ++bit) {
        m[bit / 8] ^= std::uint8_t(1u << (bit % 8));
        if (verifier.verify_bytes(m, sig)) return false;
        m[bit / 8] ^= std::uint8_t(1u << (bit % 8));
    }
    return true;
}

// --- criterion 6 -------------------------------------------------------------

bool mode_equivalence() {
    const Topology topo = parse_topology(read_file(kData + "/allpass4.topo"));
    SessionPlan plan = parse_plan(read_file(kData + "/ring.plan"));
    plan.default_duration_s = 30;
    const LinkParams link = parse_params(read_file(kData + "/lab-cal.params")).link;

    plan.mode = AuthMode::Pqc;
    const std::string pqc = report_csv(run_scenario(topo, plan, link, 2024));
    plan.mode = AuthMode::PresharedKey;
    const std::string psk = report_csv(run_scenario(topo, plan, link, 2024));
    return !pqc.empty() && pqc == psk;
}

// --- criterion 7 -------------------------------------------------------------

bool key_discard() {
    const ParamsFile cal = parse_params(read_file(kData + "/lab-cal.params"));
    DriftParams quiet;  // no drift: isolate the auth effect
    RunOptions honest;
    honest.cycles = 600;
    RunOptions forced = honest;
    forced.fail_from = 100;
    forced.fail_to = 160;
    SeededRandom r1(50), r2(50);
    const auto base = run_link(cal.link, quiet, honest, r1);
    const auto failed = run_link(cal.link, quiet, forced, r2);
    for (std::size_t i = 0; i < 600; ++i) {
        if (i >= 100 && i < 160) {
            if (failed[i].key_bits != 0 || failed[i].auth_pass) return false;
        } else if (failed[i].key_bits != base[i].key_bits || !failed[i].auth_pass) {
            return false;
        }
    }
    return true;
}

// --- criterion 8 -------------------------------------------------------------

bool sweep_shape() {
    LinkParams p = parse_params(read_file(kData + "/lab-cal.params")).link;
    std::vector<double> lens, lograte;
    double prev = 1e18;
    for (double L = 10; L <= 100; L += 10) {
        p.length_km = L;
        const double r = secure_key_rate(p);
        if (!(r < prev) || r <= 0) return false;
        prev = r;
        lens.push_back(L);
        lograte.push_back(std::log10(r));
    }
    // least-squares slope of log10(rate) vs length; expect -attenuation/10
    const double n = double(lens.size());
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < lens.size(); ++i) {
        sx += lens[i];
        sy += lograte[i];
        sxx += lens[i] * lens[i];
        sxy += lens[i] * lograte[i];
    }
    const double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    const double expected = -p.atten_db_per_km / 10.0;
    if (std::fabs(slope - expected) > 0.15 * std::fabs(expected)) return false;

    // factor-3 agreement with the reference table at 50/70/90 km
    const double table[3][2] = {{50, 72.16}, {70, 20.17}, {90, 10.52}};
    for (const auto& row : table) {
        p.length_km = row[0];
        const double kbps = secure_key_rate(p) / 1000.0;
        if (kbps > 3.0 * row[1] || kbps < row[1] / 3.0) return false;
    }
    return true;
}

// --- criterion 9 -------------------------------------------------------------

bool stability_run() {
    const ParamsFile cal = parse_params(read_file(kData + "/lab-cal.params"));
    SeededRandom rng(60);
    RunOptions opt;
    opt.cycles = 30 * 3600;  // 30 h starting at midnight
    const auto cycles = run_link(cal.link, cal.drift, opt, rng);

    // (a) both feedback causes observed: QBER breach and timer expiry
    bool qber_trigger = false, timer_trigger = false;
    int day_fb = 0, night_fb = 0;
    bool prev_active = false;
    for (std::size_t i = 0; i < cycles.size(); ++i) {
        if (cycles[i].feedback_active && !prev_active) {
            (is_day(cal.drift, cycles[i].time_s) ? day_fb : night_fb)++;
            if (i > 0 && cycles[i - 1].qber >= cal.drift.qber_threshold)
                qber_trigger = true;
            else
                timer_trigger = true;
        }
        prev_active = cycles[i].feedback_active;
    }
    if (!qber_trigger || !timer_trigger) return false;

    // (b) quiet night window: first full 30 min between feedbacks after 01:00
    std::size_t start = 3600;
    while (start + 1800 < cycles.size()) {
        bool clean = true;
        for (std::size_t i = start; i < start + 1800; ++i)
            if (cycles[i].feedback_active || is_day(cal.drift, cycles[i].time_s)) {
                clean = false;
                start = i + 1;
                break;
            }
        if (clean) break;
    }
    if (start + 1800 >= cycles.size()) return false;
    int in_band = 0;
    double mean = 0;
    for (std::size_t i = start; i < start + 1800; ++i) {
        const double pct = cycles[i].qber * 100.0;
        if (pct >= 0.65 && pct <= 1.1) ++in_band;
        mean += pct;
    }
    mean /= 1800.0;
    if (in_band < 1620) return false;  // >= 90%
    if (std::fabs(mean - 0.876) > 0.15) return false;

    // (c) overall mean rate within +-25% of 144.1 kbps
    double key = 0;
    for (const auto& c : cycles) key += double(c.key_bits);
    const double kbps = key / double(cycles.size()) / 1000.0;
    if (std::fabs(kbps - 144.1) > 0.25 * 144.1) return false;

    // (d) day feedback strictly more frequent than night (per-hour rate;
    // this 30 h window holds 10 day hours and 20 night hours)
    return double(day_fb) / 10.0 > double(night_fb) / 20.0 && day_fb > night_fb / 2;
}

// --- criterion 10 ------------------------------------------------------------

bool golden_scenarios() {
    const LinkParams link = parse_params(read_file(kData + "/lab-cal.params")).link;
    struct Case {
        const char* topo;
        const char* plan;
        const char* golden;
    };
    const Case cases[] = {
        {"allpass4.topo", "ring.plan", "golden/table1a.csv"},
        {"allpass4.topo", "cross.plan", "golden/table1b.csv"},
        {"metro-relay.topo", "metro-relay.plan", "golden/table2a.csv"},
        {"metro-allpass.topo", "metro-allpass.plan", "golden/table2b.csv"},
        {"metro-allpass.topo", "metro-join.plan", "golden/table3.csv"},
        {"relay3.topo", "relay3.plan", "golden/supp1.csv"},
    };
    for (const Case& c : cases) {
        const Topology topo = parse_topology(read_file(kData + "/" + std::string(c.topo)));
        const SessionPlan plan = parse_plan(read_file(kData + "/" + std::string(c.plan)));
        const ScenarioReport rep = run_scenario(topo, plan, link, 7);

        // parse the golden transcription
        std::vector<ReportRow> golden;
        {
            const std::string text = read_file(kData + "/" + std::string(c.golden));
            std::size_t pos = text.find('\n') + 1;
            while (pos < text.size()) {
                const std::size_t end = text.find('\n', pos);
                const std::string line = text.substr(pos, end - pos);
                pos = end + 1;
                if (line.empty()) continue;
                ReportRow row;
                std::size_t p0 = 0;
                auto field = [&]() {
                    const std::size_t comma = line.find(',', p0);
                    const std::string f = line.substr(p0, comma - p0);
                    p0 = comma == std::string::npos ? line.size() : comma + 1;
                    return f;
                };
                row.connection = field();
                row.length_km = std::stod(field());
                row.loss_db = std::stod(field());
                row.key_rate_kbps = std::stod(field());
                row.qber_percent = std::stod(field());
                golden.push_back(row);
            }
        }
        if (rep.rows.size() != golden.size()) return false;
        for (std::size_t i = 0; i < golden.size(); ++i) {
            const ReportRow& got = rep.rows[i];
            const ReportRow& want = golden[i];
            if (got.connection != want.connection) return false;
            if (std::fabs(got.length_km - want.length_km) > 1e-9) return false;
            if (std::fabs(got.loss_db - want.loss_db) > 1e-9) return false;
            // documented tolerance bands: rate within x3, QBER within 0.3 points
            if (got.key_rate_kbps > 3.0 * want.key_rate_kbps ||
                got.key_rate_kbps < want.key_rate_kbps / 3.0)
                return false;
            if (std::fabs(got.qber_percent - want.qber_percent) > 0.3) return false;
        }
    }
    return true;
}

// --- criterion 11 ------------------------------------------------------------

bool decoy_bounds() {
    std::mt19937_64 rng(70);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    int checked = 0;
    while (checked < 1000) {
        LinkParams p;
        p.length_km = u(rng) * 100;
        p.det_eff = 0.01 + u(rng) * 0.5;
        p.dark = u(rng) * 1e-5;
        p.misalign = u(rng) * 0.05;
        p.mu = 0.3 + u(rng) * 0.5;
        p.nu = 0.05 + u(rng) * 0.2;
        if (p.nu >= p.mu) continue;
        ++checked;

        const ChannelEstimate c = channel_estimate(p);
        // brute-force Poisson mixture over photon numbers
        const double eta = p.det_eff * std::pow(10.0, -p.atten_db_per_km * p.length_km / 10.0);
        const double true_y1 = p.dark + eta;
        const double true_q1 = p.mu * std::exp(-p.mu) * true_y1;
        const double true_e1 = (0.5 * p.dark + p.misalign * eta) / true_y1;
        if (c.q1_lower > true_q1 * (1 + 1e-9)) return false;
        if (c.e1_upper < true_e1 * (1 - 1e-9)) return false;
    }
    return true;
}

// --- criterion 12 ------------------------------------------------------------

bool conservation() {
    std::mt19937_64 rng(80);
    SeededRandom fresh(81);
    for (int t = 0; t < 1000; ++t) {
        KeyStore s;
        PresharedRegistry reg;
        const int hops = 2 + int(rng() % 6);
        std::vector<std::pair<std::string, std::string>> chain;
        for (int h = 0; h < hops; ++h) {
            chain.push_back({"N" + std::to_string(h), "N" + std::to_string(h + 1)});
            s.add(chain.back().first, chain.back().second, 64 + rng() % 4096);
        }
        const std::string ea = chain.front().first, eb = chain.back().second;
        reg.install(ea, eb, PresharedKeyPool::from_random("p", 1024, fresh));

        std::uint64_t before = s.total_bits() + reg.pool_for(ea, eb).capacity_bits();
        const std::uint64_t composed = relay_compose(s, chain);
        if (s.total_bits() + reg.pool_for(ea, eb).capacity_bits() > before) return false;

        const std::uint64_t move = (composed / 2) & ~std::uint64_t(7);
        if (move == 0) continue;
        before = s.total_bits() + reg.pool_for(ea, eb).capacity_bits();
        replenish_pool(reg, s, ea, eb, move, fresh);
        if (s.total_bits() + reg.pool_for(ea, eb).capacity_bits() > before) return false;
    }
    return true;
}

}  // namespace

int main() {
    criterion(1, "combinatorics exact (pair counts, join costs)", combinatorics);
    criterion(2, "MITM exclusion (field substitutions and mutations)", mitm_exclusion);
    criterion(3, "intercept-resend QBER (Monte Carlo, linear scaling)", intercept_resend);
    criterion(4, "replay defense over random traces", replay_defense);
    criterion(5, "signature correctness (round trips, tamper, oracle)", signature_correctness);
    criterion(6, "mode equivalence (identical seeded reports)", mode_equivalence);
    criterion(7, "key discard on auth failure", key_discard);
    criterion(8, "rate-vs-length shape and calibration band", sweep_shape);
    criterion(9, "30 h stability (feedback, QBER band, mean rate)", stability_run);
    criterion(10, "scenario golden files within tolerance bands", golden_scenarios);
    criterion(11, "decoy bounds bracket the Poisson oracle", decoy_bounds);
    criterion(12, "relay/replenish conservation", conservation);

    if (g_failures) {
        std::printf("%d criterion(s) failed\n", g_failures);
        return 1;
    }
    std::printf("all 12 criteria passed\n");
    return 0;
}
