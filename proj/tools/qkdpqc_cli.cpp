// qkdpqc: post-quantum-authenticated QKD simulator front end.
//
// Exit codes: 0 success, 2 config error, 3 simulation error,
// 4 authentication-failure verdict (cmd attack used as a check).

#include <CLI11.hpp>
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <iostream>

#include "qkdpqc/files.hpp"

using namespace qkdpqc;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitSim = 3;
constexpr int kExitAuthFail = 4;

std::string resolve_out(const std::string& path) {
    if (path.empty() || path.front() == '/') return path;
    if (const char* dir = std::getenv("QKDPQC_OUT_DIR")) return std::string(dir) + "/" + path;
    return path;
}

void emit(const std::string& out_path, const std::string& csv) {
    if (out_path.empty())
        std::cout << csv;
    else
        write_file(resolve_out(out_path), csv);
}

std::string fmt(double v, int prec = 3) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*f", prec, v);
    return buf;
}

// --- sweep ----------------------------------------------------------------

int cmd_sweep(const std::string& params_path, const std::vector<double>& lengths,
              std::uint64_t seed, const std::string& out_path) {
    const ParamsFile pf = parse_params(read_file(params_path));
    std::string csv = "length_km,key_rate_kbps,qber_percent,stddev_kbps\n";
    for (double len : lengths) {
        LinkParams lp = pf.link;
        lp.length_km = len;
        SeededRandom rng(seed ^ std::uint64_t(len * 1000));
        RunOptions opt;
        opt.cycles = 300;  // five simulated minutes of 1 s cycles
        const auto cycles = run_link(lp, pf.drift, opt, rng);

        double key_sum = 0, qber_sum = 0, key_sq = 0;
        std::uint64_t qn = 0;
        for (const auto& c : cycles) {
            const double kbps = double(c.key_bits) / 1000.0;
            key_sum += kbps;
            key_sq += kbps * kbps;
            if (c.sifted_bits > 0) {
                qber_sum += c.qber;
                ++qn;
            }
        }
        const double n = double(cycles.size());
        const double mean = key_sum / n;
        const double var = std::max(0.0, key_sq / n - mean * mean);
        csv += fmt(len, 2) + "," + fmt(mean) + "," +
               fmt(qn ? qber_sum / double(qn) * 100.0 : 0.0) + "," + fmt(std::sqrt(var)) + "\n";
    }
    emit(out_path, csv);
    return kExitOk;
}

// --- scenario ---------------------------------------------------------------

int cmd_scenario(const std::string& topo_path, const std::string& plan_path,
                 const std::string& params_path, const std::string& mode_flag,
                 std::uint64_t seed, const std::string& out_path) {
    const Topology topo = parse_topology(read_file(topo_path));
    SessionPlan plan = parse_plan(read_file(plan_path));
    const ParamsFile pf = parse_params(read_file(params_path));
    if (mode_flag == "pqc") plan.mode = AuthMode::Pqc;
    else if (mode_flag == "psk") plan.mode = AuthMode::PresharedKey;
    const ScenarioReport rep = run_scenario(topo, plan, pf.link, seed);
    emit(out_path, report_csv(rep));
    return kExitOk;
}

// --- attack -----------------------------------------------------------------

int cmd_attack(const std::string& params_path, double fraction, bool mitm, std::uint64_t seed,
               const std::string& out_path) {
    const ParamsFile pf = parse_params(read_file(params_path));

    std::string verdict = "ok";
    if (mitm) {
        // phase-1 substitution: the adversary presents a certificate from an
        // issuer outside the victims' trust store
        const SigScheme scheme(SigParams::desk());
        SeededRandom rng(seed);
        const auto kp_a = scheme.keygen(rng.bytes<32>());
        const auto kp_e = scheme.keygen(rng.bytes<32>());
        const auto kp_ca = scheme.keygen(rng.bytes<32>());
        const auto kp_evil_ca = scheme.keygen(rng.bytes<32>());
        CertificateAuthority ca("CA", scheme, kp_ca);
        CertificateAuthority evil_ca("EVIL", scheme, kp_evil_ca);
        TrustStore trust;
        trust.add("CA", ca.public_key());

        const Certificate cert_a =
            ca.issue("alice", scheme.encode_public(kp_a.pub), {0, 1 << 30}, rng);
        const Certificate cert_e =
            evil_ca.issue("alice", scheme.encode_public(kp_e.pub), {0, 1 << 30}, rng);

        AuthSession bob("bob", scheme, kp_a, cert_a, trust, rng);
        (void)bob.phase1_start();
        Phase1Message forged;
        forged.cert = cert_e;
        forged.nonce = gen_nonce(rng);
        bob.phase1_complete(forged);
        verdict = bob.state() == SessionState::Failed ? "Failed(" + bob.failure_reason() + ")"
                                                      : "accepted";
    }

    SeededRandom chan(seed + 1);
    RunOptions opt;
    opt.cycles = 60;
    opt.attack_fraction = fraction;
    if (mitm) {
        opt.fail_from = 0;  // no authenticated channel: every cycle discards key
        opt.fail_to = opt.cycles;
    }
    const auto cycles = run_link(pf.link, pf.drift, opt, chan);
    double qber_sum = 0;
    std::uint64_t qn = 0, key = 0;
    for (const auto& c : cycles) {
        key += c.key_bits;
        if (c.sifted_bits > 0) {
            qber_sum += c.qber;
            ++qn;
        }
    }
    std::string csv = "attack_fraction,mitm,qber_percent,key_rate_kbps,auth_verdict\n";
    csv += fmt(fraction) + "," + (mitm ? "1" : "0") + "," +
           fmt(qn ? qber_sum / double(qn) * 100.0 : 0.0) + "," +
           fmt(double(key) / double(opt.cycles) / 1000.0) + "," + verdict + "\n";
    emit(out_path, csv);
    return (mitm && verdict != "ok") ? kExitAuthFail : kExitOk;
}

// --- stability ----------------------------------------------------------------

int cmd_stability(const std::string& params_path, double hours, std::uint64_t seed,
                  const std::string& out_path, const std::string& trace_path) {
    if (!(hours > 0)) throw ParseError("stability: hours must be > 0");
    const ParamsFile pf = parse_params(read_file(params_path));
    SeededRandom rng(seed);
    RunOptions opt;
    opt.cycles = std::uint64_t(hours * 3600.0);
    const auto cycles = run_link(pf.link, pf.drift, opt, rng);

    std::string csv = "window_start_s,mean_key_rate_kbps,mean_qber_percent,feedback_events\n";
    const std::uint64_t window = 300;
    for (std::uint64_t w = 0; w < cycles.size(); w += window) {
        const std::uint64_t end = std::min<std::uint64_t>(w + window, cycles.size());
        double key = 0, qber = 0;
        std::uint64_t qn = 0, feedback = 0;
        bool prev_fb = w > 0 && cycles[w - 1].feedback_active;
        for (std::uint64_t i = w; i < end; ++i) {
            key += double(cycles[i].key_bits);
            if (cycles[i].sifted_bits > 0) {
                qber += cycles[i].qber;
                ++qn;
            }
            if (cycles[i].feedback_active && !prev_fb) ++feedback;
            prev_fb = cycles[i].feedback_active;
        }
        csv += std::to_string(w) + "," + fmt(key / double(end - w) / 1000.0) + "," +
               fmt(qn ? qber / double(qn) * 100.0 : 0.0) + "," + std::to_string(feedback) + "\n";
    }
    emit(out_path, csv);
    if (!trace_path.empty()) write_file(resolve_out(trace_path), cycles_csv(cycles));
    return kExitOk;
}

// --- authbench ------------------------------------------------------------------

int cmd_authbench(const std::string& mode, int iterations, const std::string& out_path) {
    if (iterations <= 0) throw ParseError("authbench: iterations must be > 0");
    using clock = std::chrono::steady_clock;
    auto us = [](clock::duration d) {
        return std::chrono::duration_cast<std::chrono::duration<double, std::micro>>(d).count();
    };
    auto stats_row = [&](const std::string& op, std::vector<double>& samples) {
        std::sort(samples.begin(), samples.end());
        double sum = 0;
        for (double s : samples) sum += s;
        return op + "," + fmt(sum / double(samples.size()), 2) + "," +
               fmt(samples[samples.size() / 2], 2);
    };

    std::string csv = "op,mean_us,median_us\n";
    OsRandom rng;
    if (mode == "pqc") {
        const SigScheme scheme(SigParams::reference());
        const auto kp = scheme.keygen(SeededRandom(1).bytes<32>());
        const SigSigner signer(scheme, kp.sec);
        const SigVerifier verifier(scheme, kp.pub);
        std::vector<double> sign_t, verify_t, cycle_t;
        Bytes msg(64, 0xA5);
        std::size_t sig_size = 0;
        for (int i = 0; i < iterations; ++i) {
            msg[0] = std::uint8_t(i);
            auto t0 = clock::now();
            const auto sig = signer.sign(msg, rng);
            auto t1 = clock::now();
            const Bytes enc = scheme.encode_signature(sig);
            sig_size = enc.size();
            auto t2 = clock::now();
            if (!verifier.verify_bytes(msg, enc)) return kExitSim;
            auto t3 = clock::now();
            sign_t.push_back(us(t1 - t0));
            verify_t.push_back(us(t3 - t2));
            // full two-way cycle: four classes, both directions
            auto c0 = clock::now();
            for (int j = 0; j < 8; ++j) {
                const auto s = signer.sign(msg, rng);
                if (!verifier.verify(msg, s)) return kExitSim;
            }
            cycle_t.push_back(us(clock::now() - c0));
        }
        csv += stats_row("sign", sign_t) + "\n";
        csv += stats_row("verify", verify_t) + "\n";
        csv += stats_row("two_way_cycle", cycle_t) + "\n";
        csv += "signature_bytes," + std::to_string(sig_size) + "," + std::to_string(sig_size) +
               "\n";
    } else {
        SeededRandom pool_rng(2);
        PresharedKeyPool pool = PresharedKeyPool::from_random(
            "bench", kToeplitzSeedBits + std::size_t(iterations) * 16 * kMacTagBits, pool_rng);
        PresharedKeyPool verify_pool = pool;
        std::vector<double> tag_t, verify_t;
        Bytes msg(64, 0x5A);
        for (int i = 0; i < iterations; ++i) {
            msg[0] = std::uint8_t(i);
            auto t0 = clock::now();
            const ItsMacTag tag = mac_tag(pool, msg);
            auto t1 = clock::now();
            if (mac_verify(verify_pool, msg, tag) != MacResult::Accept) return kExitSim;
            auto t2 = clock::now();
            tag_t.push_back(us(t1 - t0));
            verify_t.push_back(us(t2 - t1));
        }
        csv += stats_row("mac_tag", tag_t) + "\n";
        csv += stats_row("mac_verify", verify_t) + "\n";
        csv += "key_bits_per_tag," + std::to_string(kMacTagBits) + "," +
               std::to_string(kMacTagBits) + "\n";
    }
    emit(out_path, csv);
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"post-quantum-authenticated QKD network simulator"};
    app.require_subcommand(1);

    std::string params_path, topo_path, plan_path, out_path, trace_path;
    std::string mode = "pqc";
    std::uint64_t seed = 0;
    std::vector<double> lengths;
    double hours = 1.0, fraction = 0.0;
    bool mitm = false;
    int iterations = 100;

    auto* sweep = app.add_subcommand("sweep", "key rate vs fiber length");
    sweep->add_option("--params", params_path)->required();
    sweep->add_option("--lengths", lengths)->delimiter(',');
    sweep->add_option("--seed", seed)->required();
    sweep->add_option("--out", out_path);

    auto* scenario = app.add_subcommand("scenario", "run a topology session plan");
    scenario->add_option("--topology", topo_path)->required();
    scenario->add_option("--plan", plan_path)->required();
    scenario->add_option("--params", params_path)->required();
    scenario->add_option("--mode", mode)->check(CLI::IsMember({"pqc", "psk", "plan"}));
    scenario->add_option("--seed", seed)->required();
    scenario->add_option("--out", out_path);

    auto* attack = app.add_subcommand("attack", "intercept-resend and MITM demos");
    attack->add_option("--params", params_path)->required();
    attack->add_option("--attack-fraction", fraction)->check(CLI::Range(0.0, 1.0));
    attack->add_flag("--mitm", mitm);
    attack->add_option("--seed", seed)->required();
    attack->add_option("--out", out_path);

    auto* stability = app.add_subcommand("stability", "long continuous run");
    stability->add_option("--params", params_path)->required();
    stability->add_option("--hours", hours)->required();
    stability->add_option("--seed", seed)->required();
    stability->add_option("--out", out_path);
    stability->add_option("--trace", trace_path);

    auto* authbench = app.add_subcommand("authbench", "authentication microbenchmarks");
    authbench->add_option("--mode", mode)->check(CLI::IsMember({"pqc", "psk"}));
    authbench->add_option("--iterations", iterations);
    authbench->add_option("--out", out_path);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return e.get_exit_code() == 0 ? kExitOk : kExitConfig;
    }

    try {
        if (sweep->parsed()) return cmd_sweep(params_path, lengths, seed, out_path);
        if (scenario->parsed())
            return cmd_scenario(topo_path, plan_path, params_path,
                                mode == "plan" ? "" : mode, seed, out_path);
        if (attack->parsed()) return cmd_attack(params_path, fraction, mitm, seed, out_path);
        if (stability->parsed())
            return cmd_stability(params_path, hours, seed, out_path, trace_path);
        if (authbench->parsed()) return cmd_authbench(mode, iterations, out_path);
    } catch (const ParseError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitSim;
    }
    return kExitConfig;
}
