#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>
#include <filesystem>

#include "qkdpqc/files.hpp"

using namespace qkdpqc;

namespace {

const std::string kData = QKDPQC_DATA_DIR;

}  // namespace

TEST_CASE("params file round trip of every field") {
    const std::string text =
        "# calibration\n"
        "length_km 40\n"
        "atten_db_per_km 0.21\n"
        "pulse_rate_hz 625e6\n"
        "mu 0.6\n"
        "nu 0.2\n"
        "vacuum 0\n"
        "det_eff 0.013\n"
        "dark 1e-8\n"
        "misalign 0.00876\n"
        "sift_q 0.5\n"
        "ec_f 1.16\n"
        "block_n 1e6\n"
        "day_sigma 9e-4\n"
        "night_sigma 2e-5\n"
        "drift_cap 0.05\n"
        "day_start_h 8\n"
        "day_end_h 18\n"
        "qber_threshold 0.03\n"
        "feedback_timer_s 1800\n"
        "feedback_duration_s 30\n";
    const ParamsFile f = parse_params(text);
    CHECK(f.link.length_km == 40);
    CHECK(f.link.pulse_rate_hz == 625e6);
    CHECK(f.link.det_eff == 0.013);
    CHECK(f.link.misalign == 0.00876);
    CHECK(f.drift.day_sigma == 9e-4);
    CHECK(f.drift.night_sigma == 2e-5);
    CHECK(f.drift.timer_s == 1800);
}

TEST_CASE("params parser rejects junk") {
    CHECK_THROWS_AS(parse_params("bogus_key 1\n"), ParseError);
    CHECK_THROWS_AS(parse_params("mu\n"), ParseError);
    CHECK_THROWS_AS(parse_params("mu zebra\n"), ParseError);
    CHECK_THROWS_AS(parse_params("mu 0.1\nnu 0.2\n"), std::invalid_argument);  // mu <= nu
}

TEST_CASE("topology parser: nodes, segments, defaults, errors") {
    const Topology t = parse_topology(
        "node A user\n"
        "node B user\n"
        "node S switch\n"
        "node R relay\n"
        "segment A S 10\n"
        "segment S B 20 0.25\n");
    REQUIRE(t.nodes.size() == 4);
    CHECK(t.find("S")->kind == NodeKind::OpticalSwitch);
    CHECK(t.find("R")->kind == NodeKind::TrustedRelay);
    REQUIRE(t.segments.size() == 2);
    CHECK(t.segments[0].atten_db_per_km == doctest::Approx(0.21));  // default
    CHECK(t.segments[1].atten_db_per_km == doctest::Approx(0.25));

    CHECK_THROWS_AS(parse_topology("node A goblin\n"), ParseError);
    CHECK_THROWS_AS(parse_topology("segment A B 10\n"), std::invalid_argument);
    CHECK_THROWS_AS(parse_topology("node A user\nnode A user\n"), std::invalid_argument);
    CHECK_THROWS_AS(parse_topology("wat\n"), ParseError);
}

TEST_CASE("plan parser: pairs, overrides, modes") {
    const SessionPlan p = parse_plan(
        "mode psk\n"
        "duration 30\n"
        "pair U1 U2\n"
        "pair U3 U4 45\n"
        "override U1-U2 loss=11.26 misalign=0.00751\n");
    CHECK(p.mode == AuthMode::PresharedKey);
    CHECK(p.default_duration_s == 30);
    REQUIRE(p.pairs.size() == 2);
    CHECK(p.pairs[1].duration_s == 45);
    REQUIRE(p.overrides.count("U1-U2") == 1);
    CHECK(*p.overrides.at("U1-U2").loss_db == doctest::Approx(11.26));
    CHECK(*p.overrides.at("U1-U2").misalign == doctest::Approx(0.00751));

    CHECK_THROWS_AS(parse_plan("mode carrier-pigeon\npair A B\n"), ParseError);
    CHECK_THROWS_AS(parse_plan("duration 5\n"), ParseError);  // no pairs
    CHECK_THROWS_AS(parse_plan("pair A B\noverride A-B loss\n"), ParseError);
    CHECK_THROWS_AS(parse_plan("pair A B\noverride A-B speed=3\n"), ParseError);
}

TEST_CASE("bundled data files parse and cross-reference") {
    const ParamsFile cal = parse_params(read_file(kData + "/lab-cal.params"));
    CHECK(cal.link.pulse_rate_hz == doctest::Approx(625e6));

    const Topology allpass4 = parse_topology(read_file(kData + "/allpass4.topo"));
    const SessionPlan ring = parse_plan(read_file(kData + "/ring.plan"));
    const SessionPlan cross = parse_plan(read_file(kData + "/cross.plan"));
    for (const auto& pp : ring.pairs) CHECK_NOTHROW(path_resolve(allpass4, pp.a, pp.b));
    for (const auto& pp : cross.pairs) CHECK_NOTHROW(path_resolve(allpass4, pp.a, pp.b));

    const Topology metro_relay = parse_topology(read_file(kData + "/metro-relay.topo"));
    const SessionPlan relay_plan = parse_plan(read_file(kData + "/metro-relay.plan"));
    for (const auto& pp : relay_plan.pairs) {
        const Route r = path_resolve(metro_relay, pp.a, pp.b);
        CHECK(r.hops.size() >= 2);  // every metro pair crosses at least one relay
    }

    const Topology metro_allpass = parse_topology(read_file(kData + "/metro-allpass.topo"));
    for (const auto& plan_name : {"metro-allpass.plan", "metro-join.plan"}) {
        const SessionPlan plan = parse_plan(read_file(kData + "/" + std::string(plan_name)));
        for (const auto& pp : plan.pairs) {
            const Route r = path_resolve(metro_allpass, pp.a, pp.b);
            CHECK(r.relays.empty());  // all-pass: no trusted relays anywhere
        }
    }

    const Topology relay3 = parse_topology(read_file(kData + "/relay3.topo"));
    const SessionPlan relay3_plan = parse_plan(read_file(kData + "/relay3.plan"));
    for (const auto& pp : relay3_plan.pairs) CHECK_NOTHROW(path_resolve(relay3, pp.a, pp.b));
}

TEST_CASE("report and cycle CSV shapes") {
    ScenarioReport rep;
    rep.rows.push_back({"U1-U2", 50.0, 11.26, 72.16, 0.751});
    const std::string csv = report_csv(rep);
    CHECK(csv ==
          "connection,length_km,loss_db,key_rate_kbps,qber_percent\n"
          "U1-U2,50.00,11.26,72.160,0.751\n");

    std::vector<CycleResult> cycles(1);
    cycles[0].cycle = 3;
    cycles[0].time_s = 3.0;
    cycles[0].sifted_bits = 1000;
    cycles[0].qber = 0.0123;
    cycles[0].key_bits = 500;
    cycles[0].auth_pass = false;
    const std::string trace = cycles_csv(cycles);
    CHECK(trace ==
          "cycle,time_s,sifted_bits,qber,key_bits,feedback,auth_verdict\n"
          "3,3.0,1000,0.012300,500,0,fail\n");
}

TEST_CASE("binary file IO round trip") {
    const std::string path =
        (std::filesystem::temp_directory_path() / "qkdpqc_test_io.bin").string();
    const Bytes data = {0, 1, 2, 255, 128, 7};
    write_binary(path, data);
    CHECK(read_binary(path) == data);
    std::remove(path.c_str());
    CHECK_THROWS(read_file(path));
}
