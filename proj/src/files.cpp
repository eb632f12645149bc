#include "qkdpqc/files.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

namespace qkdpqc {

namespace {

std::vector<std::string> tokenize(const std::string& line) {
    std::istringstream ss(line);
    std::vector<std::string> toks;
    std::string t;
    while (ss >> t) {
        if (t[0] == '#') break;
        toks.push_back(t);
    }
    return toks;
}

double num(const std::string& s, const std::string& ctx) {
    try {
        std::size_t pos = 0;
        const double v = std::stod(s, &pos);
        if (pos != s.size()) throw std::invalid_argument(s);
        return v;
    } catch (const std::exception&) {
        throw ParseError(ctx + ": bad number '" + s + "'");
    }
}

std::string fmt(double v, int prec) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*f", prec, v);
    return buf;
}

}  // namespace

ParamsFile parse_params(const std::string& text) {
    ParamsFile f;
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto toks = tokenize(line);
        if (toks.empty()) continue;
        const std::string ctx = "params line " + std::to_string(lineno);
        if (toks.size() != 2) throw ParseError(ctx + ": expected 'key value'");
        const std::string& k = toks[0];
        const double v = num(toks[1], ctx);
        if (k == "length_km") f.link.length_km = v;
        else if (k == "atten_db_per_km") f.link.atten_db_per_km = v;
        else if (k == "pulse_rate_hz") f.link.pulse_rate_hz = v;
        else if (k == "mu") f.link.mu = v;
        else if (k == "nu") f.link.nu = v;
        else if (k == "vacuum") f.link.vacuum = v;
        else if (k == "det_eff") f.link.det_eff = v;
        else if (k == "dark") f.link.dark = v;
        else if (k == "misalign") f.link.misalign = v;
        else if (k == "sift_q") f.link.sift_q = v;
        else if (k == "ec_f") f.link.ec_f = v;
        else if (k == "block_n") f.link.block_n = v;
        else if (k == "day_sigma") f.drift.day_sigma = v;
        else if (k == "night_sigma") f.drift.night_sigma = v;
        else if (k == "drift_cap") f.drift.cap = v;
        else if (k == "day_start_h") f.drift.day_start_h = v;
        else if (k == "day_end_h") f.drift.day_end_h = v;
        else if (k == "qber_threshold") f.drift.qber_threshold = v;
        else if (k == "feedback_timer_s") f.drift.timer_s = v;
        else if (k == "feedback_duration_s") f.drift.feedback_duration_s = v;
        else throw ParseError(ctx + ": unknown key '" + k + "'");
    }
    f.link.validate();
    return f;
}

Topology parse_topology(const std::string& text) {
    Topology t;
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto toks = tokenize(line);
        if (toks.empty()) continue;
        const std::string ctx = "topology line " + std::to_string(lineno);
        if (toks[0] == "node") {
            if (toks.size() != 3) throw ParseError(ctx + ": expected 'node <id> <kind>'");
            Node n;
            n.id = toks[1];
            if (toks[2] == "user") n.kind = NodeKind::User;
            else if (toks[2] == "switch") n.kind = NodeKind::OpticalSwitch;
            else if (toks[2] == "relay") n.kind = NodeKind::TrustedRelay;
            else throw ParseError(ctx + ": unknown node kind '" + toks[2] + "'");
            t.nodes.push_back(n);
        } else if (toks[0] == "segment") {
            if (toks.size() != 4 && toks.size() != 5)
                throw ParseError(ctx + ": expected 'segment <a> <b> <km> [db/km]'");
            Segment s;
            s.a = toks[1];
            s.b = toks[2];
            s.length_km = num(toks[3], ctx);
            if (toks.size() == 5) s.atten_db_per_km = num(toks[4], ctx);
            t.segments.push_back(s);
        } else {
            throw ParseError(ctx + ": unknown directive '" + toks[0] + "'");
        }
    }
    t.validate();
    return t;
}

SessionPlan parse_plan(const std::string& text) {
    SessionPlan p;
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto toks = tokenize(line);
        if (toks.empty()) continue;
        const std::string ctx = "plan line " + std::to_string(lineno);
        if (toks[0] == "mode") {
            if (toks.size() != 2) throw ParseError(ctx + ": expected 'mode pqc|psk'");
            if (toks[1] == "pqc") p.mode = AuthMode::Pqc;
            else if (toks[1] == "psk") p.mode = AuthMode::PresharedKey;
            else throw ParseError(ctx + ": unknown mode '" + toks[1] + "'");
        } else if (toks[0] == "duration") {
            if (toks.size() != 2) throw ParseError(ctx + ": expected 'duration <s>'");
            p.default_duration_s = num(toks[1], ctx);
        } else if (toks[0] == "pair") {
            if (toks.size() != 3 && toks.size() != 4)
                throw ParseError(ctx + ": expected 'pair <a> <b> [duration]'");
            PlannedPair pp;
            pp.a = toks[1];
            pp.b = toks[2];
            if (toks.size() == 4) pp.duration_s = num(toks[3], ctx);
            p.pairs.push_back(pp);
        } else if (toks[0] == "override") {
            if (toks.size() < 3) throw ParseError(ctx + ": expected 'override <conn> k=v...'");
            ConnOverride& ov = p.overrides[toks[1]];
            for (std::size_t i = 2; i < toks.size(); ++i) {
                const auto eq = toks[i].find('=');
                if (eq == std::string::npos) throw ParseError(ctx + ": expected k=v");
                const std::string k = toks[i].substr(0, eq);
                const double v = num(toks[i].substr(eq + 1), ctx);
                if (k == "loss") ov.loss_db = v;
                else if (k == "misalign") ov.misalign = v;
                else throw ParseError(ctx + ": unknown override key '" + k + "'");
            }
        } else {
            throw ParseError(ctx + ": unknown directive '" + toks[0] + "'");
        }
    }
    if (p.pairs.empty()) throw ParseError("plan: no pairs");
    return p;
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open " + path);
    std::ostringstream out;
    out << in.rdbuf();
    return out.str();
}

void write_file(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << text;
    if (!out) throw std::runtime_error("write failed: " + path);
}

Bytes read_binary(const std::string& path) {
    const std::string s = read_file(path);
    return Bytes(s.begin(), s.end());
}

void write_binary(const std::string& path, const Bytes& data) {
    write_file(path, std::string(data.begin(), data.end()));
}

std::string report_csv(const ScenarioReport& rep) {
    std::string out = "connection,length_km,loss_db,key_rate_kbps,qber_percent\n";
    for (const ReportRow& r : rep.rows)
        out += r.connection + "," + fmt(r.length_km, 2) + "," + fmt(r.loss_db, 2) + "," +
               fmt(r.key_rate_kbps, 3) + "," + fmt(r.qber_percent, 3) + "\n";
    return out;
}

std::string cycles_csv(const std::vector<CycleResult>& cycles) {
    std::string out = "cycle,time_s,sifted_bits,qber,key_bits,feedback,auth_verdict\n";
    for (const CycleResult& c : cycles)
        out += std::to_string(c.cycle) + "," + fmt(c.time_s, 1) + "," +
               std::to_string(c.sifted_bits) + "," + fmt(c.qber, 6) + "," +
               std::to_string(c.key_bits) + "," + (c.feedback_active ? "1" : "0") + "," +
               (c.auth_pass ? "pass" : "fail") + "\n";
    return out;
}

}  // namespace qkdpqc
