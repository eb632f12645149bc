#ifndef QKDPQC_FILES_HPP
#define QKDPQC_FILES_HPP

#include <string>

#include "qkdpqc/netsim.hpp"
#include "qkdpqc/pki.hpp"

namespace qkdpqc {

class ParseError : public std::runtime_error {
public:
    explicit ParseError(const std::string& what) : std::runtime_error("parse: " + what) {}
};

/// Link + drift parameter file: one `key value` pair per line, `#` comments.
struct ParamsFile {
    LinkParams link;
    DriftParams drift;
};

ParamsFile parse_params(const std::string& text);

/// Topology file: `node <id> user|switch|relay` and
/// `segment <a> <b> <length_km> [atten_db_per_km]` lines.
Topology parse_topology(const std::string& text);

/// Plan file: `mode pqc|psk`, `duration <s>`, `pair <a> <b> [duration_s]`,
/// `override <conn> [loss=<dB>] [misalign=<p>]` lines.
SessionPlan parse_plan(const std::string& text);

std::string read_file(const std::string& path);               // throws on failure
void write_file(const std::string& path, const std::string& text);
Bytes read_binary(const std::string& path);
void write_binary(const std::string& path, const Bytes& data);

// --- CSV ---------------------------------------------------------------------

std::string report_csv(const ScenarioReport& rep);
std::string cycles_csv(const std::vector<CycleResult>& cycles);

}  // namespace qkdpqc

#endif
