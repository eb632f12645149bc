#ifndef QKDPQC_NETSIM_HPP
#define QKDPQC_NETSIM_HPP

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "qkdpqc/auth.hpp"
#include "qkdpqc/qkd_model.hpp"

namespace qkdpqc {

// --- topology ----------------------------------------------------------------

enum class NodeKind { User, OpticalSwitch, TrustedRelay };

const char* to_string(NodeKind k);

struct Node {
    std::string id;
    NodeKind kind = NodeKind::User;

    bool operator==(const Node&) const = default;
};

struct Segment {
    std::string a, b;
    double length_km = 0.0;
    double atten_db_per_km = 0.21;

    bool operator==(const Segment&) const = default;
};

struct Topology {
    std::vector<Node> nodes;
    std::vector<Segment> segments;

    const Node* find(const std::string& id) const;
    void validate() const;  // throws std::invalid_argument

    bool operator==(const Topology&) const = default;
};

class NoRoute : public std::runtime_error {
public:
    explicit NoRoute(const std::string& what) : std::runtime_error("netsim: no route: " + what) {}
};

/// One authenticated QKD hop: endpoints are users or trusted relays; optical
/// switches inside a hop only add length and loss.
struct RouteHop {
    std::string from, to;
    double length_km = 0.0;
    double loss_db = 0.0;
};

struct Route {
    std::vector<RouteHop> hops;
    double total_length_km = 0.0;
    double total_loss_db = 0.0;
    std::vector<std::string> relays;    // trusted relays on the path
    std::vector<std::string> switches;  // optical switches traversed
};

/// Least-loss route between two users; hop decomposition at trusted relays.
Route path_resolve(const Topology& t, const std::string& a, const std::string& b);

// --- cost accounting ----------------------------------------------------------

std::uint64_t preshared_pairs_required(std::uint64_t n);
std::uint64_t certificates_required(std::uint64_t n);

/// Cost of adding k users to an n-user all-pass network: new preshared pools
/// (PresharedKey mode) or new certificates (PQC mode).
std::uint64_t join_cost(std::uint64_t n, std::uint64_t k, AuthMode mode);

// --- key plumbing --------------------------------------------------------------

class InsufficientKey : public std::runtime_error {
public:
    InsufficientKey() : std::runtime_error("netsim: insufficient key") {}
};

/// Per-pair accumulated secure key, counted in bits. Pair order-insensitive.
class KeyStore {
public:
    void add(const std::string& a, const std::string& b, std::uint64_t bits);
    std::uint64_t balance(const std::string& a, const std::string& b) const;
    void consume(const std::string& a, const std::string& b, std::uint64_t bits);
    std::uint64_t total_bits() const;

private:
    std::map<std::pair<std::string, std::string>, std::uint64_t> bits_;
};

/// Bit-level XOR forwarding along a relay chain. Each relay i re-encrypts the
/// running key with its next hop key; both endpoints end up with the first
/// hop key truncated to the shortest hop. relay_views records what each
/// intermediate relay observed (the trust assumption, made explicit).
struct RelayChainResult {
    Bytes end_key_a;
    Bytes end_key_b;
    std::vector<std::vector<Bytes>> relay_views;  // per relay: hop keys it held
};

RelayChainResult relay_forward(const std::vector<Bytes>& hop_keys);

/// Accounting form: consumes min(hop balances... capped at each hop) bits from
/// every hop of the chain and credits the end-to-end pair. Returns the
/// composed bit count.
std::uint64_t relay_compose(KeyStore& store,
                            const std::vector<std::pair<std::string, std::string>>& hops);

/// Registry of pairwise preshared MAC pools.
class PresharedRegistry {
public:
    PresharedKeyPool& pool_for(const std::string& a, const std::string& b);
    bool has(const std::string& a, const std::string& b) const;
    void install(const std::string& a, const std::string& b, PresharedKeyPool pool);
    std::size_t size() const { return pools_.size(); }

private:
    std::map<std::pair<std::string, std::string>, PresharedKeyPool> pools_;
};

/// Moves distilled key bits (multiple of 8) from the pair's KeyStore balance
/// into its MAC pool. Conserves totals; throws InsufficientKey.
void replenish_pool(PresharedRegistry& reg, KeyStore& store, const std::string& a,
                    const std::string& b, std::uint64_t bits, RandomSource& rng);

// --- scenarios -----------------------------------------------------------------

struct PlannedPair {
    std::string a, b;
    double duration_s = 0.0;  // 0: use the plan default
};

struct ConnOverride {
    std::optional<double> loss_db;
    std::optional<double> misalign;
};

struct SessionPlan {
    AuthMode mode = AuthMode::Pqc;
    double default_duration_s = 60.0;
    std::vector<PlannedPair> pairs;
    std::map<std::string, ConnOverride> overrides;  // keyed by connection "A-B"
};

struct ReportRow {
    std::string connection;
    double length_km = 0.0;
    double loss_db = 0.0;
    double key_rate_kbps = 0.0;
    double qber_percent = 0.0;
};

struct ScenarioReport {
    AuthMode mode = AuthMode::Pqc;
    std::vector<ReportRow> rows;
    std::vector<std::string> schedule;       // sequential switch occupancy log
    std::vector<std::string> trust_surface;  // non-endpoint nodes that saw key material
    std::map<std::string, std::uint64_t> end_to_end_bits;  // per planned pair
};

/// Runs every planned pair sequentially (switch exclusivity by construction):
/// resolves the route, performs the phase-1 handshake and one authentication
/// cycle per simulated second, simulates the QKD channel, and aggregates
/// Table-style rows (one per hop for relay routes). Deterministic in
/// (topology, plan, link, seed); the channel random stream is independent of
/// the auth mode so PQC and PresharedKey reports are identical.
ScenarioReport run_scenario(const Topology& t, const SessionPlan& plan, const LinkParams& link,
                            std::uint64_t seed);

}  // namespace qkdpqc

#endif
