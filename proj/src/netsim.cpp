#include "qkdpqc/netsim.hpp"

#include <algorithm>
#include <limits>
#include <queue>
#include <set>

namespace qkdpqc {

const char* to_string(NodeKind k) {
    switch (k) {
        case NodeKind::User: return "user";
        case NodeKind::OpticalSwitch: return "switch";
        case NodeKind::TrustedRelay: return "relay";
    }
    return "?";
}

const Node* Topology::find(const std::string& id) const {
    for (const Node& n : nodes)
        if (n.id == id) return &n;
    return nullptr;
}

void Topology::validate() const {
    std::set<std::string> ids;
    for (const Node& n : nodes) {
        if (n.id.empty()) throw std::invalid_argument("topology: empty node id");
        if (!ids.insert(n.id).second)
            throw std::invalid_argument("topology: duplicate node " + n.id);
    }
    for (const Segment& s : segments) {
        if (!find(s.a) || !find(s.b))
            throw std::invalid_argument("topology: segment references unknown node");
        if (s.a == s.b) throw std::invalid_argument("topology: self-loop segment");
        if (!(s.length_km > 0) || !(s.atten_db_per_km >= 0))
            throw std::invalid_argument("topology: bad segment metrics");
    }
}

Route path_resolve(const Topology& t, const std::string& a, const std::string& b) {
    if (a == b) throw std::invalid_argument("path_resolve: endpoints must differ");
    const Node* na = t.find(a);
    const Node* nb = t.find(b);
    if (!na || !nb) throw std::invalid_argument("path_resolve: unknown endpoint");
    if (na->kind != NodeKind::User || nb->kind != NodeKind::User)
        throw std::invalid_argument("path_resolve: endpoints must be users");

    // Dijkstra by loss
    std::map<std::string, std::vector<std::pair<std::string, const Segment*>>> adj;
    for (const Segment& s : t.segments) {
        adj[s.a].push_back({s.b, &s});
        adj[s.b].push_back({s.a, &s});
    }
    std::map<std::string, double> dist;
    std::map<std::string, std::pair<std::string, const Segment*>> prev;
    using Item = std::pair<double, std::string>;
    std::priority_queue<Item, std::vector<Item>, std::greater<>> pq;
    dist[a] = 0.0;
    pq.push({0.0, a});
    while (!pq.empty()) {
        auto [d, u] = pq.top();
        pq.pop();
        if (d > dist[u]) continue;
        if (u == b) break;
        for (const auto& [v, seg] : adj[u]) {
            // other users are endpoints, not transit nodes
            if (v != b && t.find(v)->kind == NodeKind::User) continue;
            const double nd = d + seg->length_km * seg->atten_db_per_km;
            if (!dist.count(v) || nd < dist[v]) {
                dist[v] = nd;
                prev[v] = {u, seg};
                pq.push({nd, v});
            }
        }
    }
    if (!dist.count(b)) throw NoRoute(a + "-" + b);

    std::vector<std::pair<std::string, const Segment*>> path;  // node, segment into it
    for (std::string u = b; u != a;) {
        auto [p, seg] = prev.at(u);
        path.push_back({u, seg});
        u = p;
    }
    std::reverse(path.begin(), path.end());

    Route r;
    RouteHop hop;
    hop.from = a;
    for (const auto& [node, seg] : path) {
        hop.length_km += seg->length_km;
        hop.loss_db += seg->length_km * seg->atten_db_per_km;
        const NodeKind kind = t.find(node)->kind;
        if (kind == NodeKind::OpticalSwitch) {
            r.switches.push_back(node);
        } else {  // user or trusted relay: hop boundary
            hop.to = node;
            r.total_length_km += hop.length_km;
            r.total_loss_db += hop.loss_db;
            r.hops.push_back(hop);
            if (kind == NodeKind::TrustedRelay) r.relays.push_back(node);
            hop = RouteHop{};
            hop.from = node;
        }
    }
    return r;
}

// --- cost accounting ----------------------------------------------------------

std::uint64_t preshared_pairs_required(std::uint64_t n) { return n * (n - (n > 0 ? 1 : 0)) / 2; }

std::uint64_t certificates_required(std::uint64_t n) { return n; }

std::uint64_t join_cost(std::uint64_t n, std::uint64_t k, AuthMode mode) {
    if (mode == AuthMode::Pqc) return k;
    return k * n + preshared_pairs_required(k);
}

// --- key plumbing --------------------------------------------------------------

namespace {

std::pair<std::string, std::string> norm_pair(const std::string& a, const std::string& b) {
    return a <= b ? std::make_pair(a, b) : std::make_pair(b, a);
}

}  // namespace

void KeyStore::add(const std::string& a, const std::string& b, std::uint64_t bits) {
    bits_[norm_pair(a, b)] += bits;
}

std::uint64_t KeyStore::balance(const std::string& a, const std::string& b) const {
    const auto it = bits_.find(norm_pair(a, b));
    return it == bits_.end() ? 0 : it->second;
}

void KeyStore::consume(const std::string& a, const std::string& b, std::uint64_t bits) {
    const auto it = bits_.find(norm_pair(a, b));
    if (it == bits_.end() || it->second < bits) throw InsufficientKey();
    it->second -= bits;
}

std::uint64_t KeyStore::total_bits() const {
    std::uint64_t t = 0;
    for (const auto& [_, v] : bits_) t += v;
    return t;
}

RelayChainResult relay_forward(const std::vector<Bytes>& hop_keys) {
    if (hop_keys.empty()) throw std::invalid_argument("relay_forward: no hops");
    std::size_t len = hop_keys.front().size();
    for (const Bytes& k : hop_keys) len = std::min(len, k.size());
    if (len == 0) throw InsufficientKey();

    RelayChainResult r;
    r.end_key_a.assign(hop_keys.front().begin(), hop_keys.front().begin() + len);

    // relay i publishes k_i XOR k_{i+1}; endpoint B unwinds from its own hop key
    std::vector<Bytes> ciphers;
    for (std::size_t i = 0; i + 1 < hop_keys.size(); ++i) {
        Bytes c(len);
        for (std::size_t j = 0; j < len; ++j) c[j] = hop_keys[i][j] ^ hop_keys[i + 1][j];
        ciphers.push_back(std::move(c));
        r.relay_views.push_back({Bytes(hop_keys[i].begin(), hop_keys[i].begin() + len),
                                 Bytes(hop_keys[i + 1].begin(), hop_keys[i + 1].begin() + len)});
    }
    r.end_key_b.assign(hop_keys.back().begin(), hop_keys.back().begin() + len);
    for (auto it = ciphers.rbegin(); it != ciphers.rend(); ++it)
        for (std::size_t j = 0; j < len; ++j) r.end_key_b[j] ^= (*it)[j];
    return r;
}

std::uint64_t relay_compose(KeyStore& store,
                            const std::vector<std::pair<std::string, std::string>>& hops) {
    if (hops.empty()) throw std::invalid_argument("relay_compose: no hops");
    std::uint64_t len = std::numeric_limits<std::uint64_t>::max();
    for (const auto& [a, b] : hops) len = std::min(len, store.balance(a, b));
    if (len == 0) throw InsufficientKey();
    for (const auto& [a, b] : hops) store.consume(a, b, len);
    store.add(hops.front().first, hops.back().second, len);
    return len;
}

PresharedKeyPool& PresharedRegistry::pool_for(const std::string& a, const std::string& b) {
    const auto it = pools_.find(norm_pair(a, b));
    if (it == pools_.end()) throw std::invalid_argument("registry: no pool for " + a + "-" + b);
    return it->second;
}

bool PresharedRegistry::has(const std::string& a, const std::string& b) const {
    return pools_.count(norm_pair(a, b)) != 0;
}

void PresharedRegistry::install(const std::string& a, const std::string& b,
                                PresharedKeyPool pool) {
    const auto key = norm_pair(a, b);
    if (pools_.count(key)) throw std::invalid_argument("registry: duplicate pool");
    pools_.emplace(key, std::move(pool));
}

void replenish_pool(PresharedRegistry& reg, KeyStore& store, const std::string& a,
                    const std::string& b, std::uint64_t bits, RandomSource& rng) {
    if (bits % 8 != 0) throw std::invalid_argument("replenish_pool: bits must be byte-aligned");
    store.consume(a, b, bits);  // throws InsufficientKey
    Bytes fresh(bits / 8);
    rng.fill(fresh.data(), fresh.size());
    reg.pool_for(a, b).replenish(fresh);
}

// --- scenarios -----------------------------------------------------------------

namespace {

SeededRandom stream_for(std::uint64_t seed, const std::string& label) {
    Bytes tag(8);
    for (int i = 0; i < 8; ++i) tag[i] = std::uint8_t(seed >> (8 * i));
    tag.insert(tag.end(), label.begin(), label.end());
    return SeededRandom(sm3(tag));
}

struct HopAuth {
    std::unique_ptr<AuthSession> a, b;
};

}  // namespace

ScenarioReport run_scenario(const Topology& t, const SessionPlan& plan, const LinkParams& link,
                            std::uint64_t seed) {
    t.validate();
    ScenarioReport rep;
    rep.mode = plan.mode;

    const SigScheme scheme(SigParams::desk());
    const auto ca_kp = scheme.keygen(stream_for(seed, "ca").bytes<32>());
    CertificateAuthority ca("CA", scheme, ca_kp);
    TrustStore trust;
    trust.add("CA", ca.public_key());

    std::set<std::string> trust_surface;
    KeyStore store;
    int slot = 0;

    for (const PlannedPair& pp : plan.pairs) {
        const Route route = path_resolve(t, pp.a, pp.b);
        const double duration = pp.duration_s > 0 ? pp.duration_s : plan.default_duration_s;
        const std::uint64_t cycles = std::uint64_t(duration);

        std::string via;
        for (const auto& s : route.switches) via += (via.empty() ? "" : ",") + s;
        for (const auto& r : route.relays) via += (via.empty() ? "" : ",") + r;
        rep.schedule.push_back("slot=" + std::to_string(slot++) + " pair=" + pp.a + "-" + pp.b +
                               " via=" + (via.empty() ? "-" : via));
        for (const std::string& r : route.relays) trust_surface.insert(r);

        std::vector<std::pair<std::string, std::string>> hop_pairs;
        for (const RouteHop& hop : route.hops) {
            const std::string conn = hop.from + "-" + hop.to;
            hop_pairs.push_back({hop.from, hop.to});

            LinkParams lp = link;
            lp.length_km = hop.length_km;
            double loss = hop.loss_db;
            const auto ov = plan.overrides.find(conn);
            if (ov != plan.overrides.end()) {
                if (ov->second.loss_db) loss = *ov->second.loss_db;
                if (ov->second.misalign) lp.misalign = *ov->second.misalign;
            }
            lp.atten_db_per_km = hop.length_km > 0 ? loss / hop.length_km : 0.0;

            SeededRandom chan_rng = stream_for(seed, "chan:" + conn);
            SeededRandom auth_rng = stream_for(seed, "auth:" + conn);

            // phase-1 handshake for this hop
            HopAuth ha;
            if (plan.mode == AuthMode::Pqc) {
                SeededRandom key_rng = stream_for(seed, "keys:" + conn);
                const auto kp_a = scheme.keygen(key_rng.bytes<32>());
                const auto kp_b = scheme.keygen(key_rng.bytes<32>());
                const Certificate cert_a =
                    ca.issue(hop.from, scheme.encode_public(kp_a.pub), {0, 1u << 30}, auth_rng);
                const Certificate cert_b =
                    ca.issue(hop.to, scheme.encode_public(kp_b.pub), {0, 1u << 30}, auth_rng);
                ha.a = std::make_unique<AuthSession>(hop.from, scheme, kp_a, cert_a, trust,
                                                     auth_rng);
                ha.b = std::make_unique<AuthSession>(hop.to, scheme, kp_b, cert_b, trust,
                                                     auth_rng);
            } else {
                SeededRandom pool_rng = stream_for(seed, "pool:" + conn);
                const std::size_t pool_bits = kToeplitzSeedBits + cycles * 8 * kMacTagBits + 1024;
                PresharedKeyPool pool =
                    PresharedKeyPool::from_random(conn, pool_bits, pool_rng);
                ha.a = std::make_unique<AuthSession>(hop.from, pool, auth_rng);
                ha.b = std::make_unique<AuthSession>(hop.to, pool, auth_rng);
            }
            const Phase1Message m1 = ha.a->phase1_start();
            const Phase1Message m2 = ha.b->phase1_start();
            ha.a->phase1_complete(m2);
            ha.b->phase1_complete(m1);
            if (ha.a->state() != SessionState::Ready || ha.b->state() != SessionState::Ready)
                throw std::runtime_error("netsim: handshake failed on " + conn);

            // cycle loop
            DriftParams dp;  // static channel during scenario tables
            DriftState d;
            std::uint64_t key_bits = 0;
            double qber_sum = 0.0;
            std::uint64_t qber_n = 0;
            for (std::uint64_t c = 0; c < cycles; ++c) {
                std::array<Bytes, 4> pay_ab, pay_ba;
                for (int i = 0; i < 4; ++i) {
                    const std::string sa = conn + "/" + std::to_string(c) + "/ab" + char('0' + i);
                    const std::string sb = conn + "/" + std::to_string(c) + "/ba" + char('0' + i);
                    pay_ab[i].assign(sa.begin(), sa.end());
                    pay_ba[i].assign(sb.begin(), sb.end());
                }
                const CycleVerdict v = run_auth_cycle(*ha.a, *ha.b, pay_ab, pay_ba);
                auto [res, nd] = simulate_cycle(lp, dp, d, v.pass, c, double(c), chan_rng);
                d = nd;
                key_bits += res.key_bits;
                if (res.sifted_bits > 0) {
                    qber_sum += res.qber;
                    ++qber_n;
                }
            }
            store.add(hop.from, hop.to, key_bits);

            ReportRow row;
            row.connection = conn;
            row.length_km = hop.length_km;
            row.loss_db = loss;
            row.key_rate_kbps = double(key_bits) / duration / 1000.0;
            row.qber_percent = qber_n ? qber_sum / double(qber_n) * 100.0 : 0.0;
            rep.rows.push_back(row);
        }

        if (hop_pairs.size() > 1)
            rep.end_to_end_bits[pp.a + "-" + pp.b] = relay_compose(store, hop_pairs);
        else
            rep.end_to_end_bits[pp.a + "-" + pp.b] = store.balance(pp.a, pp.b);
    }

    rep.trust_surface.assign(trust_surface.begin(), trust_surface.end());
    return rep;
}

}  // namespace qkdpqc
