#include "hybridnet/sssp_bcc.hpp"

#include <algorithm>
#include <cmath>
#include <queue>
#include <tuple>

#include "hybridnet/rng.hpp"

namespace hybridnet {

std::vector<std::vector<Broadcast>> simulate_bcc_round(Engine& eng, BccSession& session,
                                                       const std::vector<Broadcast>& broadcasts, const TdParams& td) {
    const auto& ps = session.participants;
    if (broadcasts.size() != ps.size()) throw InvalidArgument("one broadcast per participant per BCC round");
    std::vector<Token> tokens;
    std::vector<NodeId> origin;
    for (std::size_t i = 0; i < ps.size(); ++i) {
        if (broadcasts[i].from != ps[i]) throw InvalidArgument("broadcast order must follow the participant list");
        tokens.push_back({ps[i], 0, broadcasts[i].value});
        origin.push_back(ps[i]);
    }
    TdParams p = td;
    p.label = "bcc";
    TokenState st;
    disseminate(eng, tokens, origin, p, &st);
    std::vector<std::vector<Broadcast>> seen(ps.size());
    for (std::size_t i = 0; i < ps.size(); ++i) {
        for (int t = 0; t < st.k(); ++t)
            if (st.knows(ps[i], t)) seen[i].push_back(broadcasts[static_cast<std::size_t>(t)]);
        if (seen[i].size() != broadcasts.size()) session.transcripts_agree = false;
    }
    session.transcripts.push_back(broadcasts);
    ++session.rounds;
    return seen;
}

std::int64_t default_bcc_x(int n, double eps) {
    if (!(eps > 0)) throw InvalidArgument("eps must be positive");
    const double x = std::cbrt(static_cast<double>(n)) * std::pow(eps, -6.0);
    if (!(x < static_cast<double>(n))) return n;
    return std::max<std::int64_t>(1, static_cast<std::int64_t>(std::ceil(x - 1e-9)));
}

namespace {

// Largest hop count among the fewest-hop shortest paths from the source
// inside the skeleton; that many relaxations make Bellman-Ford exact.
int relaxations_needed(const Skeleton& s, NodeId source) {
    const std::size_t k = s.marked.size();
    std::vector<std::vector<std::pair<int, Weight>>> adj(k);
    for (const auto& e : s.edges) {
        const auto a = static_cast<std::size_t>(s.index_of(e.u));
        const auto b = static_cast<std::size_t>(s.index_of(e.v));
        adj[a].emplace_back(static_cast<int>(b), e.w);
        adj[b].emplace_back(static_cast<int>(a), e.w);
    }
    using Item = std::tuple<Weight, int, int>;
    std::vector<Weight> d(k, kInf);
    std::vector<int> hops(k, 0);
    std::priority_queue<Item, std::vector<Item>, std::greater<>> pq;
    const auto src = static_cast<std::size_t>(s.index_of(source));
    d[src] = 0;
    pq.emplace(0, 0, static_cast<int>(src));
    while (!pq.empty()) {
        auto [du, hu, u] = pq.top();
        pq.pop();
        if (du != d[static_cast<std::size_t>(u)] || hu != hops[static_cast<std::size_t>(u)]) continue;
        for (auto [v, w] : adj[static_cast<std::size_t>(u)]) {
            const Weight nd = du + w;
            auto& dv = d[static_cast<std::size_t>(v)];
            auto& hv = hops[static_cast<std::size_t>(v)];
            if (nd < dv || (nd == dv && hu + 1 < hv)) {
                dv = nd;
                hv = hu + 1;
                pq.emplace(nd, hv, v);
            }
        }
    }
    int r = 0;
    for (std::size_t i = 0; i < k; ++i)
        if (!is_inf(d[i])) r = std::max(r, hops[i]);
    return r;
}

}  // namespace

std::vector<Weight> skeleton_sssp_bcc(Engine& eng, BccSession& session, const Skeleton& s, NodeId source,
                                      const TdParams& td) {
    const auto& ps = session.participants;
    const std::size_t k = ps.size();
    if (ps != s.marked) throw InvalidArgument("BCC participants must be the skeleton nodes");
    const int src = s.index_of(source);
    if (src < 0) throw InvalidArgument("the source must be a skeleton node");
    // w_S(u, v) as known by u from its local exploration
    std::vector<std::vector<Weight>> w(k, std::vector<Weight>(k, kInf));
    for (const auto& e : s.edges) {
        const auto a = static_cast<std::size_t>(s.index_of(e.u));
        const auto b = static_cast<std::size_t>(s.index_of(e.v));
        w[a][b] = w[b][a] = e.w;
    }
    std::vector<Weight> label(k, kInf);
    label[static_cast<std::size_t>(src)] = 0;
    const int rounds = relaxations_needed(s, source);
    for (int r = 0; r < rounds; ++r) {
        std::vector<Broadcast> out(k);
        for (std::size_t i = 0; i < k; ++i) out[i] = {ps[i], label[i]};
        const auto seen = simulate_bcc_round(eng, session, out, td);
        for (std::size_t i = 0; i < k; ++i)
            for (const auto& b : seen[i]) {
                const auto j = static_cast<std::size_t>(s.index_of(b.from));
                label[i] = std::min(label[i], sat_add(b.value, w[j][i]));
            }
    }
    return label;
}

DistanceMap approx_sssp_bcc(Engine& eng, NodeId s, const BccParams& p, BccMetrics* metrics) {
    const auto& g = eng.graph();
    const int n = g.n();
    if (!(p.eps > 0)) throw InvalidArgument("approx_sssp_bcc needs eps > 0");
    if (s < 1 || s > n) throw InvalidArgument("source out of range");
    const std::int64_t x = p.x > 0 ? std::min<std::int64_t>(p.x, n) : default_bcc_x(n, p.eps);

    Skeleton sk;
    sk.x = x;
    sk.xi = p.xi;
    sk.h = skeleton_hops(p.xi, x, n);
    sk.explored = sk.h;
    sk.is_marked.assign(static_cast<std::size_t>(n) + 1, 0);
    sk.is_marked[static_cast<std::size_t>(s)] = 1;  // the source always takes part
    for (NodeId v = 1; v <= n; ++v) {
        Rng rng = stream(eng.seed(), Stream::marking, static_cast<std::uint64_t>(v));
        if (rng.bernoulli(1.0 / static_cast<double>(x))) sk.is_marked[static_cast<std::size_t>(v)] = 1;
    }
    for (NodeId v = 1; v <= n; ++v)
        if (sk.is_marked[static_cast<std::size_t>(v)]) sk.marked.push_back(v);

    // h rounds of Bellman-Ford toward the skeleton nodes only
    eng.set_phase("bcc/explore");
    const auto bf = bellman_ford_k_sources(g, sk.marked, sk.h);
    for (auto load : bf.labels_per_round) eng.record_round(load, 0, eng.check_local_load(load, 0, 0));
    for (std::size_t i = 0; i < sk.marked.size(); ++i)
        for (std::size_t j = i + 1; j < sk.marked.size(); ++j) {
            const Weight w = bf.get(i, sk.marked[j]);
            if (!is_inf(w)) sk.edges.push_back({sk.marked[i], sk.marked[j], w});
        }

    BccSession session;
    session.participants = sk.marked;
    const auto labels = skeleton_sssp_bcc(eng, session, sk, s, p.td);

    // publish <u, d~_su>
    std::vector<Token> tokens;
    std::vector<NodeId> origin;
    for (std::size_t i = 0; i < sk.marked.size(); ++i) {
        tokens.push_back({sk.marked[i], 0, labels[i]});
        origin.push_back(sk.marked[i]);
    }
    TdParams td = p.td;
    td.label = "bcc/publish";
    TokenState st;
    const auto pub = disseminate(eng, tokens, origin, td, &st);

    const auto si = static_cast<std::size_t>(sk.index_of(s));
    DistanceMap out;
    out.source = s;
    out.dist.assign(static_cast<std::size_t>(n) + 1, kInf);
    for (NodeId v = 1; v <= n; ++v) {
        Weight best = bf.get(si, v);
        for (std::size_t i = 0; i < sk.marked.size(); ++i) {
            if (!st.knows(v, static_cast<int>(i))) continue;
            best = std::min(best, sat_add(labels[i], bf.get(i, v)));
        }
        out.dist[static_cast<std::size_t>(v)] = best;
    }
    if (metrics) {
        metrics->x = x;
        metrics->h = sk.h;
        metrics->marked = sk.marked.size();
        metrics->bcc_rounds = session.rounds;
        metrics->transcripts_agree = session.transcripts_agree;
        metrics->published_complete = pub.complete;
    }
    return out;
}

}  // namespace hybridnet
