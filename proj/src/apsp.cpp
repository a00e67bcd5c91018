#include "hybridnet/apsp.hpp"

#include <algorithm>
#include <cmath>
#include <queue>

#include "hybridnet/rng.hpp"

namespace hybridnet {

int Skeleton::index_of(NodeId v) const {
    const auto it = std::lower_bound(marked.begin(), marked.end(), v);
    return it != marked.end() && *it == v ? static_cast<int>(it - marked.begin()) : -1;
}

int skeleton_hops(double xi, std::int64_t x, int n) {
    const double raw = std::ceil(xi * static_cast<double>(x) * std::log(static_cast<double>(std::max(n, 2))) - 1e-9);
    // d_{n-1} = d, so longer exploration learns nothing new
    const double cap = std::max(1, n - 1);
    return static_cast<int>(std::max(1.0, std::min(raw, cap)));
}

namespace {

// h rounds of multi-source Bellman-Ford from every node, charged to the
// engine. Labels carry (source, distance, marked flag).
DistanceMatrix explore(Engine& eng, int hops, bool charge) {
    const auto& g = eng.graph();
    const int n = g.n();
    std::vector<NodeId> all(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) all[static_cast<std::size_t>(i)] = i + 1;
    const auto bf = bellman_ford_k_sources(g, all, hops);
    if (charge) {
        for (auto load : bf.labels_per_round) {
            eng.record_round(load, 0, eng.check_local_load(load, 0, 0));
        }
    }
    DistanceMatrix d(n);
    for (int i = 0; i < n; ++i)
        for (NodeId v = 1; v <= n; ++v) d.at(i + 1, v) = bf.get(static_cast<std::size_t>(i), v);
    return d;
}

SkeletonDistances apsp_on(std::size_t k, const std::vector<std::vector<std::pair<int, Weight>>>& adj) {
    SkeletonDistances ds(k, std::vector<Weight>(k, kInf));
    using Item = std::pair<Weight, int>;
    for (std::size_t s = 0; s < k; ++s) {
        auto& d = ds[s];
        std::priority_queue<Item, std::vector<Item>, std::greater<>> pq;
        d[s] = 0;
        pq.emplace(0, static_cast<int>(s));
        while (!pq.empty()) {
            auto [du, u] = pq.top();
            pq.pop();
            if (du != d[static_cast<std::size_t>(u)]) continue;
            for (auto [v, w] : adj[static_cast<std::size_t>(u)]) {
                const Weight nd = sat_add(du, w);
                if (nd < d[static_cast<std::size_t>(v)]) {
                    d[static_cast<std::size_t>(v)] = nd;
                    pq.emplace(nd, v);
                }
            }
        }
    }
    return ds;
}

// A[j] = min_i (own[m_i] + ds[i][j]): best distance from a node to every
// marked node through the skeleton.
std::vector<Weight> through_skeleton(const Skeleton& s, const SkeletonDistances& ds, const DistanceMatrix& own,
                                     NodeId u) {
    const std::size_t k = s.marked.size();
    std::vector<Weight> a(k, kInf);
    for (std::size_t i = 0; i < k; ++i) {
        const Weight du = own.at(u, s.marked[i]);
        if (is_inf(du)) continue;
        const auto& row = ds[i];
        for (std::size_t j = 0; j < k; ++j) a[j] = std::min(a[j], sat_add(du, row[j]));
    }
    return a;
}

bool knows_all(const TokenState& st, NodeId v) { return st.known_count(v) == st.k(); }

}  // namespace

Skeleton construct_skeleton(Engine& eng, std::int64_t x, const SkeletonParams& p, LocalKnowledge* know) {
    const int n = eng.n();
    if (x < 1 || x > n) throw InvalidArgument("skeleton sampling parameter x must lie in [1, n]");
    if (!(p.xi > 0)) throw InvalidArgument("xi must be positive");
    Skeleton s;
    s.x = x;
    s.xi = p.xi;
    s.h = skeleton_hops(p.xi, x, n);
    s.explored = s.h;
    if (p.primed) {
        const int m = std::max(s.h, static_cast<int>(std::ceil(static_cast<double>(n) / s.h - 1e-9)));
        s.explored = std::min(m, std::max(1, n - 1));
    }
    s.is_marked.assign(static_cast<std::size_t>(n) + 1, 0);
    for (NodeId v : p.special) {
        if (v < 1 || v > n) throw InvalidArgument("special node out of range");
        s.is_marked[static_cast<std::size_t>(v)] = 1;
    }
    const double rate = 1.0 / static_cast<double>(x);
    for (int attempt = 0;; ++attempt) {
        for (NodeId v = 1; v <= n; ++v) {
            Rng rng = stream(eng.seed(), Stream::marking, static_cast<std::uint64_t>(v), static_cast<std::uint64_t>(attempt));
            if (rng.bernoulli(rate)) s.is_marked[static_cast<std::size_t>(v)] = 1;
        }
        if (std::find(s.is_marked.begin() + 1, s.is_marked.end(), 1) != s.is_marked.end()) break;
        ++s.resamples;
        if (attempt > 1000) throw Error("marking never selected a node");
    }
    for (NodeId v = 1; v <= n; ++v)
        if (s.is_marked[static_cast<std::size_t>(v)]) s.marked.push_back(v);

    eng.set_phase(p.primed ? "skeleton'/explore" : "skeleton/explore");
    LocalKnowledge local;
    local.dexp = explore(eng, s.explored, true);
    local.dh = s.explored == s.h ? local.dexp : explore(eng, s.h, false);

    for (std::size_t i = 0; i < s.marked.size(); ++i)
        for (std::size_t j = i + 1; j < s.marked.size(); ++j) {
            const Weight w = local.dh.at(s.marked[i], s.marked[j]);
            if (!is_inf(w)) s.edges.push_back({s.marked[i], s.marked[j], w});
        }
    if (know) *know = std::move(local);
    return s;
}

SkeletonDistances skeleton_apsp(const Skeleton& s, const std::vector<Edge>& edges) {
    const std::size_t k = s.marked.size();
    std::vector<std::vector<std::pair<int, Weight>>> adj(k);
    for (const auto& e : edges) {
        const int a = s.index_of(e.u);
        const int b = s.index_of(e.v);
        if (a < 0 || b < 0) throw InvalidArgument("skeleton edge touches an unmarked node");
        adj[static_cast<std::size_t>(a)].emplace_back(b, e.w);
        adj[static_cast<std::size_t>(b)].emplace_back(a, e.w);
    }
    return apsp_on(k, adj);
}

SkeletonDistances SkeletonTransfer::view(const Skeleton& s, NodeId v) const {
    if (knows_all(state, v)) return ds;
    std::vector<Edge> edges;
    for (int t = 0; t < state.k(); ++t)
        if (state.knows(v, t)) edges.push_back({state.token(t).a, state.token(t).b, state.token(t).w});
    return skeleton_apsp(s, edges);
}

SkeletonTransfer transmit_skeleton(Engine& eng, const Skeleton& s, const TdParams& td) {
    SkeletonTransfer out;
    std::vector<Token> tokens;
    std::vector<NodeId> origin;
    // both endpoints announce each skeleton edge
    for (const auto& e : s.edges) {
        tokens.push_back({e.u, e.v, e.w});
        origin.push_back(e.u);
        tokens.push_back({e.v, e.u, e.w});
        origin.push_back(e.v);
    }
    out.tokens = static_cast<std::int64_t>(tokens.size());
    TdParams p = td;
    p.label = "skeleton";
    out.td = disseminate(eng, tokens, origin, p, &out.state);
    out.ds = skeleton_apsp(s, s.edges);
    return out;
}

DistanceTransfer transmit_distances(Engine& eng, const Skeleton& s, const LocalKnowledge& know, const TdParams& td) {
    const int n = eng.n();
    const std::size_t k = s.marked.size();
    DistanceTransfer out;
    out.dprime.assign(k, std::vector<Weight>(static_cast<std::size_t>(n) + 1, kInf));
    out.token_id.assign(k, std::vector<int>(static_cast<std::size_t>(n) + 1, -1));
    std::vector<Token> tokens;
    std::vector<NodeId> origin;
    for (std::size_t i = 0; i < k; ++i) {
        const NodeId u = s.marked[i];
        for (NodeId v = 1; v <= n; ++v) {
            if (s.is_marked[static_cast<std::size_t>(v)]) continue;
            const Weight w = know.dh.at(u, v);
            if (is_inf(w)) continue;
            out.dprime[i][static_cast<std::size_t>(v)] = w;
            out.token_id[i][static_cast<std::size_t>(v)] = static_cast<int>(tokens.size());
            tokens.push_back({u, v, w});
            origin.push_back(u);
        }
    }
    out.tokens = static_cast<std::int64_t>(tokens.size());
    TdParams p = td;
    p.label = "dprime";
    out.td = disseminate(eng, tokens, origin, p, &out.state);
    return out;
}

ClosestTransfer transmit_closest(Engine& eng, const Skeleton& s, const LocalKnowledge& know, const TdParams& td) {
    const int n = eng.n();
    ClosestTransfer out;
    out.closest.assign(static_cast<std::size_t>(n) + 1, 0);
    out.dist.assign(static_cast<std::size_t>(n) + 1, kInf);
    out.token_id.assign(static_cast<std::size_t>(n) + 1, -1);
    std::vector<Token> tokens;
    std::vector<NodeId> origin;
    for (NodeId v = 1; v <= n; ++v) {
        if (s.is_marked[static_cast<std::size_t>(v)]) {
            out.closest[static_cast<std::size_t>(v)] = v;
            out.dist[static_cast<std::size_t>(v)] = 0;
            continue;
        }
        NodeId best = 0;
        Weight bw = kInf;
        for (NodeId u : s.marked) {  // ascending IDs, so ties keep the smaller one
            const Weight w = know.dh.at(v, u);
            if (w < bw) {
                bw = w;
                best = u;
            }
        }
        if (best == 0) continue;
        out.closest[static_cast<std::size_t>(v)] = best;
        out.dist[static_cast<std::size_t>(v)] = bw;
        out.token_id[static_cast<std::size_t>(v)] = static_cast<int>(tokens.size());
        tokens.push_back({v, best, bw});
        origin.push_back(v);
    }
    out.tokens = static_cast<std::int64_t>(tokens.size());
    TdParams p = td;
    p.label = "closest";
    out.td = disseminate(eng, tokens, origin, p, &out.state);
    return out;
}

std::int64_t default_apsp_x(ApspMode mode, int n, const ApspParams& p, Weight W) {
    if (p.x > 0) return std::min<std::int64_t>(p.x, n);
    const double dn = static_cast<double>(n);
    const double ln = std::log(std::max(dn, 2.0));
    double x = 1;
    switch (mode) {
        case ApspMode::exact:
            // n^(2/3) up to the log factor that h = xi * x * ln n adds back
            x = p.x_scale * std::cbrt(dn * dn) / ln;
            break;
        case ApspMode::approx3:
            x = std::ceil(std::sqrt(dn));
            break;
        case ApspMode::approx_eps:
            if (!(p.eps > 0)) throw InvalidArgument("approx_eps needs eps > 0");
            x = std::sqrt(dn * p.eps / (2.0 * static_cast<double>(std::max<Weight>(W, 1)))) / (p.xi * ln);
            break;
    }
    return std::clamp<std::int64_t>(static_cast<std::int64_t>(std::ceil(x - 1e-9)), 1, n);
}

ApspResult exact_apsp(Engine& eng, const ApspParams& p) {
    const int n = eng.n();
    ApspResult res;
    const std::int64_t x = default_apsp_x(ApspMode::exact, n, p, eng.graph().max_weight());
    LocalKnowledge know;
    res.skeleton = construct_skeleton(eng, x, {p.xi, {}, false}, &know);
    const auto& s = res.skeleton;
    const auto sk = transmit_skeleton(eng, s, p.td);
    const auto dt = transmit_distances(eng, s, know, p.td);
    res.skeleton_tokens = sk.tokens;
    res.other_tokens = dt.tokens;
    res.td_complete = sk.td.complete && dt.td.complete;

    const std::size_t k = s.marked.size();
    res.d = DistanceMatrix(n);
    for (NodeId u = 1; u <= n; ++u) {
        const auto ds = sk.view(s, u);
        const auto a = through_skeleton(s, ds, know.dh, u);
        const bool all = knows_all(dt.state, u);
        for (NodeId v = 1; v <= n; ++v) {
            if (u == v) continue;
            Weight best = know.dh.at(u, v);
            if (s.is_marked[static_cast<std::size_t>(v)]) {
                // D'_{vv'} is 0 only for v' = v
                best = std::min(best, a[static_cast<std::size_t>(s.index_of(v))]);
            } else {
                for (std::size_t j = 0; j < k; ++j) {
                    const int t = dt.token_id[j][static_cast<std::size_t>(v)];
                    if (t < 0 || (!all && !dt.state.knows(u, t))) continue;
                    best = std::min(best, sat_add(a[j], dt.dprime[j][static_cast<std::size_t>(v)]));
                }
            }
            res.d.at(u, v) = best;
        }
    }
    return res;
}

ApspResult approx_apsp(Engine& eng, ApspMode mode, const ApspParams& p) {
    if (mode == ApspMode::exact) return exact_apsp(eng, p);
    if (mode == ApspMode::approx_eps && !(p.eps > 0)) throw InvalidArgument("approx_eps needs eps > 0");
    const int n = eng.n();
    ApspResult res;
    const std::int64_t x = default_apsp_x(mode, n, p, eng.graph().max_weight());
    LocalKnowledge know;
    res.skeleton = construct_skeleton(eng, x, {p.xi, {}, true}, &know);
    const auto& s = res.skeleton;
    const auto sk = transmit_skeleton(eng, s, p.td);
    const auto ct = transmit_closest(eng, s, know, p.td);
    res.skeleton_tokens = sk.tokens;
    res.other_tokens = ct.tokens;
    res.td_complete = sk.td.complete && ct.td.complete;

    DistanceMatrix d(n);
    for (NodeId u = 1; u <= n; ++u) {
        const auto ds = sk.view(s, u);
        const auto a = through_skeleton(s, ds, know.dh, u);
        const bool all = knows_all(ct.state, u);
        for (NodeId v = 1; v <= n; ++v) {
            if (u == v) continue;
            Weight best = know.dexp.at(u, v);
            NodeId vp = 0;
            Weight dv = kInf;
            if (s.is_marked[static_cast<std::size_t>(v)]) {
                vp = v;
                dv = 0;
            } else {
                const int t = ct.token_id[static_cast<std::size_t>(v)];
                if (t >= 0 && (all || ct.state.knows(u, t))) {
                    vp = ct.closest[static_cast<std::size_t>(v)];
                    dv = ct.dist[static_cast<std::size_t>(v)];
                }
            }
            if (vp != 0) best = std::min(best, sat_add(a[static_cast<std::size_t>(s.index_of(vp))], dv));
            d.at(u, v) = best;
        }
    }
    // each orientation is a real path weight; keep the shorter one
    res.d = DistanceMatrix(n);
    for (NodeId u = 1; u <= n; ++u)
        for (NodeId v = 1; v <= n; ++v) res.d.at(u, v) = std::min(d.at(u, v), d.at(v, u));
    return res;
}

}  // namespace hybridnet
