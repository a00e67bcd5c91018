#include "hybridnet/spanner.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <ostream>

#include "hybridnet/rng.hpp"

namespace hybridnet {

namespace {

struct Change {
    int level;
    NodeId parent;
    Weight d;
};

// Bounded Bellman-Ford from r that keeps, per node, the levels at which its
// label improved. Enough to read d_t(r, v) for any t <= hops and to rebuild
// a witness path.
struct BoundedSearch {
    NodeId r = 0;
    std::vector<std::vector<Change>> log;  // by node
    std::vector<NodeId> reached;           // ascending

    BoundedSearch(const WeightedGraph& g, NodeId root, int hops, double limit, const std::vector<char>* active)
        : r(root), log(static_cast<std::size_t>(g.n()) + 1) {
        std::vector<Weight> dist(static_cast<std::size_t>(g.n()) + 1, kInf);
        dist[static_cast<std::size_t>(r)] = 0;
        log[static_cast<std::size_t>(r)].push_back({0, 0, 0});
        std::vector<NodeId> frontier{r};
        std::vector<std::pair<NodeId, Weight>> snap;
        for (int t = 1; t <= hops && !frontier.empty(); ++t) {
            snap.clear();
            for (NodeId u : frontier) snap.emplace_back(u, dist[static_cast<std::size_t>(u)]);
            std::vector<NodeId> changed;
            for (auto [u, du] : snap)
                for (const auto& a : g.neighbors(u)) {
                    if (active && !(*active)[static_cast<std::size_t>(a.to)]) continue;
                    const Weight nd = du + a.w;
                    if (static_cast<double>(nd) > limit + 1e-9) continue;
                    auto& dv = dist[static_cast<std::size_t>(a.to)];
                    if (nd >= dv) continue;
                    dv = nd;
                    auto& lg = log[static_cast<std::size_t>(a.to)];
                    if (!lg.empty() && lg.back().level == t)
                        lg.back() = {t, u, nd};
                    else {
                        lg.push_back({t, u, nd});
                        changed.push_back(a.to);
                    }
                }
            std::sort(changed.begin(), changed.end());
            frontier = std::move(changed);
        }
        for (NodeId v = 1; v <= g.n(); ++v)
            if (!log[static_cast<std::size_t>(v)].empty()) reached.push_back(v);
    }

    const Change* at(NodeId v, int t) const {
        const auto& lg = log[static_cast<std::size_t>(v)];
        const Change* best = nullptr;
        for (const auto& c : lg) {
            if (c.level > t) break;
            best = &c;
        }
        return best;
    }

    Weight dist(NodeId v, int t) const {
        const Change* c = at(v, t);
        return c ? c->d : kInf;
    }

    // v .. r
    std::vector<NodeId> path(NodeId v, int t) const {
        std::vector<NodeId> p{v};
        NodeId cur = v;
        while (cur != r) {
            const Change* c = at(cur, t);
            if (!c) throw ProtocolFault("witness path broken");
            cur = c->parent;
            t = c->level - 1;
            p.push_back(cur);
        }
        return p;
    }
};

void check_marked(const std::vector<NodeId>& marked, int n) {
    for (std::size_t i = 0; i < marked.size(); ++i) {
        if (marked[i] < 1 || marked[i] > n) throw InvalidArgument("marked node out of range");
        if (i > 0 && marked[i] <= marked[i - 1]) throw InvalidArgument("marked nodes must be strictly ascending");
    }
}

}  // namespace

std::vector<BallMember> ball(const WeightedGraph& g, NodeId r, int x, double L, int h,
                             const std::vector<char>* active) {
    if (x < 1 || !(L >= 1) || h < 1) throw InvalidArgument("ball needs x >= 1, L >= 1, h >= 1");
    if (r < 1 || r > g.n()) throw InvalidArgument("ball center out of range");
    if (active && !(*active)[static_cast<std::size_t>(r)]) throw InvalidArgument("ball center is inactive");
    const BoundedSearch bs(g, r, h * x, x * L, active);
    std::vector<BallMember> out;
    for (NodeId v : bs.reached) out.push_back({v, bs.dist(v, h * x)});
    return out;
}

int spanner_stages(Weight W, double eta) {
    if (!(eta > 1)) throw InvalidArgument("eta must exceed 1");
    if (W <= 1) return 1;
    return std::max(1, static_cast<int>(std::ceil(std::log(static_cast<double>(W)) / std::log(eta) - 1e-9)));
}

StageResult spanner_stage(const WeightedGraph& g, const std::vector<NodeId>& marked, int stage,
                          const SpannerParams& p, std::uint64_t seed) {
    if (p.k < 1 || p.h < 1) throw InvalidArgument("spanner needs k >= 1 and h >= 1");
    if (stage < 1) throw InvalidArgument("stages are numbered from 1");
    const int n = g.n();
    check_marked(marked, n);
    const double L = std::pow(p.eta, stage);
    const double m = static_cast<double>(marked.size());
    std::vector<char> is_marked(static_cast<std::size_t>(n) + 1, 0);
    for (NodeId v : marked) is_marked[static_cast<std::size_t>(v)] = 1;
    std::vector<char> active(static_cast<std::size_t>(n) + 1, 1);
    active[0] = 0;

    StageResult res;
    for (int j = 0; j < p.k; ++j) {
        const double prob = j == p.k - 1 ? 1.0 : std::pow(m, static_cast<double>(j + 1) / p.k - 1.0);
        std::vector<NodeId> sampled;
        for (NodeId r : marked) {
            if (!active[static_cast<std::size_t>(r)]) continue;
            Rng rng = stream(seed, Stream::spanner, static_cast<std::uint64_t>(r),
                             static_cast<std::uint64_t>(stage) * 1024 + static_cast<std::uint64_t>(j));
            if (rng.bernoulli(prob)) sampled.push_back(r);
        }
        const int reach = p.k - j;
        std::vector<std::int64_t> membership(static_cast<std::size_t>(n) + 1, 0);
        std::vector<char> next = active;
        for (NodeId r : sampled) {
            const BoundedSearch bs(g, r, p.h * reach, reach * L, &active);
            for (NodeId v : bs.reached) {
                ++membership[static_cast<std::size_t>(v)];
                if (v != r && is_marked[static_cast<std::size_t>(v)]) {
                    SpannerEdge e;
                    e.u = v;
                    e.v = r;
                    e.w = bs.dist(v, p.h * reach);
                    e.witness = bs.path(v, p.h * reach);
                    e.stage = stage;
                    e.phase = j;
                    res.edges.push_back(std::move(e));
                }
                const int inner = p.h * (reach - 1);
                if (static_cast<double>(bs.dist(v, inner)) <= (reach - 1) * L + 1e-9) next[static_cast<std::size_t>(v)] = 0;
            }
        }
        active = std::move(next);
        res.sampled.push_back(static_cast<std::int64_t>(sampled.size()));
        res.max_membership.push_back(*std::max_element(membership.begin(), membership.end()));
    }
    for (NodeId v : marked)
        if (active[static_cast<std::size_t>(v)]) res.all_deactivated = false;
    return res;
}

std::int64_t SkeletonSpanner::max_responsible() const {
    return responsible.empty() ? 0 : *std::max_element(responsible.begin(), responsible.end());
}

WeightedGraph SkeletonSpanner::as_graph() const {
    std::vector<Edge> es;
    Weight wmax = 1;
    for (const auto& e : edges) {
        es.push_back({e.u, e.v, e.w});
        wmax = std::max(wmax, e.w);
    }
    return WeightedGraph(n, wmax, std::move(es));
}

SkeletonSpanner build_skeleton_spanner(const WeightedGraph& g, const std::vector<NodeId>& marked,
                                       const SpannerParams& p, std::uint64_t seed, Engine* eng, std::int64_t delta) {
    if (p.k < 1 || p.h < 1) throw InvalidArgument("spanner needs k >= 1 and h >= 1");
    if (!(p.eta > 1)) throw InvalidArgument("eta must exceed 1");
    const int n = g.n();
    check_marked(marked, n);
    SkeletonSpanner s;
    s.n = n;
    s.marked = marked;
    s.h = p.h;
    s.k = p.k;
    s.eta = p.eta;
    // every edge must weigh at most W/h
    const Weight need = static_cast<Weight>(p.h) * std::max<Weight>(1, g.heaviest_edge());
    s.W = std::max(p.W, need);
    s.stages = spanner_stages(s.W, p.eta);
    s.responsible.assign(static_cast<std::size_t>(n) + 1, 0);

    if (delta <= 0)
        for (NodeId v = 1; v <= n; ++v) delta = std::max<std::int64_t>(delta, static_cast<std::int64_t>(g.neighbors(v).size()));
    const std::int64_t lg = std::max<std::int64_t>(1, ceil_log2(n));
    if (eng) eng->set_phase("spanner");

    std::map<std::pair<NodeId, NodeId>, std::size_t> slot;
    for (int i = 1; i <= s.stages; ++i) {
        auto st = spanner_stage(g, marked, i, p, seed);
        if (!st.all_deactivated)
            throw ProtocolFault("skeleton spanner stage " + std::to_string(i) + " ended with an active marked node");
        for (std::size_t j = 0; j < st.max_membership.size(); ++j) {
            s.max_membership = std::max(s.max_membership, st.max_membership[j]);
            if (eng) {
                const std::int64_t iters = static_cast<std::int64_t>(p.h) * (p.k - static_cast<int>(j));
                eng->record_idle((delta + lg) * std::max<std::int64_t>(1, st.max_membership[j]) * lg * iters);
            }
        }
        s.added += static_cast<std::int64_t>(st.edges.size());
        for (auto& e : st.edges) {
            const auto key = std::minmax(e.u, e.v);
            auto it = slot.find(key);
            if (it == slot.end()) {
                slot.emplace(key, s.edges.size());
                s.edges.push_back(std::move(e));
            } else if (e.w < s.edges[it->second].w) {
                s.edges[it->second] = std::move(e);
            }
        }
    }
    std::sort(s.edges.begin(), s.edges.end(), [](const SpannerEdge& a, const SpannerEdge& b) {
        return std::minmax(a.u, a.v) < std::minmax(b.u, b.v);
    });
    for (const auto& e : s.edges) ++s.responsible[static_cast<std::size_t>(e.u)];
    return s;
}

Weight path_weight(const WeightedGraph& g, const std::vector<NodeId>& path) {
    Weight total = 0;
    for (std::size_t i = 1; i < path.size(); ++i) total = sat_add(total, g.weight(path[i - 1], path[i]));
    return total;
}

void write_spanner(std::ostream& graph_out, std::ostream& witness_out, const SkeletonSpanner& s) {
    write_graph(graph_out, s.as_graph());
    for (const auto& e : s.edges) {
        witness_out << e.u << ' ' << e.v << ' ' << e.w << " :";
        for (NodeId v : e.witness) witness_out << ' ' << v;
        witness_out << '\n';
    }
}

namespace {

// Total order on edges for Baswana-Sen, which assumes distinct weights.
struct Key {
    Weight w;
    NodeId a;
    NodeId b;
    auto operator<=>(const Key&) const = default;
};

Key key_of(NodeId u, NodeId v, Weight w) {
    return {w, std::min(u, v), std::max(u, v)};
}

}  // namespace

BaswanaSen baswana_sen(const WeightedGraph& g, int k, std::uint64_t seed, Engine* eng) {
    if (k < 1) throw InvalidArgument("baswana_sen needs k >= 1");
    const int n = g.n();
    const auto N = static_cast<std::size_t>(n) + 1;
    // alive[v] = neighbours u with edge (v, u) still in E'
    std::vector<std::map<NodeId, Weight>> alive(N);
    for (const auto& e : g.edges()) {
        alive[static_cast<std::size_t>(e.u)][e.v] = e.w;
        alive[static_cast<std::size_t>(e.v)][e.u] = e.w;
    }
    auto drop = [&](NodeId u, NodeId v) {
        alive[static_cast<std::size_t>(u)].erase(v);
        alive[static_cast<std::size_t>(v)].erase(u);
    };
    std::map<std::pair<NodeId, NodeId>, NodeId> chosen;  // edge -> responsible
    auto add = [&](NodeId v, NodeId u) { chosen.emplace(std::minmax(u, v), v); };

    std::vector<NodeId> cluster(N);  // center, 0 when unclustered
    for (NodeId v = 1; v <= n; ++v) cluster[static_cast<std::size_t>(v)] = v;
    const double prob = std::pow(static_cast<double>(n), -1.0 / k);
    int rounds = 0;

    // lightest alive edge from v into each neighbouring cluster
    auto lightest = [&](NodeId v) {
        std::map<NodeId, std::pair<Key, NodeId>> best;
        for (auto [u, w] : alive[static_cast<std::size_t>(v)]) {
            const NodeId c = cluster[static_cast<std::size_t>(u)];
            const Key kk = key_of(v, u, w);
            auto it = best.find(c);
            if (it == best.end() || kk < it->second.first) best[c] = {kk, u};
        }
        return best;
    };

    for (int i = 1; i < k; ++i) {
        std::vector<char> sampled(N, 0);
        for (NodeId c = 1; c <= n; ++c) {
            if (cluster[static_cast<std::size_t>(c)] != c) continue;  // c is not a live center
            Rng rng = stream(seed, Stream::baswana_sen, static_cast<std::uint64_t>(c), static_cast<std::uint64_t>(i));
            if (rng.bernoulli(prob)) sampled[static_cast<std::size_t>(c)] = 1;
        }
        std::vector<NodeId> next(N, 0);
        std::vector<std::pair<NodeId, NodeId>> to_drop;
        std::vector<std::pair<NodeId, NodeId>> to_add;
        for (NodeId v = 1; v <= n; ++v) {
            const NodeId cv = cluster[static_cast<std::size_t>(v)];
            if (cv == 0) continue;
            if (sampled[static_cast<std::size_t>(cv)]) {
                next[static_cast<std::size_t>(v)] = cv;
                continue;
            }
            const auto best = lightest(v);
            const std::pair<Key, NodeId>* join = nullptr;
            NodeId join_c = 0;
            for (const auto& [c, kv] : best)
                if (sampled[static_cast<std::size_t>(c)] && (!join || kv.first < join->first)) {
                    join = &kv;
                    join_c = c;
                }
            if (!join) {
                for (const auto& [c, kv] : best) to_add.emplace_back(v, kv.second);
                for (const auto& [u, w] : alive[static_cast<std::size_t>(v)]) to_drop.emplace_back(v, u);
                continue;
            }
            to_add.emplace_back(v, join->second);
            next[static_cast<std::size_t>(v)] = join_c;
            for (const auto& [c, kv] : best) {
                if (c != join_c && !(kv.first < join->first)) continue;
                if (c != join_c) to_add.emplace_back(v, kv.second);
                for (const auto& [u, w] : alive[static_cast<std::size_t>(v)])
                    if (cluster[static_cast<std::size_t>(u)] == c) to_drop.emplace_back(v, u);
            }
        }
        for (auto [v, u] : to_add) add(v, u);
        for (auto [v, u] : to_drop) drop(v, u);
        cluster = std::move(next);
        // edges inside a new cluster are no longer needed
        for (NodeId v = 1; v <= n; ++v) {
            std::vector<NodeId> inside;
            for (const auto& [u, w] : alive[static_cast<std::size_t>(v)])
                if (cluster[static_cast<std::size_t>(v)] != 0 &&
                    cluster[static_cast<std::size_t>(u)] == cluster[static_cast<std::size_t>(v)])
                    inside.push_back(u);
            for (NodeId u : inside) drop(v, u);
        }
        rounds += 2;  // cluster announcement, join decision
    }
    for (NodeId v = 1; v <= n; ++v)
        for (const auto& [c, kv] : lightest(v)) add(v, kv.second);
    rounds += 1;

    BaswanaSen out;
    std::vector<Edge> es;
    for (const auto& [uv, resp] : chosen) {
        es.push_back({uv.first, uv.second, g.weight(uv.first, uv.second)});
        out.responsible.push_back(resp);
    }
    out.responsible_count.assign(N, 0);
    for (NodeId r : out.responsible) ++out.responsible_count[static_cast<std::size_t>(r)];
    out.spanner = WeightedGraph(n, g.max_weight(), std::move(es));
    out.rounds = rounds;
    if (eng) {
        eng->set_phase("baswana_sen");
        for (int r = 0; r < rounds; ++r) eng->record_round(1, 0, eng->check_local_load(1, 0, 0));
    }
    return out;
}

int hierarchy_k(int n, double alpha) {
    if (!(alpha > 1)) throw InvalidArgument("alpha must exceed 1");
    if (n <= 1) return 1;
    return std::max(1, static_cast<int>(std::ceil(std::log(static_cast<double>(n)) / std::log(alpha) - 1e-9)));
}

SpannerHierarchy build_hierarchy(const WeightedGraph& g, const HierarchyParams& p, std::uint64_t seed, Engine* eng) {
    if (!(p.alpha >= 5)) throw InvalidArgument("the hierarchy needs alpha >= 5");
    if (!(p.c > 0) || !(p.eta > 1)) throw InvalidArgument("hierarchy needs c > 0 and eta > 1");
    const int n = g.n();
    SpannerHierarchy hs;
    hs.n = n;
    hs.alpha = p.alpha;
    hs.eta = p.eta;
    hs.k = hierarchy_k(n, p.alpha);
    hs.h = std::max(1, static_cast<int>(std::ceil(p.c * p.alpha - 1e-9)));

    auto bs = baswana_sen(g, hs.k, seed, eng);
    std::vector<NodeId> all;
    for (NodeId v = 1; v <= n; ++v) all.push_back(v);
    hs.levels.push_back(bs.spanner);
    hs.marked.push_back(all);
    hs.responsible_max.push_back(
        bs.responsible_count.empty() ? 0 : *std::max_element(bs.responsible_count.begin(), bs.responsible_count.end()));

    SpannerParams sp;
    sp.h = hs.h;
    sp.k = hs.k;
    sp.eta = p.eta;
    for (int i = 2;; ++i) {
        const double prob = i == 2 ? std::log(static_cast<double>(n)) / p.alpha : 1.0 / p.alpha;
        std::vector<NodeId> next;
        for (NodeId v : hs.marked.back()) {
            Rng rng = stream(seed, Stream::hierarchy, static_cast<std::uint64_t>(v), static_cast<std::uint64_t>(i));
            if (rng.bernoulli(prob)) next.push_back(v);
        }
        if (next.empty()) break;
        const auto& prev = hs.levels.back();
        auto sk = build_skeleton_spanner(prev, next, sp, seed ^ (static_cast<std::uint64_t>(i) << 40), eng,
                                         hs.responsible_max.back());
        hs.levels.push_back(sk.as_graph());
        hs.marked.push_back(next);
        hs.responsible_max.push_back(sk.max_responsible());
        hs.skeleton.push_back(std::move(sk));
    }
    return hs;
}

WeightedGraph spanner_union(const SpannerHierarchy& hs) {
    std::map<std::pair<NodeId, NodeId>, Weight> best;
    Weight wmax = 1;
    for (const auto& lvl : hs.levels)
        for (const auto& e : lvl.edges()) {
            auto [it, fresh] = best.emplace(std::minmax(e.u, e.v), e.w);
            if (!fresh) it->second = std::min(it->second, e.w);
        }
    std::vector<Edge> es;
    for (const auto& [uv, w] : best) {
        es.push_back({uv.first, uv.second, w});
        wmax = std::max(wmax, w);
    }
    return WeightedGraph(hs.n, wmax, std::move(es));
}

DistanceMap recursive_sssp(Engine& eng, NodeId s, const HierarchyParams& p, RecursiveMetrics* metrics) {
    const auto& g = eng.graph();
    const int n = g.n();
    if (s < 1 || s > n) throw InvalidArgument("source out of range");
    const auto hs = build_hierarchy(g, p, eng.seed(), &eng);
    const auto H = spanner_union(hs);
    const auto& g1 = hs.levels.front();
    const int rounds = std::max(1, static_cast<int>(std::ceil(p.c_bfs * p.alpha * hs.k - 1e-9)));

    // G_1 edges are local; the rest are carried over the global network
    eng.set_phase("recursive/bfs");
    std::vector<Weight> d(static_cast<std::size_t>(n) + 1, kInf);
    d[static_cast<std::size_t>(s)] = 0;
    std::vector<NodeId> frontier{s};
    std::vector<char> touched(static_cast<std::size_t>(n) + 1, 0);
    for (int t = 0; t < rounds && !frontier.empty(); ++t) {
        std::vector<std::pair<NodeId, Weight>> snap;
        for (NodeId u : frontier) snap.emplace_back(u, d[static_cast<std::size_t>(u)]);
        std::vector<std::pair<NodeId, NodeId>> global;
        std::vector<NodeId> changed;
        std::int64_t local = 0;
        for (auto [u, du] : snap)
            for (const auto& a : H.neighbors(u)) {
                if (g1.weight(u, a.to) == a.w)
                    local = 1;  // one label per edge
                else
                    global.emplace_back(u, a.to);
                auto& dv = d[static_cast<std::size_t>(a.to)];
                if (du + a.w < dv) {
                    dv = du + a.w;
                    if (!touched[static_cast<std::size_t>(a.to)]) {
                        touched[static_cast<std::size_t>(a.to)] = 1;
                        changed.push_back(a.to);
                    }
                }
            }
        eng.record_round(local, 0, eng.check_local_load(local, 0, 0));
        eng.deliver_global_batch(global);
        std::sort(changed.begin(), changed.end());
        for (NodeId v : changed) touched[static_cast<std::size_t>(v)] = 0;
        frontier = std::move(changed);
    }
    DistanceMap out;
    out.source = s;
    out.dist = std::move(d);
    if (metrics) {
        metrics->T = hs.T();
        metrics->k = hs.k;
        metrics->h = hs.h;
        metrics->bfs_rounds = rounds;
        metrics->stretch_budget = std::pow(2.0 * p.eta * hs.k, hs.T()) * (2.0 * hs.k - 1.0);
        metrics->union_edges = H.m();
    }
    return out;
}

}  // namespace hybridnet
