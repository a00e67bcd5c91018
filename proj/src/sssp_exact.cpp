#include "hybridnet/sssp_exact.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <ostream>
#include <queue>

namespace hybridnet {

std::int64_t triangular(std::int64_t i) {
    if (i < 0) throw InvalidArgument("triangular number of a negative index");
    return i * (i + 1) / 2;
}

namespace {

std::vector<int> hops_from(const WeightedGraph& g, NodeId s, int limit) {
    std::vector<int> hop(static_cast<std::size_t>(g.n()) + 1, -1);
    std::queue<NodeId> q;
    hop[static_cast<std::size_t>(s)] = 0;
    q.push(s);
    while (!q.empty()) {
        const NodeId v = q.front();
        q.pop();
        const int hv = hop[static_cast<std::size_t>(v)];
        if (limit >= 0 && hv >= limit) continue;
        for (const auto& a : g.neighbors(v))
            if (hop[static_cast<std::size_t>(a.to)] < 0) {
                hop[static_cast<std::size_t>(a.to)] = hv + 1;
                q.push(a.to);
            }
    }
    return hop;
}

// Largest number of edges one node forwards over a local edge in round r of
// the edge flooding, r = 1, 2, ...: in round r a node relays the edges whose
// nearer endpoint is r-1 hops away.
std::vector<std::int64_t> view_loads(const WeightedGraph& g, int rounds) {
    std::vector<std::int64_t> load(static_cast<std::size_t>(rounds) + 1, 0);
    for (NodeId v = 1; v <= g.n(); ++v) {
        const auto hop = hops_from(g, v, rounds);
        std::vector<std::int64_t> hist(static_cast<std::size_t>(rounds) + 1, 0);
        for (const auto& e : g.edges()) {
            const int a = hop[static_cast<std::size_t>(e.u)];
            const int b = hop[static_cast<std::size_t>(e.v)];
            int md = a < 0 ? b : (b < 0 ? a : std::min(a, b));
            if (md >= 0 && md < rounds) ++hist[static_cast<std::size_t>(md)];
        }
        for (int r = 1; r <= rounds; ++r)
            load[static_cast<std::size_t>(r)] =
                std::max(load[static_cast<std::size_t>(r)], hist[static_cast<std::size_t>(r - 1)]);
    }
    return load;
}

bool excluded_node(const std::vector<NodeId>& excl, NodeId v) {
    return std::find(excl.begin(), excl.end(), v) != excl.end();
}

// Post-order subtree sizes over the residual tree.
struct Residual {
    std::vector<NodeId> order;            // preorder
    std::map<NodeId, std::int64_t> size;  // subtree sizes within the residual tree
};

template <class Children>
Residual residual(const Children& kids, NodeId root, const std::vector<NodeId>& excl) {
    Residual r;
    if (excluded_node(excl, root)) return r;
    std::vector<NodeId> stack{root};
    while (!stack.empty()) {
        const NodeId v = stack.back();
        stack.pop_back();
        r.order.push_back(v);
        for (NodeId c : kids(v))
            if (!excluded_node(excl, c)) stack.push_back(c);
    }
    for (auto it = r.order.rbegin(); it != r.order.rend(); ++it) {
        std::int64_t s = 1;
        for (NodeId c : kids(*it))
            if (!excluded_node(excl, c)) s += r.size[c];
        r.size[*it] = s;
    }
    return r;
}

template <class Children>
NodeId split(const Children& kids, NodeId root, const std::vector<NodeId>& excl, const Residual& r) {
    const auto total = static_cast<std::int64_t>(r.order.size());
    if (total < 2) throw InvalidArgument("splitting node needs a tree with at least 2 nodes");
    NodeId u = root;
    for (;;) {
        NodeId w = 0;
        std::int64_t sw = -1;
        for (NodeId c : kids(u)) {
            if (excluded_node(excl, c)) continue;
            const std::int64_t sc = r.size.at(c);
            if (sc > sw || (sc == sw && c < w)) {
                sw = sc;
                w = c;
            }
        }
        if (w == 0) return u;
        // p(w) < |S|/2, compared in integers
        if (2 * (total - sw) < total)
            u = w;
        else
            return u;
    }
}

}  // namespace

SpTree build_spt(const WeightedGraph& g, NodeId root, int radius) {
    if (root < 1 || root > g.n()) throw InvalidArgument("tree root out of range");
    if (radius < 0) throw InvalidArgument("radius must be non-negative");
    const auto n = static_cast<std::size_t>(g.n());
    const auto hop = hops_from(g, root, radius);
    SpTree t;
    t.root = root;
    t.parent.assign(n + 1, 0);
    t.dist.assign(n + 1, kInf);
    t.children.assign(n + 1, {});
    using Item = std::pair<Weight, NodeId>;
    std::priority_queue<Item, std::vector<Item>, std::greater<>> pq;
    t.dist[static_cast<std::size_t>(root)] = 0;
    pq.emplace(0, root);
    while (!pq.empty()) {
        auto [d, v] = pq.top();
        pq.pop();
        if (d != t.dist[static_cast<std::size_t>(v)]) continue;
        for (const auto& a : g.neighbors(v)) {
            if (hop[static_cast<std::size_t>(a.to)] < 0) continue;
            const Weight nd = d + a.w;
            if (nd < t.dist[static_cast<std::size_t>(a.to)]) {
                t.dist[static_cast<std::size_t>(a.to)] = nd;
                pq.emplace(nd, a.to);
            }
        }
    }
    for (NodeId v = 1; v <= g.n(); ++v) {
        if (hop[static_cast<std::size_t>(v)] < 0) continue;
        t.nodes.push_back(v);
        if (v == root) continue;
        for (const auto& a : g.neighbors(v)) {  // ascending IDs: first match is the smallest
            if (hop[static_cast<std::size_t>(a.to)] < 0) continue;
            if (t.dist[static_cast<std::size_t>(a.to)] + a.w == t.dist[static_cast<std::size_t>(v)]) {
                t.parent[static_cast<std::size_t>(v)] = a.to;
                break;
            }
        }
    }
    t.depth.assign(n + 1, -1);
    for (NodeId v : t.nodes) t.depth[static_cast<std::size_t>(v)] = hop[static_cast<std::size_t>(v)];
    for (NodeId v : t.nodes)
        if (v != root) t.children[static_cast<std::size_t>(t.parent[static_cast<std::size_t>(v)])].push_back(v);
    return t;
}

NodeId splitting_node(const std::vector<std::vector<NodeId>>& children, NodeId root,
                      const std::vector<NodeId>& excluded) {
    auto kids = [&](NodeId v) -> const std::vector<NodeId>& { return children.at(static_cast<std::size_t>(v)); };
    const auto r = residual(kids, root, excluded);
    return split(kids, root, excluded, r);
}

std::vector<NodeId> residual_subtree(const std::vector<std::vector<NodeId>>& children, NodeId root,
                                     const std::vector<NodeId>& excluded) {
    auto kids = [&](NodeId v) -> const std::vector<NodeId>& { return children.at(static_cast<std::size_t>(v)); };
    auto r = residual(kids, root, excluded);
    std::sort(r.order.begin(), r.order.end());
    return r.order;
}

std::vector<Weight> sssp_phase(Engine& eng, const std::vector<Weight>& prev, int i, const SsspParams& p,
                               SsspMetrics* metrics) {
    const auto& g = eng.graph();
    const int n = g.n();
    const auto nn = static_cast<std::size_t>(n) + 1;
    if (prev.size() != nn) throw InvalidArgument("phase needs one value per node");
    if (i < 1) throw InvalidArgument("phases start at 1");
    const std::int64_t start = eng.ledger().rounds();

    // two rounds of edge flooding extend every view from G(v, 2i-2) to G(v, 2i)
    eng.set_phase("sssp/view");
    const auto loads = view_loads(g, 2 * i);
    for (int r = 2 * i - 1; r <= 2 * i; ++r) {
        const auto load = loads[static_cast<std::size_t>(r)];
        eng.record_round(load, 0, eng.check_local_load(load, 0, 0));
        if (metrics) metrics->max_view_load = std::max(metrics->max_view_load, load);
    }

    eng.set_phase("sssp/recursion");
    std::map<NodeId, SpTree> trees;
    auto tree = [&](NodeId u) -> const SpTree& {
        auto it = trees.find(u);
        if (it == trees.end()) it = trees.emplace(u, build_spt(g, u, i)).first;
        return it->second;
    };
    std::map<NodeId, DistanceMap> local;
    auto dloc = [&](NodeId v, NodeId x) {
        auto it = local.find(v);
        if (it == local.end()) it = local.emplace(v, h_limited_distances(g, v, i)).first;
        return it->second[x];
    };

    struct Msg {
        NodeId u;
        Weight d;
        std::vector<NodeId> excl;
    };
    std::vector<Weight> cand = prev;
    std::vector<std::vector<Msg>> R(nn);
    for (NodeId v = 1; v <= n; ++v)
        if (!is_inf(prev[static_cast<std::size_t>(v)])) R[static_cast<std::size_t>(v)].push_back({v, prev[static_cast<std::size_t>(v)], {}});

    const std::int64_t cap = ceil_log2(n) + 1;
    const std::int64_t steps = ceil_log2(n) + 1;
    for (std::int64_t step = 0; step < steps; ++step) {
        std::vector<std::vector<Msg>> next(nn);
        std::map<NodeId, AggGroup> groups;
        for (NodeId v = 1; v <= n; ++v) {
            const auto& rv = R[static_cast<std::size_t>(v)];
            const auto live = static_cast<std::int64_t>(rv.size());
            if (metrics) metrics->max_live_messages = std::max(metrics->max_live_messages, live);
            if (live > cap)
                throw ProtocolFault("node " + std::to_string(v) + " holds " + std::to_string(live) +
                                    " recursion messages, more than " + std::to_string(cap));
            for (const auto& m : rv) {
                auto& c = cand[static_cast<std::size_t>(v)];
                c = std::min(c, m.d);
                const auto& t = tree(m.u);
                auto kids = [&](NodeId w) -> const std::vector<NodeId>& { return t.children[static_cast<std::size_t>(w)]; };
                const auto res = residual(kids, v, m.excl);
                const auto total = static_cast<std::int64_t>(res.order.size());
                if (total <= 1) continue;
                const NodeId x = split(kids, v, m.excl, res);
                // every piece left after removing x has at most half the nodes
                const std::int64_t above = total - res.size.at(x);
                bool ok = 2 * above <= total;
                for (NodeId c2 : kids(x))
                    if (!excluded_node(m.excl, c2)) ok = ok && 2 * res.size.at(c2) <= total;
                if (!ok) throw ProtocolFault("splitting node does not halve the subtree");
                if (metrics) ++metrics->splits;
                auto excl = m.excl;
                excl.push_back(x);
                next[static_cast<std::size_t>(v)].push_back({m.u, m.d, std::move(excl)});
                const Weight hop = p.tree_distance ? t.dist[static_cast<std::size_t>(x)] - t.dist[static_cast<std::size_t>(v)]
                                                   : dloc(v, x);
                auto& grp = groups[x];
                grp.target = x;
                grp.inputs.push_back({v, m.u, sat_add(m.d, hop)});
            }
        }
        std::vector<AggGroup> list;
        list.reserve(groups.size());
        for (auto& [x, grp] : groups) list.push_back(std::move(grp));
        const auto results = eng.aggregate_min(list);

        // winners start recursions at their children over local edges
        std::vector<std::pair<NodeId, Weight>> best(nn, {0, kInf});
        bool sent = false;
        for (const auto& r : results) {
            if (r.empty) continue;
            const NodeId x = r.target;
            const auto w = static_cast<NodeId>(r.key);
            auto& c = cand[static_cast<std::size_t>(x)];
            c = std::min(c, r.value);
            const auto& t = tree(w);
            for (NodeId ch : t.children[static_cast<std::size_t>(x)]) {
                const Weight d = sat_add(r.value, g.weight(x, ch));
                auto& b = best[static_cast<std::size_t>(ch)];
                if (d < b.second || (d == b.second && w < b.first)) b = {w, d};
                sent = true;
            }
        }
        eng.record_round(sent ? 1 : 0, 0);
        for (NodeId v = 1; v <= n; ++v) {
            const auto& b = best[static_cast<std::size_t>(v)];
            if (b.first == 0) continue;
            auto& c = cand[static_cast<std::size_t>(v)];
            c = std::min(c, b.second);
            next[static_cast<std::size_t>(v)].push_back({b.first, b.second, {}});
        }
        R = std::move(next);
    }
    // children reached through an excluded subtree restart with L = {} and
    // may still hold work here; the phase ends regardless
    if (metrics)
        for (NodeId v = 1; v <= n; ++v) metrics->leftover_messages += static_cast<std::int64_t>(R[static_cast<std::size_t>(v)].size());

    if (metrics) {
        metrics->values.push_back(cand);
        metrics->rounds_per_phase.push_back(eng.ledger().rounds() - start);
        for (NodeId v = 1; v <= n; ++v) metrics->trace.push_back({i, v, cand[static_cast<std::size_t>(v)]});
    }
    return cand;
}

DistanceMap exact_sssp(Engine& eng, NodeId s, const SsspParams& p, SsspMetrics* metrics) {
    const int n = eng.n();
    if (s < 1 || s > n) throw InvalidArgument("source out of range");
    std::vector<Weight> val(static_cast<std::size_t>(n) + 1, kInf);
    val[static_cast<std::size_t>(s)] = 0;
    const int limit = p.max_phases > 0 ? p.max_phases : n + 1;
    SsspMetrics local;
    SsspMetrics& m = metrics ? *metrics : local;
    for (int i = 1;; ++i) {
        if (i > limit) throw ProtocolFault("exact SSSP did not settle within " + std::to_string(limit) + " phases");
        auto next = sssp_phase(eng, val, i, p, &m);
        std::vector<char> same(static_cast<std::size_t>(n) + 1, 1);
        for (NodeId v = 1; v <= n; ++v) same[static_cast<std::size_t>(v)] = next[static_cast<std::size_t>(v)] == val[static_cast<std::size_t>(v)];
        eng.set_phase("sssp/convergecast");
        const bool unchanged = eng.convergecast_and(same);
        m.rounds_per_phase.back() += eng.aggregation_cost();
        val = std::move(next);
        m.phases = i;
        if (unchanged && i > 1) break;
    }
    DistanceMap out;
    out.source = s;
    out.dist = std::move(val);
    return out;
}

void write_trace_csv(std::ostream& out, const SsspMetrics& m) {
    out << "phase,node,value\n";
    for (const auto& e : m.trace) out << e.phase << ',' << e.node << ',' << format_weight(e.value) << '\n';
}

HkResult hk_ssp(Engine& eng, const std::vector<NodeId>& sources, int h) {
    const auto& g = eng.graph();
    const int n = g.n();
    if (sources.empty()) throw InvalidArgument("hk_ssp needs at least one source");
    if (h < 1) throw InvalidArgument("hk_ssp needs h >= 1");
    for (NodeId s : sources)
        if (s < 1 || s > n) throw InvalidArgument("source out of range");
    HkResult res;
    res.sources = sources;
    const auto k = static_cast<double>(sources.size());
    res.q = std::min(h, static_cast<int>(std::ceil(std::sqrt(k * h) - 1e-9)));

    eng.set_phase("hk/view");
    const auto loads = view_loads(g, 2 * res.q);
    for (int r = 1; r <= 2 * res.q; ++r) {
        const auto load = loads[static_cast<std::size_t>(r)];
        eng.record_round(load, 0, eng.check_local_load(load, 0, 0));
    }

    // Each phase pushes every source's values q more hops. Values follow the
    // relaxation directly; the recursion that delivers them is charged at its
    // cost of ceil(log n)+1 steps of one aggregation plus one local round,
    // once per source.
    eng.set_phase("hk/phase");
    res.dist.assign(sources.size(), std::vector<Weight>(static_cast<std::size_t>(n) + 1, kInf));
    for (std::size_t j = 0; j < sources.size(); ++j) res.dist[j][static_cast<std::size_t>(sources[j])] = 0;
    for (int done = 0; done < h; done += res.q) {
        const int reach = std::min(res.q, h - done);
        for (auto& d : res.dist) {
            for (int r = 0; r < reach; ++r) {
                auto nd = d;
                for (const auto& e : g.edges()) {
                    nd[static_cast<std::size_t>(e.v)] = std::min(nd[static_cast<std::size_t>(e.v)], sat_add(d[static_cast<std::size_t>(e.u)], e.w));
                    nd[static_cast<std::size_t>(e.u)] = std::min(nd[static_cast<std::size_t>(e.u)], sat_add(d[static_cast<std::size_t>(e.v)], e.w));
                }
                d = std::move(nd);
            }
        }
        for (std::size_t j = 0; j < sources.size(); ++j) {
            for (std::int64_t step = 0; step < ceil_log2(n) + 1; ++step) {
                for (std::int64_t a = 0; a < eng.aggregation_cost(); ++a) eng.record_round(0, 1);
                eng.record_round(1, 0);
            }
        }
        ++res.phases;
    }
    return res;
}

}  // namespace hybridnet
