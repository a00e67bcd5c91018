#include "hybridnet/graph.hpp"

#include <algorithm>
#include <deque>
#include <queue>
#include <tuple>

namespace hybridnet {

WeightedGraph::WeightedGraph(int n, Weight max_weight, std::vector<Edge> edges)
    : n_(n), max_weight_(max_weight), edges_(std::move(edges)), adj_(static_cast<std::size_t>(n) + 1) {
    if (n < 1) throw InvalidArgument("graph needs at least one node");
    if (max_weight < 1) throw InvalidArgument("max weight must be at least 1");
    for (auto& e : edges_) {
        if (e.u < 1 || e.u > n || e.v < 1 || e.v > n)
            throw InvalidArgument("edge endpoint out of range: " + std::to_string(e.u) + " " + std::to_string(e.v));
        if (e.u == e.v) throw InvalidArgument("self-loop at node " + std::to_string(e.u));
        if (e.w < 1 || e.w > max_weight)
            throw InvalidArgument("edge weight " + std::to_string(e.w) + " outside 1.." + std::to_string(max_weight));
        if (e.u > e.v) std::swap(e.u, e.v);
        adj_[static_cast<std::size_t>(e.u)].push_back({e.v, e.w});
        adj_[static_cast<std::size_t>(e.v)].push_back({e.u, e.w});
    }
    std::sort(edges_.begin(), edges_.end(), [](const Edge& a, const Edge& b) {
        return std::tie(a.u, a.v) < std::tie(b.u, b.v);
    });
    for (std::size_t i = 1; i < edges_.size(); ++i)
        if (edges_[i].u == edges_[i - 1].u && edges_[i].v == edges_[i - 1].v)
            throw InvalidArgument("parallel edge " + std::to_string(edges_[i].u) + " " + std::to_string(edges_[i].v));
    for (auto& a : adj_) std::sort(a.begin(), a.end(), [](const Arc& x, const Arc& y) { return x.to < y.to; });
}

Weight WeightedGraph::weight(NodeId u, NodeId v) const {
    const auto& a = adj_[static_cast<std::size_t>(u)];
    auto it = std::lower_bound(a.begin(), a.end(), v, [](const Arc& x, NodeId id) { return x.to < id; });
    if (it == a.end() || it->to != v) return kInf;
    return it->w;
}

Weight WeightedGraph::heaviest_edge() const {
    Weight w = 0;
    for (const auto& e : edges_) w = std::max(w, e.w);
    return w;
}

bool WeightedGraph::is_connected() const {
    if (n_ <= 1) return true;
    std::vector<char> seen(static_cast<std::size_t>(n_) + 1, 0);
    std::vector<NodeId> stack{1};
    seen[1] = 1;
    int count = 1;
    while (!stack.empty()) {
        const NodeId v = stack.back();
        stack.pop_back();
        for (const auto& a : neighbors(v)) {
            if (!seen[static_cast<std::size_t>(a.to)]) {
                seen[static_cast<std::size_t>(a.to)] = 1;
                ++count;
                stack.push_back(a.to);
            }
        }
    }
    return count == n_;
}

namespace {

void check_node(const WeightedGraph& g, NodeId s) {
    if (s < 1 || s > g.n()) throw InvalidArgument("node " + std::to_string(s) + " outside 1.." + std::to_string(g.n()));
}

}  // namespace

DistanceMap dijkstra(const WeightedGraph& g, NodeId s) {
    check_node(g, s);
    DistanceMap out;
    out.source = s;
    out.dist.assign(static_cast<std::size_t>(g.n()) + 1, kInf);
    out.dist[static_cast<std::size_t>(s)] = 0;
    using Item = std::pair<Weight, NodeId>;
    std::priority_queue<Item, std::vector<Item>, std::greater<>> pq;
    pq.push({0, s});
    while (!pq.empty()) {
        auto [d, v] = pq.top();
        pq.pop();
        if (d != out.dist[static_cast<std::size_t>(v)]) continue;
        for (const auto& a : g.neighbors(v)) {
            const Weight nd = sat_add(d, a.w);
            auto& cur = out.dist[static_cast<std::size_t>(a.to)];
            if (nd < cur) {
                cur = nd;
                pq.push({nd, a.to});
            }
        }
    }
    return out;
}

std::vector<NodeId> shortest_path_parents(const WeightedGraph& g, const DistanceMap& d) {
    std::vector<NodeId> parent(static_cast<std::size_t>(g.n()) + 1, 0);
    for (NodeId v = 1; v <= g.n(); ++v) {
        if (v == d.source || is_inf(d[v])) continue;
        for (const auto& a : g.neighbors(v)) {  // sorted, so the first hit is the smallest ID
            if (!is_inf(d[a.to]) && d[a.to] + a.w == d[v]) {
                parent[static_cast<std::size_t>(v)] = a.to;
                break;
            }
        }
    }
    return parent;
}

DistanceMap h_limited_distances(const WeightedGraph& g, NodeId s, int h) {
    check_node(g, s);
    if (h < 0) throw InvalidArgument("hop limit must be non-negative");
    DistanceMap out;
    out.source = s;
    out.hop_limit = h;
    out.dist.assign(static_cast<std::size_t>(g.n()) + 1, kInf);
    out.dist[static_cast<std::size_t>(s)] = 0;
    std::vector<NodeId> frontier{s};
    std::vector<char> in_next(static_cast<std::size_t>(g.n()) + 1, 0);
    for (int round = 0; round < h && !frontier.empty(); ++round) {
        // relax from the values of the previous round only
        std::vector<std::pair<NodeId, Weight>> updates;
        for (NodeId v : frontier)
            for (const auto& a : g.neighbors(v)) updates.push_back({a.to, sat_add(out.dist[static_cast<std::size_t>(v)], a.w)});
        std::vector<NodeId> next;
        for (auto [u, d] : updates) {
            auto& cur = out.dist[static_cast<std::size_t>(u)];
            if (d < cur) {
                cur = d;
                if (!in_next[static_cast<std::size_t>(u)]) {
                    in_next[static_cast<std::size_t>(u)] = 1;
                    next.push_back(u);
                }
            }
        }
        for (NodeId u : next) in_next[static_cast<std::size_t>(u)] = 0;
        frontier = std::move(next);
    }
    return out;
}

KSourceDistances bellman_ford_k_sources(const WeightedGraph& g, const std::vector<NodeId>& sources, int h) {
    if (sources.empty()) throw InvalidArgument("source set must be nonempty");
    if (h < 0) throw InvalidArgument("hop limit must be non-negative");
    for (NodeId s : sources) check_node(g, s);
    const auto n = static_cast<std::size_t>(g.n());
    const std::size_t k = sources.size();
    KSourceDistances out;
    out.sources = sources;
    out.dist.assign(k, std::vector<Weight>(n + 1, kInf));
    // changed[v] lists the source indices whose label at v improved last round
    std::vector<std::vector<std::uint32_t>> changed(n + 1);
    for (std::size_t i = 0; i < k; ++i) {
        out.dist[i][static_cast<std::size_t>(sources[i])] = 0;
        changed[static_cast<std::size_t>(sources[i])].push_back(static_cast<std::uint32_t>(i));
    }
    std::vector<std::vector<std::uint32_t>> next(n + 1);
    std::vector<std::vector<int>> stamp(k, std::vector<int>(n + 1, -1));
    std::vector<std::vector<std::pair<std::uint32_t, Weight>>> snapshot(n + 1);
    for (int round = 0; round < h; ++round) {
        std::int64_t max_labels = 0;
        bool any = false;
        // a node sends the values it held at the start of the round
        for (std::size_t v = 1; v <= n; ++v) {
            auto& snap = snapshot[v];
            snap.clear();
            for (std::uint32_t i : changed[v]) snap.emplace_back(i, out.dist[i][v]);
            if (!snap.empty()) {
                any = true;
                max_labels = std::max<std::int64_t>(max_labels, static_cast<std::int64_t>(snap.size()));
            }
        }
        if (!any) {
            // nothing in flight; the remaining rounds are silent
            out.labels_per_round.resize(static_cast<std::size_t>(h), 0);
            out.rounds = h;
            return out;
        }
        for (auto& c : next) c.clear();
        for (std::size_t v = 1; v <= n; ++v) {
            for (const auto& a : g.neighbors(static_cast<NodeId>(v))) {
                const auto u = static_cast<std::size_t>(a.to);
                for (auto [i, val] : snapshot[v]) {
                    const Weight d = sat_add(val, a.w);
                    auto& cur = out.dist[i][u];
                    if (d < cur) {
                        cur = d;
                        if (stamp[i][u] != round) {
                            stamp[i][u] = round;
                            next[u].push_back(i);
                        }
                    }
                }
            }
        }
        for (auto& c : next) std::sort(c.begin(), c.end());
        std::swap(changed, next);
        out.labels_per_round.push_back(max_labels);
        out.max_labels_per_edge = std::max(out.max_labels_per_edge, max_labels);
    }
    out.rounds = h;
    return out;
}

int shortest_path_diameter(const WeightedGraph& g) {
    // For every source, minimum hop count among shortest paths, via Dijkstra
    // on (distance, hops) pairs. SPD is the largest such count.
    int spd = 0;
    const auto n = static_cast<std::size_t>(g.n());
    for (NodeId s = 1; s <= g.n(); ++s) {
        std::vector<Weight> dist(n + 1, kInf);
        std::vector<int> hops(n + 1, 0);
        using Item = std::tuple<Weight, int, NodeId>;
        std::priority_queue<Item, std::vector<Item>, std::greater<>> pq;
        dist[static_cast<std::size_t>(s)] = 0;
        pq.push({0, 0, s});
        while (!pq.empty()) {
            auto [d, hp, v] = pq.top();
            pq.pop();
            if (d != dist[static_cast<std::size_t>(v)] || hp != hops[static_cast<std::size_t>(v)]) continue;
            for (const auto& a : g.neighbors(v)) {
                const Weight nd = d + a.w;
                auto& cd = dist[static_cast<std::size_t>(a.to)];
                auto& ch = hops[static_cast<std::size_t>(a.to)];
                if (nd < cd || (nd == cd && hp + 1 < ch)) {
                    cd = nd;
                    ch = hp + 1;
                    pq.push({nd, hp + 1, a.to});
                }
            }
        }
        for (std::size_t v = 1; v <= n; ++v)
            if (!is_inf(dist[v])) spd = std::max(spd, hops[v]);
    }
    return spd;
}

DistanceMatrix all_pairs_dijkstra(const WeightedGraph& g) {
    DistanceMatrix m(g.n());
    for (NodeId s = 1; s <= g.n(); ++s) {
        const auto d = dijkstra(g, s);
        for (NodeId v = 1; v <= g.n(); ++v) m.at(s, v) = d[v];
    }
    return m;
}

std::vector<std::vector<int>> all_pairs_hops(const WeightedGraph& g) {
    const auto n = static_cast<std::size_t>(g.n());
    std::vector<std::vector<int>> out(n + 1, std::vector<int>(n + 1, kUnboundedHops));
    for (std::size_t s = 1; s <= n; ++s) {
        auto& h = out[s];
        std::deque<NodeId> q{static_cast<NodeId>(s)};
        h[s] = 0;
        while (!q.empty()) {
            const NodeId v = q.front();
            q.pop_front();
            for (const auto& a : g.neighbors(v)) {
                if (h[static_cast<std::size_t>(a.to)] < 0) {
                    h[static_cast<std::size_t>(a.to)] = h[static_cast<std::size_t>(v)] + 1;
                    q.push_back(a.to);
                }
            }
        }
    }
    return out;
}

}  // namespace hybridnet
