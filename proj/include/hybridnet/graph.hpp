#pragma once

#include <cstdint>
#include <iosfwd>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

namespace hybridnet {

using Weight = std::int64_t;
using NodeId = int;

// Larger than any n*W the library accepts. Sums saturate here.
inline constexpr Weight kInf = std::numeric_limits<Weight>::max() / 4;
inline constexpr int kUnboundedHops = -1;

inline Weight sat_add(Weight a, Weight b) {
    if (a >= kInf || b >= kInf) return kInf;
    const Weight s = a + b;
    return s >= kInf ? kInf : s;
}

inline bool is_inf(Weight w) { return w >= kInf; }

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct InvalidArgument : Error {
    using Error::Error;
};

struct Edge {
    NodeId u;
    NodeId v;
    Weight w;
};

struct Arc {
    NodeId to;
    Weight w;
};

// Undirected simple graph on nodes 1..n. Adjacency lists are sorted by
// neighbor ID so every traversal is deterministic.
class WeightedGraph {
public:
    WeightedGraph() = default;
    // Throws InvalidArgument on self-loops, parallel edges, endpoints out of
    // range or weights outside 1..max_weight. Connectivity is checked
    // separately because spanner levels may be disconnected.
    WeightedGraph(int n, Weight max_weight, std::vector<Edge> edges);

    int n() const { return n_; }
    Weight max_weight() const { return max_weight_; }
    std::size_t m() const { return edges_.size(); }
    const std::vector<Edge>& edges() const { return edges_; }
    const std::vector<Arc>& neighbors(NodeId v) const { return adj_[static_cast<std::size_t>(v)]; }
    // kInf when u and v are not adjacent.
    Weight weight(NodeId u, NodeId v) const;
    bool has_edge(NodeId u, NodeId v) const { return !is_inf(weight(u, v)); }
    Weight heaviest_edge() const;
    bool is_connected() const;
    bool unit() const { return heaviest_edge() <= 1; }

private:
    int n_ = 0;
    Weight max_weight_ = 1;
    std::vector<Edge> edges_;
    std::vector<std::vector<Arc>> adj_;
};

struct DistanceMap {
    NodeId source = 1;
    int hop_limit = kUnboundedHops;
    std::vector<Weight> dist;  // index 0 unused

    Weight operator[](NodeId v) const { return dist[static_cast<std::size_t>(v)]; }
};

class DistanceMatrix {
public:
    DistanceMatrix() = default;
    explicit DistanceMatrix(int n) : n_(n), d_(static_cast<std::size_t>(n) * n, kInf) {
        for (int v = 1; v <= n; ++v) at(v, v) = 0;
    }
    int n() const { return n_; }
    Weight& at(NodeId u, NodeId v) { return d_[idx(u, v)]; }
    Weight at(NodeId u, NodeId v) const { return d_[idx(u, v)]; }
    bool operator==(const DistanceMatrix&) const = default;

private:
    std::size_t idx(NodeId u, NodeId v) const {
        return static_cast<std::size_t>(u - 1) * static_cast<std::size_t>(n_) + static_cast<std::size_t>(v - 1);
    }
    int n_ = 0;
    std::vector<Weight> d_;
};

DistanceMap dijkstra(const WeightedGraph& g, NodeId s);

// Parent of v on a shortest s-v path, choosing the smallest predecessor ID.
// parent[s] = 0; unreachable nodes also get 0.
std::vector<NodeId> shortest_path_parents(const WeightedGraph& g, const DistanceMap& d);

// h synchronous rounds of relaxation from s.
DistanceMap h_limited_distances(const WeightedGraph& g, NodeId s, int h);

struct KSourceDistances {
    std::vector<NodeId> sources;
    // dist[i][v] = d_h(sources[i], v)
    std::vector<std::vector<Weight>> dist;
    int rounds = 0;
    // largest number of labels sent over one edge in one direction in one round
    std::int64_t max_labels_per_edge = 0;
    std::vector<std::int64_t> labels_per_round;  // max per directed edge, per round

    Weight get(std::size_t source_index, NodeId v) const { return dist[source_index][static_cast<std::size_t>(v)]; }
};

// Distributed Bellman-Ford for a set of sources: each round a node forwards
// the labels that improved in the previous round to all neighbours.
KSourceDistances bellman_ford_k_sources(const WeightedGraph& g, const std::vector<NodeId>& sources, int h);

int shortest_path_diameter(const WeightedGraph& g);

DistanceMatrix all_pairs_dijkstra(const WeightedGraph& g);

// Hop distance between every pair, kUnboundedHops for disconnected pairs.
std::vector<std::vector<int>> all_pairs_hops(const WeightedGraph& g);

enum class Family { path, cycle, random_connected, grid, lb_apsp_gadget, star, broom };

struct GenOptions {
    bool unit = false;
    Weight max_weight = 0;  // 0 means n
    // broom only: length of the handle (the path part)
    int handle = 0;
};

struct GadgetLayout {
    int L = 0;
    int x = 0;
    int y = 0;
    NodeId b = 1;
    NodeId v1 = 0;
    NodeId v2 = 0;
    std::vector<NodeId> s1;
    std::vector<NodeId> s2;
};

Family parse_family(const std::string& name);
std::string family_name(Family f);

WeightedGraph gen_graph(Family family, int n, std::uint64_t seed, const GenOptions& opt = {});
GadgetLayout gadget_layout(int n, std::uint64_t seed);

WeightedGraph read_graph(std::istream& in);
void write_graph(std::ostream& out, const WeightedGraph& g);
WeightedGraph load_graph(const std::string& path);
void save_graph(const std::string& path, const WeightedGraph& g);

std::string format_weight(Weight w);
void write_matrix_csv(std::ostream& out, const DistanceMatrix& d);

}  // namespace hybridnet
