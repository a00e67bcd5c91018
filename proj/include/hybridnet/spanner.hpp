#pragma once

#include <cstdint>
#include <iosfwd>
#include <utility>
#include <vector>

#include "hybridnet/graph.hpp"
#include "hybridnet/sim.hpp"

namespace hybridnet {

struct BallMember {
    NodeId v = 0;
    Weight d = kInf;  // (h*x)-limited distance from the center
};

// B(r, x, L): nodes within h*x hops and distance x*L of r. With `active`
// (size n+1), the search runs in the subgraph induced by active nodes; r
// itself must be active. Sorted by node ID.
std::vector<BallMember> ball(const WeightedGraph& g, NodeId r, int x, double L, int h,
                             const std::vector<char>* active = nullptr);

struct SpannerEdge {
    NodeId u = 0;  // the endpoint that added the edge and is responsible for it
    NodeId v = 0;  // the sampled center
    Weight w = kInf;
    std::vector<NodeId> witness;  // u .. v in the input graph, total weight w
    int stage = 0;
    int phase = 0;
};

struct SpannerParams {
    int h = 8;
    int k = 3;
    double eta = 2.0;
    Weight W = 0;  // 0: h * heaviest edge; raised to that value when smaller
};

struct StageResult {
    std::vector<SpannerEdge> edges;
    std::vector<std::int64_t> max_membership;  // per phase: most sampled balls any node sits in
    std::vector<std::int64_t> sampled;         // per phase
    bool all_deactivated = true;
};

// One distance band [L/eta, L], L = eta^stage. Edges are not deduplicated.
StageResult spanner_stage(const WeightedGraph& g, const std::vector<NodeId>& marked, int stage,
                          const SpannerParams& p, std::uint64_t seed);

struct SkeletonSpanner {
    int n = 0;
    std::vector<NodeId> marked;
    std::vector<SpannerEdge> edges;  // one per node pair, lightest kept
    int h = 0;
    int k = 0;
    double eta = 2.0;
    Weight W = 0;
    int stages = 0;
    std::int64_t added = 0;  // before deduplication
    std::int64_t max_membership = 0;
    std::vector<std::int64_t> responsible;  // by node

    std::int64_t max_responsible() const;
    WeightedGraph as_graph() const;
};

int spanner_stages(Weight W, double eta);

// Rounds are charged to eng (if given) with the realization cost
// (delta + log n) * memberships * log n * h(k - j) per phase; delta is the
// input orientation, 0 meaning the maximum degree.
SkeletonSpanner build_skeleton_spanner(const WeightedGraph& g, const std::vector<NodeId>& marked,
                                       const SpannerParams& p, std::uint64_t seed, Engine* eng = nullptr,
                                       std::int64_t delta = 0);

// Weight of the walk, or kInf if some step is not an edge of g.
Weight path_weight(const WeightedGraph& g, const std::vector<NodeId>& path);

void write_spanner(std::ostream& graph_out, std::ostream& witness_out, const SkeletonSpanner& s);

struct BaswanaSen {
    WeightedGraph spanner;
    std::vector<NodeId> responsible;  // parallel to spanner.edges()
    std::vector<std::int64_t> responsible_count;
    int rounds = 0;
};

// (2k-1)-spanner. Ties on weight fall back to endpoint IDs; clusters are
// compared by center ID.
BaswanaSen baswana_sen(const WeightedGraph& g, int k, std::uint64_t seed, Engine* eng = nullptr);

struct HierarchyParams {
    double alpha = 8.0;
    double c = 4.0;      // h = c * alpha
    double eta = 2.0;
    double c_bfs = 2.0;  // BFS rounds = ceil(c_bfs * alpha * log_alpha n)
};

struct SpannerHierarchy {
    int n = 0;
    int k = 0;
    int h = 0;
    double alpha = 0;
    double eta = 2.0;
    std::vector<WeightedGraph> levels;             // G_1 .. G_T
    std::vector<std::vector<NodeId>> marked;       // nodes of G_i; all of V for G_1
    std::vector<SkeletonSpanner> skeleton;         // for G_2 .. G_T
    std::vector<std::int64_t> responsible_max;     // per level

    int T() const { return static_cast<int>(levels.size()); }
};

int hierarchy_k(int n, double alpha);

SpannerHierarchy build_hierarchy(const WeightedGraph& g, const HierarchyParams& p, std::uint64_t seed,
                                 Engine* eng = nullptr);

struct RecursiveMetrics {
    int T = 0;
    int k = 0;
    int h = 0;
    int bfs_rounds = 0;
    double stretch_budget = 0;  // (2 eta k)^T (2k - 1)
    std::size_t union_edges = 0;
};

// Union of all levels, lightest edge per pair.
WeightedGraph spanner_union(const SpannerHierarchy& hs);

DistanceMap recursive_sssp(Engine& eng, NodeId s, const HierarchyParams& p = {}, RecursiveMetrics* metrics = nullptr);

}  // namespace hybridnet
