#pragma once

#include <cstdint>
#include <vector>

#include "hybridnet/graph.hpp"
#include "hybridnet/sim.hpp"
#include "hybridnet/tokens.hpp"

namespace hybridnet {

struct Skeleton {
    std::vector<NodeId> marked;     // sorted
    std::vector<char> is_marked;    // by node, size n+1
    std::vector<Edge> edges;        // u < v, both marked, hop(u,v) <= h, w = d_h(u,v)
    int h = 0;                      // hop radius of the skeleton edges
    int explored = 0;               // hops of local exploration (h, or m for the primed variant)
    std::int64_t x = 1;
    double xi = 8.0;
    int resamples = 0;              // empty samples that were redrawn

    // index of v in marked, or -1
    int index_of(NodeId v) const;
};

// What the nodes learned from local exploration. Row u is node u's own
// knowledge; kInf beyond reach.
struct LocalKnowledge {
    DistanceMatrix dh;    // d_h(u, v)
    DistanceMatrix dexp;  // d_explored(u, v); same as dh unless primed
};

struct SkeletonParams {
    double xi = 8.0;
    // extra nodes forced into M (source-preserving variants)
    std::vector<NodeId> special;
    // explore max(h, ceil(n/h)) hops instead of h
    bool primed = false;
};

int skeleton_hops(double xi, std::int64_t x, int n);

Skeleton construct_skeleton(Engine& eng, std::int64_t x, const SkeletonParams& p, LocalKnowledge* know);

// D^S on the marked nodes, indexed by position in skeleton.marked.
using SkeletonDistances = std::vector<std::vector<Weight>>;

SkeletonDistances skeleton_apsp(const Skeleton& s, const std::vector<Edge>& edges);

struct SkeletonTransfer {
    SkeletonDistances ds;  // from the full token set
    TokenState state;
    // D^S as node v sees it; equals ds when v received every token
    SkeletonDistances view(const Skeleton& s, NodeId v) const;
    std::int64_t tokens = 0;
    TdMetrics td;
};

SkeletonTransfer transmit_skeleton(Engine& eng, const Skeleton& s, const TdParams& td = {});

struct DistanceTransfer {
    // dprime[i][v] = d_h(marked[i], v) for unmarked v, as learned by everyone
    std::vector<std::vector<Weight>> dprime;
    std::vector<std::vector<int>> token_id;  // [i][v], -1 when no token
    TokenState state;
    std::int64_t tokens = 0;
    TdMetrics td;
};

DistanceTransfer transmit_distances(Engine& eng, const Skeleton& s, const LocalKnowledge& know,
                                    const TdParams& td = {});

struct ClosestTransfer {
    std::vector<NodeId> closest;  // by node; v itself for marked v, 0 when no marked node is in reach
    std::vector<Weight> dist;     // d_h(v, closest[v])
    std::vector<int> token_id;    // by node, -1 when v sent no token
    TokenState state;
    std::int64_t tokens = 0;
    TdMetrics td;
};

ClosestTransfer transmit_closest(Engine& eng, const Skeleton& s, const LocalKnowledge& know,
                                 const TdParams& td = {});

struct ApspParams {
    double xi = 8.0;
    std::int64_t x = 0;      // 0 selects the mode default
    double x_scale = 0.4;    // exact default x = x_scale * n^(2/3) / ln n
    double eps = 0.5;        // approx_eps only
    TdParams td{.log_discount = true};
};

enum class ApspMode { exact, approx3, approx_eps };

struct ApspResult {
    DistanceMatrix d;
    Skeleton skeleton;
    std::int64_t skeleton_tokens = 0;
    std::int64_t other_tokens = 0;
    bool td_complete = true;
};

std::int64_t default_apsp_x(ApspMode mode, int n, const ApspParams& p, Weight W);

ApspResult exact_apsp(Engine& eng, const ApspParams& p = {});
ApspResult approx_apsp(Engine& eng, ApspMode mode, const ApspParams& p = {});

}  // namespace hybridnet
