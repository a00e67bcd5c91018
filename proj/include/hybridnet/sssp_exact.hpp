#pragma once

#include <cstdint>
#include <iosfwd>
#include <vector>

#include "hybridnet/graph.hpp"
#include "hybridnet/sim.hpp"

namespace hybridnet {

std::int64_t triangular(std::int64_t i);

// Shortest-path tree of the subgraph induced by the nodes within `radius`
// hops of root. Parents are the smallest-ID predecessor on a shortest path.
struct SpTree {
    NodeId root = 0;
    std::vector<NodeId> nodes;                 // ascending
    std::vector<NodeId> parent;                // by node, size n+1; 0 for root and non-members
    std::vector<Weight> dist;                  // by node, kInf for non-members
    std::vector<std::vector<NodeId>> children; // by node, ascending
    std::vector<int> depth;                    // hop distance from root in G, -1 for non-members

    bool contains(NodeId v) const { return v == root || parent[static_cast<std::size_t>(v)] != 0; }
};

SpTree build_spt(const WeightedGraph& g, NodeId root, int radius);

// children[v] lists v's children (any order); nodes under an excluded node
// (and the excluded node itself) are ignored. Needs at least 2 nodes left.
NodeId splitting_node(const std::vector<std::vector<NodeId>>& children, NodeId root,
                      const std::vector<NodeId>& excluded = {});

// Nodes of the subtree at root, skipping excluded subtrees.
std::vector<NodeId> residual_subtree(const std::vector<std::vector<NodeId>>& children, NodeId root,
                                     const std::vector<NodeId>& excluded);

struct SsspParams {
    // Use the tree distance from v to x instead of d_i(v, x). Candidates then
    // never use more than t(i) hops.
    bool tree_distance = false;
    int max_phases = 0;  // 0: n + 1
};

struct TraceEntry {
    int phase = 0;
    NodeId node = 0;
    Weight value = kInf;
};

struct SsspMetrics {
    int phases = 0;
    std::vector<std::int64_t> rounds_per_phase;
    std::vector<std::vector<Weight>> values;  // values[i-1][v] after phase i
    std::int64_t max_live_messages = 0;
    std::int64_t max_view_load = 0;           // edges sent over one local edge in one round
    std::int64_t splits = 0;
    std::int64_t leftover_messages = 0;  // still held when a phase's steps ran out
    std::vector<TraceEntry> trace;
};

DistanceMap exact_sssp(Engine& eng, NodeId s, const SsspParams& p = {}, SsspMetrics* metrics = nullptr);

// One phase: extends prev (d_{t(i-1)}) to the phase-i values.
std::vector<Weight> sssp_phase(Engine& eng, const std::vector<Weight>& prev, int i, const SsspParams& p,
                               SsspMetrics* metrics = nullptr);

void write_trace_csv(std::ostream& out, const SsspMetrics& m);

struct HkResult {
    std::vector<NodeId> sources;
    std::vector<std::vector<Weight>> dist;  // [source index][v] = d_h(source, v)
    int q = 0;                              // hop reach per phase, ceil(sqrt(k h)) capped at h
    int phases = 0;
};

HkResult hk_ssp(Engine& eng, const std::vector<NodeId>& sources, int h);

}  // namespace hybridnet
