#pragma once

#include <cstdint>
#include <vector>

#include "hybridnet/apsp.hpp"
#include "hybridnet/graph.hpp"
#include "hybridnet/sim.hpp"
#include "hybridnet/tokens.hpp"

namespace hybridnet {

struct Broadcast {
    NodeId from = 0;
    Weight value = kInf;
};

struct BccSession {
    std::vector<NodeId> participants;                  // sorted
    std::vector<std::vector<Broadcast>> transcripts;   // per simulated round, the full broadcast list
    std::int64_t rounds = 0;
    bool transcripts_agree = true;                     // every participant saw every broadcast, every round
};

// Disseminates one broadcast per participant. Returns, per participant (in
// session order), the broadcasts it learned.
std::vector<std::vector<Broadcast>> simulate_bcc_round(Engine& eng, BccSession& session,
                                                       const std::vector<Broadcast>& broadcasts,
                                                       const TdParams& td = {});

struct BccParams {
    double eps = 0.5;
    double xi = 8.0;
    std::int64_t x = 0;  // 0: n^(1/3) * eps^-6 clamped to [1, n]
    TdParams td{.log_discount = true};
};

struct BccMetrics {
    std::int64_t x = 0;
    int h = 0;
    std::size_t marked = 0;
    std::int64_t bcc_rounds = 0;
    bool transcripts_agree = true;
    bool published_complete = true;
};

std::int64_t default_bcc_x(int n, double eps);

// Bellman-Ford on the skeleton, one BCC round per relaxation; s must be a
// participant. Returns labels by participant index.
std::vector<Weight> skeleton_sssp_bcc(Engine& eng, BccSession& session, const Skeleton& s, NodeId source,
                                      const TdParams& td = {});

DistanceMap approx_sssp_bcc(Engine& eng, NodeId s, const BccParams& p = {}, BccMetrics* metrics = nullptr);

}  // namespace hybridnet
