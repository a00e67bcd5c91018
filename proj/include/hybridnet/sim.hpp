#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include "hybridnet/graph.hpp"

namespace hybridnet {

inline constexpr std::int64_t kUnbounded = -1;

struct HybridConfig {
    std::int64_t lambda = kUnbounded;  // messages per local edge per direction per round
    std::int64_t gamma = 0;            // global sends + receives per node per round; 0 = ceil(log2 n)
    std::uint64_t seed = 1;
    int message_field_budget = 3;
    bool strict = false;
    double c_agg = 1.0;  // aggregation and convergecast cost ceil(c_agg * log2 n) rounds

    void validate() const;
    std::int64_t gamma_for(int n) const;
    bool lambda_unbounded() const { return lambda == kUnbounded; }
};

std::int64_t ceil_log2(std::int64_t n);

struct CapacityFault : Error {
    CapacityFault(const std::string& what, std::int64_t round) : Error(what), round(round) {}
    std::int64_t round;
};

// An algorithm broke one of its own structural guarantees.
struct ProtocolFault : Error {
    using Error::Error;
};

enum class Channel { local, global };

struct Message {
    NodeId src = 0;
    NodeId dst = 0;
    Channel channel = Channel::local;
    std::vector<Weight> payload;
};

struct RoundEntry {
    std::int64_t round = 0;
    std::int64_t max_local_per_edge = 0;
    std::int64_t max_global_per_node = 0;
    std::int64_t dropped = 0;
    std::string phase;
    std::int64_t count = 1;  // identical consecutive rounds folded into one entry
};

class RoundLedger {
public:
    void add(RoundEntry e);
    // Entries may span several rounds (see RoundEntry::count); write_csv expands them.
    const std::vector<RoundEntry>& entries() const { return entries_; }
    std::int64_t rounds() const { return rounds_; }
    std::int64_t dropped() const { return dropped_; }
    std::int64_t max_local() const { return max_local_; }
    std::int64_t max_global() const { return max_global_; }
    // phase label -> rounds, in order of first appearance
    const std::vector<std::pair<std::string, std::int64_t>>& rounds_by_phase() const { return by_phase_; }
    std::int64_t rounds_in(const std::string& phase) const;
    void write_csv(std::ostream& out) const;

private:
    std::vector<RoundEntry> entries_;
    std::vector<std::pair<std::string, std::int64_t>> by_phase_;
    std::int64_t rounds_ = 0;
    std::int64_t dropped_ = 0;
    std::int64_t max_local_ = 0;
    std::int64_t max_global_ = 0;
};

struct AggInput {
    NodeId participant = 0;
    std::int64_t key = 0;
    Weight value = kInf;
};

struct AggGroup {
    NodeId target = 0;
    std::vector<AggInput> inputs;
};

struct AggResult {
    NodeId target = 0;
    std::int64_t key = 0;
    Weight value = kInf;
    bool empty = true;
};

// One job of a random-delay schedule: steps[t] lists the directed local edges
// the job uses in its own round t (one message each).
struct DelayJob {
    std::vector<std::vector<std::pair<NodeId, NodeId>>> steps;
};

struct SchedulePlan {
    std::vector<std::int64_t> start;  // 1-based start round per job
    std::int64_t window = 0;          // ceil(alpha * C / lambda)
    std::int64_t length = 0;
    std::int64_t max_edge_load = 0;
    std::int64_t overloaded_slots = 0;  // (edge, round) pairs above lambda
};

SchedulePlan schedule_with_random_delays(const std::vector<DelayJob>& jobs, std::int64_t C, std::int64_t D,
                                         std::int64_t lambda, std::uint64_t seed, double alpha = 3.0,
                                         bool strict = false);

// Synchronous round engine over one graph. Single-threaded; one per run.
class Engine {
public:
    Engine(const WeightedGraph& g, HybridConfig cfg);

    const WeightedGraph& graph() const { return *g_; }
    const HybridConfig& config() const { return cfg_; }
    int n() const { return g_->n(); }
    std::int64_t gamma() const { return gamma_; }
    std::int64_t lambda() const { return cfg_.lambda; }
    std::uint64_t seed() const { return cfg_.seed; }
    RoundLedger& ledger() { return ledger_; }
    const RoundLedger& ledger() const { return ledger_; }

    void set_phase(std::string label) { phase_ = std::move(label); }
    const std::string& phase() const { return phase_; }

    struct Delivery {
        std::vector<std::vector<Message>> local_inbox;   // by receiver
        std::vector<std::vector<Message>> global_inbox;  // by receiver
        std::int64_t dropped = 0;
    };

    // Messages are numbered in list order. On overflow the adversary drops
    // the highest-numbered excess messages; strict mode throws instead.
    Delivery run_round(const std::vector<Message>& sends);

    // For protocols that keep their own per-edge and per-node counters.
    void record_round(std::int64_t max_local, std::int64_t max_global, std::int64_t dropped = 0);
    void record_idle(std::int64_t rounds);

    // Throws in strict mode; otherwise returns the excess so the caller can
    // record it as dropped. u = v = 0 means "some edge" / "some node".
    std::int64_t check_local_load(std::int64_t load, NodeId u, NodeId v);
    std::int64_t check_global_load(std::int64_t load, NodeId v);

    std::int64_t aggregation_cost() const;
    std::vector<AggResult> aggregate_min(const std::vector<AggGroup>& groups);
    bool convergecast_and(const std::vector<char>& flags);

    // Packs a batch of global messages (src, dst) into as few rounds as the
    // gamma budget allows, in list order. Returns the rounds used.
    std::int64_t deliver_global_batch(const std::vector<std::pair<NodeId, NodeId>>& batch);

private:
    const WeightedGraph* g_;
    HybridConfig cfg_;
    std::int64_t gamma_;
    RoundLedger ledger_;
    std::string phase_ = "init";
};

}  // namespace hybridnet
