#include "hybridnet/sim.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <ostream>
#include <tuple>

#include "hybridnet/rng.hpp"

namespace hybridnet {

std::int64_t ceil_log2(std::int64_t n) {
    std::int64_t r = 0;
    while ((std::int64_t{1} << r) < n) ++r;
    return r;
}

void HybridConfig::validate() const {
    if (lambda != kUnbounded && lambda < 1) throw InvalidArgument("lambda must be positive or unbounded");
    if (gamma < 0) throw InvalidArgument("gamma must be non-negative (0 selects ceil(log2 n))");
    if (message_field_budget < 3) throw InvalidArgument("message_field_budget must be at least 3");
    if (!(c_agg > 0)) throw InvalidArgument("c_agg must be positive");
}

std::int64_t HybridConfig::gamma_for(int n) const {
    if (gamma > 0) return gamma;
    return std::max<std::int64_t>(1, ceil_log2(n));
}

void RoundLedger::add(RoundEntry e) {
    if (e.count < 1) return;
    e.round = rounds_ + 1;
    rounds_ += e.count;
    dropped_ += e.dropped * e.count;
    max_local_ = std::max(max_local_, e.max_local_per_edge);
    max_global_ = std::max(max_global_, e.max_global_per_node);
    auto it = std::find_if(by_phase_.begin(), by_phase_.end(), [&](const auto& p) { return p.first == e.phase; });
    if (it == by_phase_.end())
        by_phase_.emplace_back(e.phase, e.count);
    else
        it->second += e.count;
    entries_.push_back(std::move(e));
}

std::int64_t RoundLedger::rounds_in(const std::string& phase) const {
    for (const auto& [p, r] : by_phase_)
        if (p == phase) return r;
    return 0;
}

void RoundLedger::write_csv(std::ostream& out) const {
    out << "round,max_local_per_edge,max_global_per_node,dropped,phase_label\n";
    for (const auto& e : entries_)
        for (std::int64_t r = e.round; r < e.round + e.count; ++r)
            out << r << ',' << e.max_local_per_edge << ',' << e.max_global_per_node << ',' << e.dropped << ','
            << e.phase << '\n';
}

Engine::Engine(const WeightedGraph& g, HybridConfig cfg) : g_(&g), cfg_(cfg) {
    cfg_.validate();
    gamma_ = cfg_.gamma_for(g.n());
}

Engine::Delivery Engine::run_round(const std::vector<Message>& sends) {
    const auto nodes = static_cast<std::size_t>(n());
    Delivery d;
    d.local_inbox.resize(nodes + 1);
    d.global_inbox.resize(nodes + 1);
    const std::int64_t round = ledger_.rounds() + 1;
    std::map<std::pair<NodeId, NodeId>, std::int64_t> edge_load;
    std::vector<std::int64_t> node_load(nodes + 1, 0);
    std::int64_t max_local = 0;
    std::int64_t max_global = 0;
    for (const auto& m : sends) {
        if (m.src < 1 || m.src > n() || m.dst < 1 || m.dst > n())
            throw InvalidArgument("message endpoint out of range");
        if (static_cast<int>(m.payload.size()) > cfg_.message_field_budget)
            throw InvalidArgument("payload of " + std::to_string(m.payload.size()) + " fields exceeds budget " +
                                  std::to_string(cfg_.message_field_budget));
        if (m.channel == Channel::local) {
            if (!g_->has_edge(m.src, m.dst))
                throw InvalidArgument("local message between non-adjacent nodes " + std::to_string(m.src) + " and " +
                                      std::to_string(m.dst));
            auto& load = edge_load[{m.src, m.dst}];
            if (!cfg_.lambda_unbounded() && load >= cfg_.lambda) {
                if (cfg_.strict)
                    throw CapacityFault("local capacity exceeded on edge " + std::to_string(m.src) + "->" +
                                            std::to_string(m.dst) + " in round " + std::to_string(round),
                                        round);
                ++d.dropped;
                continue;
            }
            ++load;
            max_local = std::max(max_local, load);
            d.local_inbox[static_cast<std::size_t>(m.dst)].push_back(m);
        } else {
            auto& ls = node_load[static_cast<std::size_t>(m.src)];
            auto& ld = node_load[static_cast<std::size_t>(m.dst)];
            const std::int64_t need = m.src == m.dst ? 2 : 1;
            const bool fits = m.src == m.dst ? ls + need <= gamma_ : (ls < gamma_ && ld < gamma_);
            if (!fits) {
                if (cfg_.strict) {
                    const NodeId at = ls + (m.src == m.dst ? need : 1) > gamma_ ? m.src : m.dst;
                    throw CapacityFault("global capacity exceeded at node " + std::to_string(at) + " in round " +
                                            std::to_string(round),
                                        round);
                }
                ++d.dropped;
                continue;
            }
            if (m.src == m.dst)
                ls += 2;
            else {
                ++ls;
                ++ld;
            }
            max_global = std::max({max_global, ls, ld});
            d.global_inbox[static_cast<std::size_t>(m.dst)].push_back(m);
        }
    }
    ledger_.add({0, max_local, max_global, d.dropped, phase_});
    return d;
}

void Engine::record_round(std::int64_t max_local, std::int64_t max_global, std::int64_t dropped) {
    ledger_.add({0, max_local, max_global, dropped, phase_});
}

void Engine::record_idle(std::int64_t rounds) {
    if (rounds > 0) ledger_.add({0, 0, 0, 0, phase_, rounds});
}

std::int64_t Engine::check_local_load(std::int64_t load, NodeId u, NodeId v) {
    if (cfg_.lambda_unbounded() || load <= cfg_.lambda) return 0;
    if (cfg_.strict) {
        const std::string where = u == 0 ? "a local edge" : "edge " + std::to_string(u) + "->" + std::to_string(v);
        throw CapacityFault("local capacity exceeded on " + where + " in round " + std::to_string(ledger_.rounds() + 1),
                            ledger_.rounds() + 1);
    }
    return load - cfg_.lambda;
}

std::int64_t Engine::check_global_load(std::int64_t load, NodeId v) {
    if (load <= gamma_) return 0;
    if (cfg_.strict) {
        const std::string where = v == 0 ? "a node" : "node " + std::to_string(v);
        throw CapacityFault("global capacity exceeded at " + where + " in round " + std::to_string(ledger_.rounds() + 1),
                            ledger_.rounds() + 1);
    }
    return load - gamma_;
}

std::int64_t Engine::aggregation_cost() const {
    return static_cast<std::int64_t>(std::ceil(cfg_.c_agg * std::log2(static_cast<double>(n())) - 1e-9));
}

std::vector<AggResult> Engine::aggregate_min(const std::vector<AggGroup>& groups) {
    const auto n = static_cast<std::size_t>(this->n());
    const std::int64_t cap = ceil_log2(static_cast<std::int64_t>(n)) + 1;
    std::vector<std::int64_t> member(n + 1, 0);
    std::vector<char> targeted(n + 1, 0);
    std::vector<AggResult> out;
    out.reserve(groups.size());
    bool any = false;
    for (const auto& grp : groups) {
        if (grp.target < 1 || static_cast<std::size_t>(grp.target) > n)
            throw InvalidArgument("aggregation target out of range");
        if (targeted[static_cast<std::size_t>(grp.target)]++)
            throw ProtocolFault("node " + std::to_string(grp.target) + " is the target of more than one aggregation");
        AggResult r;
        r.target = grp.target;
        std::vector<NodeId> seen;
        for (const auto& in : grp.inputs) {
            if (in.participant < 1 || static_cast<std::size_t>(in.participant) > n)
                throw InvalidArgument("aggregation participant out of range");
            seen.push_back(in.participant);
            if (r.empty || in.value < r.value || (in.value == r.value && in.key < r.key)) {
                r.value = in.value;
                r.key = in.key;
                r.empty = false;
            }
        }
        std::sort(seen.begin(), seen.end());
        seen.erase(std::unique(seen.begin(), seen.end()), seen.end());
        for (NodeId p : seen) {
            if (++member[static_cast<std::size_t>(p)] > cap)
                throw ProtocolFault("node " + std::to_string(p) + " joins more than " + std::to_string(cap) +
                                    " concurrent aggregations");
            any = true;
        }
        out.push_back(r);
    }
    // each participant sends one message per aggregation round
    const std::int64_t cost = aggregation_cost();
    for (std::int64_t i = 0; i < cost; ++i) record_round(0, any ? 1 : 0, 0);
    return out;
}

bool Engine::convergecast_and(const std::vector<char>& flags) {
    if (flags.size() != static_cast<std::size_t>(n()) + 1) throw InvalidArgument("convergecast needs one flag per node");
    bool all = true;
    for (std::size_t v = 1; v < flags.size(); ++v) all = all && flags[v];
    const std::int64_t cost = aggregation_cost();
    for (std::int64_t i = 0; i < cost; ++i) record_round(0, 1, 0);
    return all;
}

std::int64_t Engine::deliver_global_batch(const std::vector<std::pair<NodeId, NodeId>>& batch) {
    if (batch.empty()) return 0;
    const auto n = static_cast<std::size_t>(this->n());
    std::vector<std::int64_t> load(n + 1, 0);
    std::vector<std::size_t> pending(batch.size());
    for (std::size_t i = 0; i < batch.size(); ++i) pending[i] = i;
    std::int64_t rounds = 0;
    std::vector<std::size_t> rest;
    std::vector<NodeId> touched;
    while (!pending.empty()) {
        rest.clear();
        touched.clear();
        std::int64_t max_global = 0;
        for (std::size_t i : pending) {
            const auto [s, t] = batch[i];
            auto& ls = load[static_cast<std::size_t>(s)];
            auto& lt = load[static_cast<std::size_t>(t)];
            if (ls < gamma_ && lt < gamma_) {
                if (ls == 0) touched.push_back(s);
                ++ls;
                if (lt == 0) touched.push_back(t);
                ++lt;
                max_global = std::max({max_global, ls, lt});
            } else {
                rest.push_back(i);
            }
        }
        if (rest.size() == pending.size())
            throw Error("global batch cannot make progress with gamma=" + std::to_string(gamma_));
        for (NodeId v : touched) load[static_cast<std::size_t>(v)] = 0;
        record_round(0, max_global, 0);
        ++rounds;
        std::swap(pending, rest);
    }
    return rounds;
}

SchedulePlan schedule_with_random_delays(const std::vector<DelayJob>& jobs, std::int64_t C, std::int64_t D,
                                         std::int64_t lambda, std::uint64_t seed, double alpha, bool strict) {
    if (lambda < 1) throw InvalidArgument("schedule needs a finite positive lambda");
    if (C < 0 || D < 0) throw InvalidArgument("C and D must be non-negative");
    if (alpha < 1) throw InvalidArgument("alpha must be at least 1");
    SchedulePlan plan;
    plan.window = std::max<std::int64_t>(
        1, static_cast<std::int64_t>(std::ceil(alpha * static_cast<double>(C) / static_cast<double>(lambda) - 1e-9)));
    std::map<std::tuple<std::int64_t, NodeId, NodeId>, std::int64_t> load;
    for (std::size_t i = 0; i < jobs.size(); ++i) {
        const auto& job = jobs[i];
        if (static_cast<std::int64_t>(job.steps.size()) > D)
            throw InvalidArgument("job " + std::to_string(i) + " runs longer than D");
        Rng rng = stream(seed, Stream::delays, i);
        const std::int64_t t0 = rng.range(1, plan.window);
        plan.start.push_back(t0);
        for (std::size_t t = 0; t < job.steps.size(); ++t) {
            auto step = job.steps[t];
            std::sort(step.begin(), step.end());
            if (std::adjacent_find(step.begin(), step.end()) != step.end())
                throw ProtocolFault("job " + std::to_string(i) + " sends more than one message over an edge in its round " +
                                    std::to_string(t + 1));
            for (const auto& [u, v] : job.steps[t]) {
                auto& l = load[{t0 + static_cast<std::int64_t>(t), u, v}];
                ++l;
                plan.max_edge_load = std::max(plan.max_edge_load, l);
                if (l == lambda + 1) {
                    ++plan.overloaded_slots;
                    if (strict)
                        throw CapacityFault("random-delay schedule overloads edge " + std::to_string(u) + "->" +
                                                std::to_string(v),
                                            t0 + static_cast<std::int64_t>(t));
                }
            }
        }
        plan.length = std::max(plan.length, t0 - 1 + static_cast<std::int64_t>(job.steps.size()));
    }
    return plan;
}

}  // namespace hybridnet
