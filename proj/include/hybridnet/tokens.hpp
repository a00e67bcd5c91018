#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "hybridnet/graph.hpp"
#include "hybridnet/sim.hpp"

namespace hybridnet {

// Payload of at most two node IDs and one weight, e.g. <u, v, d_h(u,v)>.
struct Token {
    NodeId a = 0;
    NodeId b = 0;
    Weight w = 0;
    bool operator==(const Token&) const = default;
};

struct TdParams {
    double zeta = 4.0;     // multiplication holder constant
    double c_local = 2.0;  // local dissemination runs ceil(c_local * x * ln n) rounds
    double alpha = 3.0;    // random-delay window factor
    std::int64_t x = 0;    // 0 selects default_td_x(k, n)
    // with x = 0: use discounted_td_x instead, trading seeding rounds for a
    // shorter local phase; APSP and the BCC simulation use it
    bool log_discount = false;
    std::string label = "td";
};

class TokenState {
public:
    TokenState() = default;
    TokenState(int n, std::vector<Token> tokens, std::vector<NodeId> origin);

    int n() const { return n_; }
    int k() const { return static_cast<int>(tokens_.size()); }
    const Token& token(int t) const { return tokens_[static_cast<std::size_t>(t)]; }
    NodeId origin(int t) const { return origin_[static_cast<std::size_t>(t)]; }

    // T_v: multiset of token IDs the node currently holds for forwarding
    std::vector<std::vector<int>>& held() { return held_; }
    const std::vector<int>& held(NodeId v) const { return held_[static_cast<std::size_t>(v)]; }
    std::int64_t max_held() const;
    std::int64_t total_held() const;

    bool knows(NodeId v, int t) const {
        return (know_[static_cast<std::size_t>(v)][static_cast<std::size_t>(t) >> 6] >> (t & 63)) & 1u;
    }
    // returns true when the token was new to v
    bool learn(NodeId v, int t);
    std::int64_t known_count(NodeId v) const { return known_[static_cast<std::size_t>(v)]; }
    bool complete() const;
    // number of tokens known by at least one node
    std::int64_t distinct_known() const;
    // nodes whose held multiset contains t
    std::int64_t holders(int t) const;

private:
    int n_ = 0;
    std::vector<Token> tokens_;
    std::vector<NodeId> origin_;
    std::vector<std::vector<int>> held_;
    std::vector<std::vector<std::uint64_t>> know_;
    std::vector<std::int64_t> known_;
};

struct TdMetrics {
    std::int64_t x = 0;
    std::int64_t sigma = 0;
    std::int64_t rounds_balancing = 0;
    std::int64_t rounds_multiplication = 0;
    std::int64_t rounds_seeding = 0;
    std::int64_t rounds_local = 0;
    std::int64_t max_load_after_balancing = 0;
    int multiplication_phases = 0;
    std::int64_t copies_after_multiplication = 0;
    std::int64_t min_holders = 0;
    bool reduced_rate = false;
    bool delayed = false;
    bool complete = false;

    std::int64_t rounds() const {
        return rounds_balancing + rounds_multiplication + rounds_seeding + rounds_local;
    }
};

std::int64_t sigma_for(int n);
// max(2, ceil(sqrt(k)))
std::int64_t default_td_x(std::int64_t k, int n);
// max(2, ceil(sqrt(k) / ln n)): sqrt(k) up to the log factor that the
// local phase multiplies back in
std::int64_t discounted_td_x(std::int64_t k, int n);
std::int64_t local_rounds(double c_local, std::int64_t x, int n);

void token_balancing(Engine& eng, TokenState& st, TdMetrics& m, const std::string& label = "td");
void token_multiplication(Engine& eng, TokenState& st, TdMetrics& m, const std::string& label = "td");
void token_seeding(Engine& eng, TokenState& st, std::int64_t x, const TdParams& p, TdMetrics& m);
void local_dissemination(Engine& eng, TokenState& st, std::int64_t x, const TdParams& p, TdMetrics& m);

// Balancing, multiplication, seeding and local dissemination in sequence.
TdMetrics token_dissemination(Engine& eng, TokenState& st, const TdParams& p = {});

// Convenience: disseminate tokens created at the given nodes and return the
// metrics; every node's knowledge is left in st.
TdMetrics disseminate(Engine& eng, const std::vector<Token>& tokens, const std::vector<NodeId>& origin,
                      const TdParams& p, TokenState* out = nullptr);

}  // namespace hybridnet
