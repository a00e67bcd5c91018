#include "hybridnet/tokens.hpp"

#include <algorithm>
#include <cmath>
#include <bit>
#include <numeric>

#include "hybridnet/rng.hpp"

namespace hybridnet {

TokenState::TokenState(int n, std::vector<Token> tokens, std::vector<NodeId> origin)
    : n_(n), tokens_(std::move(tokens)), origin_(std::move(origin)) {
    if (n < 1) throw InvalidArgument("token state needs n >= 1");
    if (origin_.size() != tokens_.size()) throw InvalidArgument("every token needs an origin node");
    const auto nn = static_cast<std::size_t>(n) + 1;
    held_.assign(nn, {});
    know_.assign(nn, std::vector<std::uint64_t>((tokens_.size() + 63) / 64, 0));
    known_.assign(nn, 0);
    for (std::size_t t = 0; t < tokens_.size(); ++t) {
        const NodeId v = origin_[t];
        if (v < 1 || v > n) throw InvalidArgument("token origin out of range");
        held_[static_cast<std::size_t>(v)].push_back(static_cast<int>(t));
        learn(v, static_cast<int>(t));
    }
}

bool TokenState::learn(NodeId v, int t) {
    auto& word = know_[static_cast<std::size_t>(v)][static_cast<std::size_t>(t) >> 6];
    const std::uint64_t bit = std::uint64_t{1} << (t & 63);
    if (word & bit) return false;
    word |= bit;
    ++known_[static_cast<std::size_t>(v)];
    return true;
}

std::int64_t TokenState::max_held() const {
    std::int64_t m = 0;
    for (const auto& h : held_) m = std::max<std::int64_t>(m, static_cast<std::int64_t>(h.size()));
    return m;
}

std::int64_t TokenState::total_held() const {
    std::int64_t s = 0;
    for (const auto& h : held_) s += static_cast<std::int64_t>(h.size());
    return s;
}

bool TokenState::complete() const {
    for (NodeId v = 1; v <= n_; ++v)
        if (known_[static_cast<std::size_t>(v)] != k()) return false;
    return true;
}

std::int64_t TokenState::distinct_known() const {
    std::vector<std::uint64_t> any((tokens_.size() + 63) / 64, 0);
    for (NodeId v = 1; v <= n_; ++v)
        for (std::size_t i = 0; i < any.size(); ++i) any[i] |= know_[static_cast<std::size_t>(v)][i];
    std::int64_t c = 0;
    for (auto w : any) c += std::popcount(w);
    return c;
}

std::int64_t TokenState::holders(int t) const {
    std::int64_t c = 0;
    for (NodeId v = 1; v <= n_; ++v) {
        const auto& h = held_[static_cast<std::size_t>(v)];
        if (std::find(h.begin(), h.end(), t) != h.end()) ++c;
    }
    return c;
}

std::int64_t sigma_for(int n) { return std::max<std::int64_t>(1, ceil_log2(n)); }

std::int64_t default_td_x(std::int64_t k, int /*n*/) {
    return std::max<std::int64_t>(2, static_cast<std::int64_t>(std::ceil(std::sqrt(static_cast<double>(k)) - 1e-9)));
}

std::int64_t discounted_td_x(std::int64_t k, int n) {
    const double ln = std::log(static_cast<double>(std::max(n, 3)));
    const auto r = static_cast<std::int64_t>(std::ceil(std::sqrt(static_cast<double>(k)) / ln - 1e-9));
    return std::max<std::int64_t>(2, r);
}

std::int64_t local_rounds(double c_local, std::int64_t x, int n) {
    const double r = c_local * static_cast<double>(x) * std::log(static_cast<double>(std::max(n, 2)));
    return std::max<std::int64_t>(1, static_cast<std::int64_t>(std::ceil(r - 1e-9)));
}

namespace {

struct Send {
    NodeId from;
    NodeId to;
    int token;
};

// Delivers one logical round of global sends, packed into physical rounds
// that respect gamma. Self-addressed sends stay local and cost nothing.
std::int64_t deliver(Engine& eng, TokenState& st, const std::vector<Send>& sends,
                     std::vector<std::vector<int>>* inbox) {
    std::vector<std::pair<NodeId, NodeId>> batch;
    batch.reserve(sends.size());
    for (const auto& s : sends) {
        if (s.from != s.to) batch.emplace_back(s.from, s.to);
        st.learn(s.to, s.token);
        if (inbox) (*inbox)[static_cast<std::size_t>(s.to)].push_back(s.token);
    }
    return eng.deliver_global_batch(batch);
}

}  // namespace

void token_balancing(Engine& eng, TokenState& st, TdMetrics& m, const std::string& label) {
    eng.set_phase(label + "/balancing");
    const int n = st.n();
    const std::int64_t sigma = sigma_for(n);
    m.sigma = sigma;
    auto& held = st.held();
    std::vector<std::vector<int>> pending(held.begin(), held.end());
    std::vector<std::vector<int>> received(static_cast<std::size_t>(n) + 1);
    for (auto& h : held) h.clear();
    const std::int64_t ell = [&] {
        std::int64_t l = 0;
        for (const auto& p : pending) l = std::max<std::int64_t>(l, static_cast<std::int64_t>(p.size()));
        return l;
    }();
    const std::int64_t loops = (ell + sigma - 1) / sigma;
    for (std::int64_t r = 0; r < loops; ++r) {
        std::vector<Send> sends;
        for (NodeId v = 1; v <= n; ++v) {
            auto& p = pending[static_cast<std::size_t>(v)];
            if (p.empty()) continue;
            Rng rng = stream(eng.seed(), Stream::balancing, static_cast<std::uint64_t>(v), static_cast<std::uint64_t>(r));
            const auto cnt = std::min<std::size_t>(p.size(), static_cast<std::size_t>(sigma));
            for (std::size_t i = 0; i < cnt; ++i) {
                const auto target = static_cast<NodeId>(1 + rng.below(static_cast<std::uint64_t>(n)));
                sends.push_back({v, target, p[i]});
            }
            p.erase(p.begin(), p.begin() + static_cast<std::ptrdiff_t>(cnt));
        }
        const std::int64_t used = deliver(eng, st, sends, &received);
        // a logical round with only self-sends still takes a round
        if (used == 0) eng.record_round(0, 0);
        m.rounds_balancing += std::max<std::int64_t>(used, 1);
    }
    for (NodeId v = 1; v <= n; ++v) held[static_cast<std::size_t>(v)] = std::move(received[static_cast<std::size_t>(v)]);
    m.max_load_after_balancing = st.max_held();
}

void token_multiplication(Engine& eng, TokenState& st, TdMetrics& m, const std::string& label) {
    const int n = st.n();
    const int k = st.k();
    m.copies_after_multiplication = st.total_held();
    if (k == 0 || 2 * static_cast<std::int64_t>(k) > n) {
        m.multiplication_phases = 0;
        return;
    }
    eng.set_phase(label + "/multiplication");
    const int phi = static_cast<int>(std::floor(std::log2(static_cast<double>(n) / k) + 1e-12));
    const std::int64_t sigma = sigma_for(n);
    auto& held = st.held();
    for (int ph = 0; ph < phi; ++ph) {
        std::vector<std::vector<int>> received(static_cast<std::size_t>(n) + 1);
        // every node emits two copies per held token, sigma copies per round
        std::vector<std::vector<Send>> per_node(static_cast<std::size_t>(n) + 1);
        std::size_t longest = 0;
        for (NodeId v = 1; v <= n; ++v) {
            Rng rng = stream(eng.seed(), Stream::multiplication, static_cast<std::uint64_t>(v), static_cast<std::uint64_t>(ph));
            auto& out = per_node[static_cast<std::size_t>(v)];
            for (int t : held[static_cast<std::size_t>(v)])
                for (int c = 0; c < 2; ++c)
                    out.push_back({v, static_cast<NodeId>(1 + rng.below(static_cast<std::uint64_t>(n))), t});
            longest = std::max(longest, out.size());
        }
        const std::size_t loops = (longest + static_cast<std::size_t>(sigma) - 1) / static_cast<std::size_t>(sigma);
        for (std::size_t r = 0; r < loops; ++r) {
            std::vector<Send> sends;
            for (NodeId v = 1; v <= n; ++v) {
                const auto& out = per_node[static_cast<std::size_t>(v)];
                const std::size_t lo = r * static_cast<std::size_t>(sigma);
                for (std::size_t i = lo; i < std::min(out.size(), lo + static_cast<std::size_t>(sigma)); ++i)
                    sends.push_back(out[i]);
            }
            const std::int64_t used = deliver(eng, st, sends, &received);
            if (used == 0) eng.record_round(0, 0);
            m.rounds_multiplication += std::max<std::int64_t>(used, 1);
        }
        for (NodeId v = 1; v <= n; ++v) held[static_cast<std::size_t>(v)] = std::move(received[static_cast<std::size_t>(v)]);
    }
    m.multiplication_phases = phi;
    m.copies_after_multiplication = st.total_held();
}

void token_seeding(Engine& eng, TokenState& st, std::int64_t x, const TdParams& p, TdMetrics& m) {
    if (x < 2) throw InvalidArgument("token seeding needs x >= 2");
    eng.set_phase(p.label + "/seeding");
    const int n = st.n();
    const int k = st.k();
    const std::int64_t sigma = sigma_for(n);
    const double ln_n = std::log(static_cast<double>(std::max(n, 2)));
    const bool reduced = static_cast<double>(k) < static_cast<double>(n) / (p.zeta * ln_n);
    m.reduced_rate = reduced;
    const double prob = reduced ? static_cast<double>(k) * p.zeta * ln_n / (static_cast<double>(x) * n)
                                : 1.0 / static_cast<double>(x);
    // S_t per held copy, drawn up front; each round a node sends up to sigma
    // copies of each of its tokens
    struct Plan {
        NodeId v;
        int token;
        std::vector<NodeId> targets;
    };
    std::vector<Plan> plans;
    for (NodeId v = 1; v <= n; ++v) {
        Rng rng = stream(eng.seed(), Stream::seeding, static_cast<std::uint64_t>(v));
        for (int t : st.held(v)) {
            Plan pl{v, t, {}};
            for (NodeId u = 1; u <= n; ++u)
                if (rng.bernoulli(prob)) pl.targets.push_back(u);
            // random order so that each chunk is a random subset
            for (std::size_t i = pl.targets.size(); i > 1; --i) std::swap(pl.targets[i - 1], pl.targets[rng.below(i)]);
            plans.push_back(std::move(pl));
        }
    }
    std::size_t longest = 0;
    for (const auto& pl : plans) longest = std::max(longest, pl.targets.size());
    const std::size_t loops = (longest + static_cast<std::size_t>(sigma) - 1) / static_cast<std::size_t>(sigma);
    for (std::size_t r = 0; r < loops; ++r) {
        std::vector<Send> sends;
        const std::size_t lo = r * static_cast<std::size_t>(sigma);
        for (const auto& pl : plans)
            for (std::size_t i = lo; i < std::min(pl.targets.size(), lo + static_cast<std::size_t>(sigma)); ++i)
                sends.push_back({pl.v, pl.targets[i], pl.token});
        const std::int64_t used = deliver(eng, st, sends, nullptr);
        if (used == 0) eng.record_round(0, 0);
        m.rounds_seeding += std::max<std::int64_t>(used, 1);
    }
}

void local_dissemination(Engine& eng, TokenState& st, std::int64_t x, const TdParams& p, TdMetrics& m) {
    eng.set_phase(p.label + "/local");
    const auto& g = eng.graph();
    const int n = st.n();
    const int k = st.k();
    if (g.n() != n) throw InvalidArgument("token state and graph disagree on n");
    const std::int64_t r_local = local_rounds(p.c_local, x, n);
    const auto nn = static_cast<std::size_t>(n) + 1;

    if (eng.config().lambda_unbounded()) {
        // flood the tokens learned in the previous round
        std::vector<std::vector<int>> fresh(nn), next(nn);
        for (NodeId v = 1; v <= n; ++v)
            for (int t = 0; t < k; ++t)
                if (st.knows(v, t)) fresh[static_cast<std::size_t>(v)].push_back(t);
        for (std::int64_t r = 0; r < r_local; ++r) {
            std::int64_t max_local = 0;
            bool any = false;
            for (auto& q : next) q.clear();
            for (NodeId v = 1; v <= n; ++v) {
                const auto& f = fresh[static_cast<std::size_t>(v)];
                if (f.empty()) continue;
                any = true;
                max_local = std::max<std::int64_t>(max_local, static_cast<std::int64_t>(f.size()));
                for (const auto& a : g.neighbors(v))
                    for (int t : f)
                        if (st.learn(a.to, t)) next[static_cast<std::size_t>(a.to)].push_back(t);
            }
            eng.record_round(max_local, 0);
            ++m.rounds_local;
            std::swap(fresh, next);
            if (!any) {
                eng.record_idle(r_local - r - 1);
                m.rounds_local += r_local - r - 1;
                break;
            }
        }
        m.complete = st.complete();
        return;
    }

    // Bounded lambda: every token is a flooding job started after a random
    // delay in [1, ceil(alpha * C / lambda)] with C = k, and each directed
    // edge forwards at most lambda queued tokens per round.
    m.delayed = true;
    const std::int64_t lambda = eng.lambda();
    const std::int64_t window = std::max<std::int64_t>(
        1, static_cast<std::int64_t>(std::ceil(p.alpha * static_cast<double>(k) / static_cast<double>(lambda) - 1e-9)));
    std::vector<std::vector<int>> starts(static_cast<std::size_t>(window) + 1);
    for (int t = 0; t < k; ++t) {
        Rng rng = stream(eng.seed(), Stream::delays, static_cast<std::uint64_t>(t), 1);
        starts[static_cast<std::size_t>(rng.range(1, window))].push_back(t);
    }
    std::vector<std::vector<int>> outq(nn);
    std::vector<std::vector<std::size_t>> ptr(nn);
    for (NodeId v = 1; v <= n; ++v) ptr[static_cast<std::size_t>(v)].assign(g.neighbors(v).size(), 0);
    std::vector<char> active(static_cast<std::size_t>(k), 0);
    const std::int64_t total = window + r_local;
    std::vector<std::pair<NodeId, int>> arrivals;
    for (std::int64_t r = 1; r <= total; ++r) {
        if (r <= window) {
            for (int t : starts[static_cast<std::size_t>(r)]) {
                active[static_cast<std::size_t>(t)] = 1;
                for (NodeId v = 1; v <= n; ++v)
                    if (st.knows(v, t)) outq[static_cast<std::size_t>(v)].push_back(t);
            }
        }
        arrivals.clear();
        std::int64_t max_local = 0;
        for (NodeId v = 1; v <= n; ++v) {
            const auto& q = outq[static_cast<std::size_t>(v)];
            auto& pv = ptr[static_cast<std::size_t>(v)];
            const auto& nb = g.neighbors(v);
            for (std::size_t j = 0; j < nb.size(); ++j) {
                const std::size_t hi = std::min(q.size(), pv[j] + static_cast<std::size_t>(lambda));
                const auto sent = static_cast<std::int64_t>(hi - pv[j]);
                max_local = std::max(max_local, sent);
                eng.check_local_load(sent, v, nb[j].to);
                for (std::size_t i = pv[j]; i < hi; ++i) arrivals.emplace_back(nb[j].to, q[i]);
                pv[j] = hi;
            }
        }
        for (auto [u, t] : arrivals)
            if (st.learn(u, t)) outq[static_cast<std::size_t>(u)].push_back(t);
        eng.record_round(max_local, 0);
        ++m.rounds_local;
    }
    m.complete = st.complete();
}

TdMetrics token_dissemination(Engine& eng, TokenState& st, const TdParams& p) {
    TdMetrics m;
    const int k = st.k();
    m.x = p.x > 0 ? p.x : p.log_discount ? discounted_td_x(k, st.n()) : default_td_x(k, st.n());
    m.sigma = sigma_for(st.n());
    if (k == 0) {
        m.complete = true;
        return m;
    }
    token_balancing(eng, st, m, p.label);
    token_multiplication(eng, st, m, p.label);
    m.min_holders = st.n();
    if (m.multiplication_phases > 0)
        for (int t = 0; t < k; ++t) m.min_holders = std::min(m.min_holders, st.holders(t));
    token_seeding(eng, st, std::max<std::int64_t>(2, m.x), p, m);
    local_dissemination(eng, st, m.x, p, m);
    return m;
}

TdMetrics disseminate(Engine& eng, const std::vector<Token>& tokens, const std::vector<NodeId>& origin,
                      const TdParams& p, TokenState* out) {
    TokenState st(eng.n(), tokens, origin);
    auto m = token_dissemination(eng, st, p);
    if (out) *out = std::move(st);
    return m;
}

}  // namespace hybridnet
