#include <doctest.h>

#include <sstream>

#include "hybridnet/rng.hpp"
#include "hybridnet/sim.hpp"
#include "oracles.hpp"

using namespace hybridnet;

namespace {
HybridConfig cfg(std::int64_t lambda, bool strict = false) {
    HybridConfig c;
    c.lambda = lambda;
    c.strict = strict;
    return c;
}
Message local(NodeId s, NodeId d) { return {s, d, Channel::local, {1}}; }
Message global(NodeId s, NodeId d) { return {s, d, Channel::global, {1}}; }
}  // namespace

TEST_SUITE("sim") {
    TEST_CASE("empty round") {
        const auto g = oracle::path(4);
        Engine eng(g, cfg(1));
        const auto d = eng.run_round({});
        CHECK(d.dropped == 0);
        for (const auto& box : d.local_inbox) CHECK(box.empty());
        CHECK(eng.ledger().rounds() == 1);
        CHECK(eng.ledger().max_local() == 0);
        CHECK(eng.ledger().max_global() == 0);
    }

    TEST_CASE("local capacity boundary") {
        const auto g = oracle::path(4);
        Engine eng(g, cfg(1));
        const auto d = eng.run_round({local(1, 2), local(1, 2), local(2, 1)});
        CHECK(d.dropped == 1);
        CHECK(d.local_inbox[2].size() == 1);
        CHECK(d.local_inbox[1].size() == 1);
        CHECK(eng.ledger().dropped() == 1);

        Engine strict(g, cfg(1, true));
        CHECK_THROWS_AS(strict.run_round({local(1, 2), local(1, 2)}), CapacityFault);
        Engine unbounded(g, cfg(kUnbounded));
        CHECK(unbounded.run_round({local(1, 2), local(1, 2), local(1, 2)}).dropped == 0);
    }

    TEST_CASE("message validation") {
        const auto g = oracle::path(4);
        Engine eng(g, cfg(kUnbounded));
        CHECK_THROWS_AS(eng.run_round({local(1, 3)}), InvalidArgument);
        CHECK_THROWS_AS(eng.run_round({{1, 2, Channel::local, {1, 2, 3, 4}}}), InvalidArgument);
        CHECK_THROWS_AS(eng.run_round({local(0, 2)}), InvalidArgument);
    }

    TEST_CASE("global capacity") {
        const auto g = oracle::path(16);  // gamma = 4
        Engine eng(g, cfg(kUnbounded));
        REQUIRE(eng.gamma() == 4);
        std::vector<Message> m;
        for (NodeId s = 2; s <= 7; ++s) m.push_back(global(s, 1));
        const auto d = eng.run_round(m);
        CHECK(d.global_inbox[1].size() == 4);
        CHECK(d.dropped == 2);
        // the adversary drops the last ones in list order
        CHECK(d.global_inbox[1].back().src == 5);
        Engine strict(g, cfg(kUnbounded, true));
        CHECK_THROWS_AS(strict.run_round(m), CapacityFault);
    }

    TEST_CASE("random global traffic stays within a logarithmic receive bound") {
        const int n = 256;
        const auto g = oracle::path(n);
        HybridConfig c = cfg(kUnbounded);
        c.gamma = 1 << 20;
        Engine eng(g, c);
        const int sigma = static_cast<int>(ceil_log2(n));
        std::int64_t worst = 0;
        for (int round = 0; round < 20; ++round) {
            std::vector<std::int64_t> recv(n + 1, 0);
            for (NodeId v = 1; v <= n; ++v) {
                Rng r = stream(3, Stream::test, v, round);
                for (int i = 0; i < sigma; ++i) ++recv[1 + r.below(n)];
            }
            for (auto x : recv) worst = std::max(worst, x);
        }
        // mean load is sigma; a constant factor of slack covers 20 rounds w.h.p.
        CHECK(worst <= 4 * sigma);
    }

    TEST_CASE("aggregate_min") {
        const auto g = oracle::path(16);
        Engine eng(g, cfg(kUnbounded));
        auto r = eng.aggregate_min({{3, {{4, 5, 7}}}});
        CHECK(r[0].value == 7);
        CHECK(r[0].key == 5);
        r = eng.aggregate_min({{3, {{4, 2, 4}, {5, 9, 4}}}});
        CHECK(r[0].value == 4);
        CHECK(r[0].key == 2);
        r = eng.aggregate_min({{3, {{4, 9, 4}, {5, 2, 4}}}});
        CHECK(r[0].key == 2);

        // charge does not depend on group sizes
        Engine a(g, cfg(kUnbounded)), b(g, cfg(kUnbounded));
        const auto res = a.aggregate_min({{1, {{1, 1, 8}}}, {2, {{2, 1, 5}, {3, 2, 3}}}, {9, {{4, 1, 9}, {5, 2, 2}, {6, 3, 6}}}});
        b.aggregate_min({{1, {{1, 1, 8}}}});
        CHECK(res[0].value == 8);
        CHECK(res[1].value == 3);
        CHECK(res[2].value == 2);
        CHECK(a.ledger().rounds() == b.ledger().rounds());
        CHECK(a.ledger().rounds() == a.aggregation_cost());

        CHECK_THROWS_AS(eng.aggregate_min({{3, {}}, {3, {}}}), ProtocolFault);
        // more concurrent memberships than ceil(log n) + 1
        std::vector<AggGroup> many;
        for (NodeId t = 1; t <= 6; ++t) many.push_back({t, {{16, t, 1}}});
        CHECK_THROWS_AS(eng.aggregate_min(many), ProtocolFault);
    }

    TEST_CASE("convergecast") {
        const auto g = oracle::path(8);
        Engine eng(g, cfg(kUnbounded));
        std::vector<char> f(9, 1);
        CHECK(eng.convergecast_and(f));
        f[5] = 0;
        CHECK_FALSE(eng.convergecast_and(f));
        CHECK(eng.ledger().rounds() == 2 * eng.aggregation_cost());
        const WeightedGraph one(1, 1, {});
        Engine single(one, cfg(kUnbounded));
        CHECK(single.convergecast_and({0, 1}));
        CHECK_FALSE(single.convergecast_and({0, 0}));
    }

    TEST_CASE("global batch packing respects gamma") {
        const auto g = oracle::path(16);
        Engine eng(g, cfg(kUnbounded));
        std::vector<std::pair<NodeId, NodeId>> batch;
        for (int i = 0; i < 10; ++i) batch.push_back({1, 2 + i});
        CHECK(eng.deliver_global_batch(batch) == 3);  // 10 sends, 4 per round
        CHECK(eng.ledger().max_global() <= eng.gamma());
        CHECK(eng.ledger().dropped() == 0);
        CHECK(eng.deliver_global_batch({}) == 0);
    }

    TEST_CASE("random delay schedule") {
        DelayJob one;
        one.steps = {{{1, 2}}, {{2, 3}}};
        const auto p = schedule_with_random_delays({one}, 4, 2, 2, 1);
        CHECK(p.start[0] >= 1);
        CHECK(p.start[0] <= p.window);
        CHECK(p.window == 6);  // ceil(3 * 4 / 2)
        CHECK(p.length <= p.window + 2);

        std::vector<DelayJob> disjoint;
        for (NodeId v = 1; v < 8; ++v) disjoint.push_back({{{{v, v + 1}}}});
        CHECK(schedule_with_random_delays(disjoint, 1, 1, 1, 5).overloaded_slots == 0);

        int good = 0;
        std::vector<DelayJob> crowd(64, DelayJob{{{{1, 2}}}});
        for (std::uint64_t seed = 1; seed <= 100; ++seed)
            good += schedule_with_random_delays(crowd, 64, 1, 8, seed).max_edge_load <= 8;
        CHECK(good >= 95);
    }

    TEST_CASE("ledger folds spans and expands them in the CSV") {
        RoundLedger l;
        l.add({0, 2, 0, 0, "a", 1});
        l.add({0, 0, 0, 1, "b", 3});
        l.add({0, 0, 0, 0, "b", 0});  // empty span ignored
        CHECK(l.rounds() == 4);
        CHECK(l.dropped() == 3);
        CHECK(l.rounds_in("b") == 3);
        CHECK(l.max_local() == 2);
        std::ostringstream out;
        l.write_csv(out);
        int lines = 0;
        for (char ch : out.str()) lines += ch == '\n';
        CHECK(lines == 5);  // header + 4 rounds
    }

    TEST_CASE("rng streams are reproducible and separated") {
        Rng a(1, 2, 3, 4), b(1, 2, 3, 4), c(1, 2, 3, 5);
        const auto x = a.next();
        CHECK(x == b.next());
        CHECK(x != c.next());
        Rng r(9, 0);
        for (int i = 0; i < 1000; ++i) {
            CHECK(r.below(7) < 7);
            const auto v = r.range(-3, 3);
            CHECK((v >= -3 && v <= 3));
        }
    }

    TEST_CASE("config validation") {
        HybridConfig c;
        c.lambda = 0;
        CHECK_THROWS_AS(c.validate(), InvalidArgument);
        c.lambda = kUnbounded;
        c.gamma = 0;
        CHECK(c.gamma_for(1024) == 10);
        CHECK(ceil_log2(1) == 0);
        CHECK(ceil_log2(5) == 3);
    }
}
