#include <doctest.h>

#include <cmath>

#include "hybridnet/rng.hpp"
#include "hybridnet/sssp_bcc.hpp"
#include "oracles.hpp"

using namespace hybridnet;

namespace {
HybridConfig cfg(std::uint64_t seed = 1) {
    HybridConfig c;
    c.seed = seed;
    return c;
}

Skeleton skeleton_of(const WeightedGraph& g, std::vector<NodeId> marked, int h) {
    Skeleton s;
    s.marked = std::move(marked);
    s.is_marked.assign(g.n() + 1, 0);
    for (NodeId v : s.marked) s.is_marked[v] = 1;
    s.h = h;
    s.explored = h;
    for (std::size_t i = 0; i < s.marked.size(); ++i) {
        const auto d = oracle::hop_dp(g, s.marked[i], h);
        for (std::size_t j = i + 1; j < s.marked.size(); ++j)
            if (d[s.marked[j]] < kInf) s.edges.push_back({s.marked[i], s.marked[j], d[s.marked[j]]});
    }
    return s;
}
}  // namespace

TEST_SUITE("bcc") {
    TEST_CASE("default x") {
        CHECK(default_bcc_x(512, 0.5) == 512);  // n^(1/3) * 64 exceeds n
        CHECK(default_bcc_x(1000000, 1.0) == 100);
        CHECK_THROWS_AS(default_bcc_x(100, 0), InvalidArgument);
    }

    TEST_CASE("tiny BCC rounds") {
        const WeightedGraph one(1, 1, {});
        Engine e1(one, cfg());
        BccSession s1;
        s1.participants = {1};
        const auto seen1 = simulate_bcc_round(e1, s1, {{1, 42}});
        REQUIRE(seen1.size() == 1);
        CHECK(seen1[0].size() == 1);
        CHECK(seen1[0][0].value == 42);

        const WeightedGraph two(2, 1, {{1, 2, 1}});
        Engine e2(two, cfg());
        BccSession s2;
        s2.participants = {1, 2};
        const auto seen2 = simulate_bcc_round(e2, s2, {{1, 10}, {2, 20}});
        CHECK(seen2[0].size() == 2);
        CHECK(seen2[1].size() == 2);
        CHECK(s2.transcripts_agree);
        CHECK_THROWS_AS(simulate_bcc_round(e2, s2, {{2, 1}, {1, 2}}), InvalidArgument);
    }

    TEST_CASE("32 participants on 256 nodes get the full transcript") {
        const auto g = gen_graph(Family::random_connected, 256, 1);
        int good = 0;
        for (std::uint64_t seed = 1; seed <= 20; ++seed) {
            Engine eng(g, cfg(seed));
            BccSession s;
            for (NodeId v = 4; v <= 256; v += 8) s.participants.push_back(v);
            std::vector<Broadcast> b;
            for (NodeId v : s.participants) b.push_back({v, static_cast<Weight>(stream(seed, Stream::test, v).below(1000))});
            const auto seen = simulate_bcc_round(eng, s, b);
            bool all = true;
            for (const auto& row : seen) {
                all = all && row.size() == b.size();
                for (std::size_t i = 0; i < row.size() && all; ++i) all = row[i].from == b[i].from && row[i].value == b[i].value;
            }
            good += all && s.transcripts_agree;
        }
        CHECK(good >= 19);
    }

    TEST_CASE("skeleton Bellman-Ford") {
        const WeightedGraph two(2, 9, {{1, 2, 9}});
        Engine eng(two, cfg());
        const auto sk = skeleton_of(two, {1, 2}, 1);
        BccSession s;
        s.participants = sk.marked;
        const auto lab = skeleton_sssp_bcc(eng, s, sk, 1);
        CHECK(lab[0] == 0);
        CHECK(lab[1] == 9);

        // with the skeleton covering every shortest path, labels are exact
        for (std::uint32_t seed = 1; seed <= 5; ++seed) {
            const auto g = oracle::random_graph(60, 0.06, 9, seed);
            std::vector<NodeId> m = {1};
            for (NodeId v = 5; v <= 60; v += 5) m.push_back(v);
            const auto s2 = skeleton_of(g, m, 59);
            Engine e(g, cfg(seed));
            BccSession sess;
            sess.participants = s2.marked;
            const auto l = skeleton_sssp_bcc(e, sess, s2, 1);
            const auto truth = dijkstra(g, 1);
            for (std::size_t i = 0; i < m.size(); ++i) CHECK(l[i] == truth[m[i]]);
            CHECK(sess.transcripts_agree);
        }
    }

    TEST_CASE("approximate SSSP") {
        const WeightedGraph two(2, 4, {{1, 2, 4}});
        Engine e2(two, cfg());
        CHECK(approx_sssp_bcc(e2, 1)[2] == 4);
        CHECK_THROWS_AS(approx_sssp_bcc(e2, 1, BccParams{0.0}), InvalidArgument);

        GenOptions unit;
        unit.unit = true;
        const auto g = gen_graph(Family::grid, 256, 1, unit);
        for (std::uint64_t seed = 1; seed <= 5; ++seed) {
            Engine eng(g, cfg(seed));
            BccParams p;
            p.xi = 0.25;
            p.x = 16;
            BccMetrics m;
            const auto d = approx_sssp_bcc(eng, 1, p, &m);
            const auto truth = dijkstra(g, 1);
            const auto near = oracle::hop_dp(g, 1, m.h);
            CHECK(m.bcc_rounds >= 1);
            CHECK(m.transcripts_agree);
            CHECK(d[1] == 0);
            for (NodeId v = 1; v <= 256; ++v) {
                REQUIRE(d[v] >= truth[v]);
                CHECK(static_cast<double>(d[v]) <= 1.5 * static_cast<double>(truth[v]));
                if (near[v] == truth[v]) CHECK(d[v] == truth[v]);
            }
        }
    }
}
