#include <doctest.h>

#include <sstream>

#include "hybridnet/graph.hpp"
#include "oracles.hpp"

using namespace hybridnet;

namespace {
WeightedGraph triangle() { return WeightedGraph(3, 3, {{1, 2, 1}, {2, 3, 1}, {1, 3, 3}}); }
}  // namespace

TEST_SUITE("graph") {
    TEST_CASE("dijkstra on small fixed graphs") {
        auto d = dijkstra(oracle::path(3), 1);
        CHECK(d[1] == 0);
        CHECK(d[2] == 1);
        CHECK(d[3] == 2);
        d = dijkstra(triangle(), 1);
        CHECK(d[3] == 2);
        const WeightedGraph one(1, 1, {});
        CHECK(dijkstra(one, 1)[1] == 0);
    }

    TEST_CASE("h-limited distances") {
        auto d = h_limited_distances(oracle::path(3), 1, 1);
        CHECK(d[2] == 1);
        CHECK(is_inf(d[3]));
        CHECK(h_limited_distances(oracle::path(3), 1, 2)[3] == 2);
        CHECK(h_limited_distances(triangle(), 1, 1)[3] == 3);
        CHECK(h_limited_distances(triangle(), 1, 2)[3] == 2);
        CHECK(h_limited_distances(triangle(), 1, 0)[1] == 0);
        CHECK(is_inf(h_limited_distances(triangle(), 1, 0)[2]));
    }

    TEST_CASE("h-limited distances match the hop DP and are monotone in h") {
        for (std::uint32_t seed = 1; seed <= 6; ++seed) {
            const auto g = oracle::random_graph(30, 0.08, 9, seed);
            const int spd = shortest_path_diameter(g);
            for (NodeId s : {1, 7, 30}) {
                const auto full = dijkstra(g, s);
                std::vector<Weight> prev(31, kInf);
                for (int h = 0; h <= spd + 1; ++h) {
                    const auto d = h_limited_distances(g, s, h);
                    const auto ref = oracle::hop_dp(g, s, h);
                    for (NodeId v = 1; v <= 30; ++v) {
                        REQUIRE(d[v] == ref[v]);
                        CHECK(d[v] <= prev[v]);
                        if (h >= spd) CHECK(d[v] == full[v]);
                    }
                    prev = d.dist;
                }
                CHECK(h_limited_distances(g, s, 29).dist == full.dist);
            }
        }
    }

    TEST_CASE("k-source Bellman-Ford") {
        const auto p = oracle::path(4);
        const auto r = bellman_ford_k_sources(p, {1, 4}, 1);
        CHECK(r.get(0, 2) == 1);
        CHECK(is_inf(r.get(1, 2)));
        for (std::uint32_t seed = 1; seed <= 4; ++seed) {
            const auto g = oracle::random_graph(40, 0.06, 7, seed);
            const std::vector<NodeId> S = {3, 11, 25, 40};
            for (int h : {1, 3, 6}) {
                const auto k = bellman_ford_k_sources(g, S, h);
                for (std::size_t i = 0; i < S.size(); ++i) {
                    const auto ref = oracle::hop_dp(g, S[i], h);
                    for (NodeId v = 1; v <= 40; ++v) REQUIRE(k.get(i, v) == ref[v]);
                }
                // one label per source per direction per edge in a round
                CHECK(k.max_labels_per_edge <= static_cast<std::int64_t>(S.size()));
            }
        }
    }

    TEST_CASE("shortest path diameter") {
        CHECK(shortest_path_diameter(oracle::path(7)) == 6);
        std::vector<Edge> e;
        for (int u = 1; u <= 6; ++u)
            for (int v = u + 1; v <= 6; ++v) e.push_back({u, v, 1});
        CHECK(shortest_path_diameter(WeightedGraph(6, 1, e)) == 1);
        // heavy direct edge forces the two-hop route
        CHECK(shortest_path_diameter(triangle()) == 2);
    }

    TEST_CASE("all pairs against Floyd-Warshall") {
        for (std::uint32_t seed = 1; seed <= 5; ++seed) {
            const auto g = oracle::random_graph(35, 0.1, 12, seed);
            const auto d = all_pairs_dijkstra(g);
            const auto fw = oracle::floyd_warshall(g);
            for (NodeId u = 1; u <= 35; ++u)
                for (NodeId v = 1; v <= 35; ++v) REQUIRE(d.at(u, v) == fw[u][v]);
        }
    }

    TEST_CASE("shortest path parents prefer the smallest predecessor") {
        // 1-2-4 and 1-3-4 tie at weight 2
        const WeightedGraph g(4, 1, {{1, 2, 1}, {1, 3, 1}, {2, 4, 1}, {3, 4, 1}});
        const auto par = shortest_path_parents(g, dijkstra(g, 1));
        CHECK(par[1] == 0);
        CHECK(par[4] == 2);
    }

    TEST_CASE("graph validation") {
        CHECK_THROWS_AS(WeightedGraph(3, 5, {{1, 1, 1}}), InvalidArgument);
        CHECK_THROWS_AS(WeightedGraph(3, 5, {{1, 2, 1}, {2, 1, 2}}), InvalidArgument);
        CHECK_THROWS_AS(WeightedGraph(3, 5, {{1, 4, 1}}), InvalidArgument);
        CHECK_THROWS_AS(WeightedGraph(3, 5, {{1, 2, 6}}), InvalidArgument);
        CHECK_THROWS_AS(WeightedGraph(3, 5, {{1, 2, 0}}), InvalidArgument);
        CHECK_FALSE(WeightedGraph(3, 5, {{1, 2, 1}}).is_connected());
        CHECK(sat_add(kInf, 1) == kInf);
        CHECK(sat_add(kInf - 1, 5) == kInf);
    }

    TEST_CASE("generators") {
        GenOptions unit;
        unit.unit = true;
        const auto p = gen_graph(Family::path, 4, 99, unit);
        REQUIRE(p.m() == 3);
        for (NodeId v = 1; v < 4; ++v) CHECK(p.weight(v, v + 1) == 1);

        GenOptions w8;
        w8.max_weight = 8;
        const auto r = gen_graph(Family::random_connected, 32, 1, w8);
        CHECK(r.n() == 32);
        CHECK(r.is_connected());
        CHECK(r.heaviest_edge() <= 8);

        // default weights are 1..n
        CHECK(gen_graph(Family::random_connected, 40, 3).max_weight() == 40);

        for (auto f : {Family::path, Family::cycle, Family::random_connected, Family::grid, Family::star,
                       Family::broom, Family::lb_apsp_gadget}) {
            const auto a = gen_graph(f, 64, 5);
            const auto b = gen_graph(f, 64, 5);
            std::ostringstream sa, sb;
            write_graph(sa, a);
            write_graph(sb, b);
            CHECK(sa.str() == sb.str());
            CHECK(family_name(parse_family(family_name(f))) == family_name(f));
        }
        CHECK_THROWS_AS(parse_family("hypercube"), InvalidArgument);
        CHECK_THROWS(gen_graph(Family::cycle, 2, 1));
    }

    TEST_CASE("broom shape") {
        GenOptions o;
        o.unit = true;
        o.handle = 5;
        const auto g = gen_graph(Family::broom, 12, 1, o);
        CHECK(g.m() == 11);
        CHECK(g.neighbors(5).size() == 1 + 7);
        CHECK(shortest_path_diameter(g) == 5);
    }

    TEST_CASE("lower-bound gadget layout") {
        const auto lay = gadget_layout(64, 7);
        CHECK(lay.x == 32 + lay.L);
        CHECK(lay.y == (64 - lay.x) / 2);
        CHECK(static_cast<int>(lay.s1.size()) == lay.y);
        CHECK(static_cast<int>(lay.s2.size()) == lay.y);
        GenOptions o;
        o.unit = true;
        const auto g = gen_graph(Family::lb_apsp_gadget, 64, 7, o);
        CHECK(g.is_connected());
        for (NodeId u : lay.s1) CHECK(g.has_edge(lay.v1, u));
        for (NodeId u : lay.s2) CHECK(g.has_edge(lay.v2, u));
    }

    TEST_CASE("graph file round trip") {
        const auto g = gen_graph(Family::random_connected, 20, 4);
        std::stringstream ss;
        write_graph(ss, g);
        const auto h = read_graph(ss);
        CHECK(h.n() == g.n());
        REQUIRE(h.m() == g.m());
        for (const auto& e : g.edges()) CHECK(h.weight(e.u, e.v) == e.w);
        std::istringstream bad("3 1 5\n1 2 9\n");
        CHECK_THROWS_AS(read_graph(bad), InvalidArgument);
    }
}
