#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <numeric>
#include <ostream>
#include <sstream>

#include "hybridnet/graph.hpp"
#include "hybridnet/rng.hpp"

namespace hybridnet {

Family parse_family(const std::string& name) {
    if (name == "path") return Family::path;
    if (name == "cycle") return Family::cycle;
    if (name == "random_connected" || name == "random") return Family::random_connected;
    if (name == "grid") return Family::grid;
    if (name == "lb_apsp_gadget") return Family::lb_apsp_gadget;
    if (name == "star") return Family::star;
    if (name == "broom") return Family::broom;
    throw InvalidArgument("unknown graph family '" + name + "'");
}

std::string family_name(Family f) {
    switch (f) {
        case Family::path: return "path";
        case Family::cycle: return "cycle";
        case Family::random_connected: return "random_connected";
        case Family::grid: return "grid";
        case Family::lb_apsp_gadget: return "lb_apsp_gadget";
        case Family::star: return "star";
        case Family::broom: return "broom";
    }
    return "?";
}

namespace {

void require(bool ok, const std::string& what) {
    if (!ok) throw InvalidArgument(what);
}

}  // namespace

GadgetLayout gadget_layout(int n, std::uint64_t seed) {
    GadgetLayout g;
    require(n >= 4, "lb_apsp_gadget needs n >= 4");
    // L = floor(sqrt(n) / (sqrt(c) log n)) with c = 1
    g.L = static_cast<int>(std::floor(std::sqrt(static_cast<double>(n)) / std::log2(static_cast<double>(n))));
    g.x = n / 2 + g.L;
    g.y = (n - g.x) / 2;
    require(g.L >= 1 && g.y >= 1, "lb_apsp_gadget: n=" + std::to_string(n) + " too small (needs L >= 1 and y >= 1)");
    g.b = 1;
    g.v1 = 1 + g.L;
    g.v2 = g.x;  // far end of the path
    Rng rng = stream(seed, Stream::generator, 0, 1);
    const NodeId first = g.x + 1;
    for (int i = 0; i < g.y; ++i) {
        const NodeId u = first + i;
        (rng.below(2) == 0 ? g.s1 : g.s2).push_back(u);
    }
    NodeId filler = first + g.y;
    while (static_cast<int>(g.s1.size()) < g.y) g.s1.push_back(filler++);
    while (static_cast<int>(g.s2.size()) < g.y) g.s2.push_back(filler++);
    return g;
}

WeightedGraph gen_graph(Family family, int n, std::uint64_t seed, const GenOptions& opt) {
    const Weight W = opt.unit ? 1 : (opt.max_weight > 0 ? opt.max_weight : std::max<Weight>(n, 1));
    Rng wrng = stream(seed, Stream::generator, 0, 2);
    auto weight = [&]() -> Weight { return W == 1 ? 1 : wrng.range(1, W); };
    std::vector<Edge> edges;
    auto add = [&](NodeId u, NodeId v) { edges.push_back({u, v, 0}); };

    switch (family) {
        case Family::path:
            require(n >= 1, "path needs n >= 1");
            for (NodeId v = 1; v < n; ++v) add(v, v + 1);
            break;
        case Family::cycle:
            require(n >= 3, "cycle needs n >= 3");
            for (NodeId v = 1; v < n; ++v) add(v, v + 1);
            add(n, 1);
            break;
        case Family::star:
            require(n >= 2, "star needs n >= 2");
            for (NodeId v = 2; v <= n; ++v) add(1, v);
            break;
        case Family::broom: {
            const int handle = opt.handle > 0 ? opt.handle : std::max(1, n / 2);
            require(n >= 2 && handle <= n, "broom needs 1 <= handle <= n");
            for (NodeId v = 1; v < handle; ++v) add(v, v + 1);
            for (NodeId v = handle + 1; v <= n; ++v) add(handle, v);
            break;
        }
        case Family::grid: {
            require(n >= 4, "grid needs n >= 4");
            const int rows = static_cast<int>(std::floor(std::sqrt(static_cast<double>(n))));
            const int cols = (n + rows - 1) / rows;
            auto id = [&](int r, int c) { return r * cols + c + 1; };
            for (int r = 0; r < rows; ++r)
                for (int c = 0; c < cols; ++c) {
                    const int v = id(r, c);
                    if (v > n) continue;
                    if (c + 1 < cols && id(r, c + 1) <= n) add(v, id(r, c + 1));
                    if (id(r + 1, c) <= n) add(v, id(r + 1, c));
                }
            break;
        }
        case Family::random_connected: {
            require(n >= 2, "random_connected needs n >= 2");
            // G(n,p) at twice the connectivity threshold, then a patch that
            // links components in ID order so the result is always connected
            const double p = std::min(1.0, 2.0 * std::log(static_cast<double>(n)) / n);
            Rng rng = stream(seed, Stream::generator, 0, 3);
            std::vector<int> comp(static_cast<std::size_t>(n) + 1);
            std::iota(comp.begin(), comp.end(), 0);
            auto find = [&](int v) {
                while (comp[static_cast<std::size_t>(v)] != v) {
                    comp[static_cast<std::size_t>(v)] = comp[static_cast<std::size_t>(comp[static_cast<std::size_t>(v)])];
                    v = comp[static_cast<std::size_t>(v)];
                }
                return v;
            };
            for (NodeId u = 1; u <= n; ++u)
                for (NodeId v = u + 1; v <= n; ++v)
                    if (rng.bernoulli(p)) {
                        add(u, v);
                        comp[static_cast<std::size_t>(find(u))] = find(v);
                    }
            std::vector<std::vector<NodeId>> members(static_cast<std::size_t>(n) + 1);
            for (NodeId v = 1; v <= n; ++v) members[static_cast<std::size_t>(find(v))].push_back(v);
            NodeId prev_root = 0;
            for (NodeId r = 1; r <= n; ++r) {
                const auto& mem = members[static_cast<std::size_t>(r)];
                if (mem.empty()) continue;
                if (prev_root != 0) {
                    const auto& pm = members[static_cast<std::size_t>(prev_root)];
                    const NodeId a = pm[rng.below(pm.size())];
                    const NodeId b = mem[rng.below(mem.size())];
                    add(a, b);
                }
                prev_root = r;
            }
            break;
        }
        case Family::lb_apsp_gadget: {
            const auto lay = gadget_layout(n, seed);
            for (NodeId v = 1; v < lay.x; ++v) add(v, v + 1);
            for (NodeId u : lay.s1) add(lay.v1, u);
            for (NodeId u : lay.s2) add(lay.v2, u);
            for (NodeId u = lay.x + 2 * lay.y + 1; u <= n; ++u) add(lay.b, u);
            break;
        }
    }
    for (auto& e : edges) e.w = weight();
    WeightedGraph g(n, W, std::move(edges));
    if (!g.is_connected()) throw Error("generator produced a disconnected graph");
    return g;
}

WeightedGraph read_graph(std::istream& in) {
    auto fail = [](const std::string& why) { throw InvalidArgument("graph file: " + why); };
    std::string line;
    auto next_line = [&](std::string& out) {
        while (std::getline(in, out)) {
            const auto pos = out.find_first_not_of(" \t\r");
            if (pos == std::string::npos) continue;
            return true;
        }
        return false;
    };
    if (!next_line(line)) fail("missing header");
    long long n = 0, m = 0, W = 0;
    {
        std::istringstream hs(line);
        if (!(hs >> n >> m >> W)) fail("header must be 'n m W'");
        std::string extra;
        if (hs >> extra) fail("trailing data in header");
    }
    if (n < 1) fail("n must be positive");
    if (m < 0) fail("m must be non-negative");
    if (W < 1) fail("W must be positive");
    std::vector<Edge> edges;
    edges.reserve(static_cast<std::size_t>(m));
    for (long long i = 0; i < m; ++i) {
        if (!next_line(line)) fail("expected " + std::to_string(m) + " edges, got " + std::to_string(i));
        std::istringstream ls(line);
        long long u = 0, v = 0, w = 0;
        if (!(ls >> u >> v >> w)) fail("bad edge line " + std::to_string(i + 2));
        std::string extra;
        if (ls >> extra) fail("trailing data on edge line " + std::to_string(i + 2));
        edges.push_back({static_cast<NodeId>(u), static_cast<NodeId>(v), w});
    }
    if (next_line(line)) fail("more than m edge lines");
    WeightedGraph g(static_cast<int>(n), W, std::move(edges));
    if (!g.is_connected()) fail("graph is not connected");
    return g;
}

void write_graph(std::ostream& out, const WeightedGraph& g) {
    out << g.n() << ' ' << g.m() << ' ' << g.max_weight() << '\n';
    for (const auto& e : g.edges()) out << e.u << ' ' << e.v << ' ' << e.w << '\n';
}

WeightedGraph load_graph(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open " + path);
    return read_graph(in);
}

void save_graph(const std::string& path, const WeightedGraph& g) {
    std::ofstream out(path);
    if (!out) throw Error("cannot write " + path);
    write_graph(out, g);
}

std::string format_weight(Weight w) { return is_inf(w) ? "INF" : std::to_string(w); }

void write_matrix_csv(std::ostream& out, const DistanceMatrix& d) {
    for (NodeId u = 1; u <= d.n(); ++u) {
        for (NodeId v = 1; v <= d.n(); ++v) {
            if (v > 1) out << ',';
            out << format_weight(d.at(u, v));
        }
        out << '\n';
    }
}

}  // namespace hybridnet
