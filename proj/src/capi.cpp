#include "hybridnet/hybridnet.h"

#include <fstream>
#include <iostream>
#include <new>
#include <string>

#include "hybridnet/apsp.hpp"
#include "hybridnet/harness.hpp"
#include "hybridnet/spanner.hpp"
#include "hybridnet/sssp_bcc.hpp"
#include "hybridnet/sssp_exact.hpp"

using namespace hybridnet;

struct hn_graph {
    WeightedGraph g;
};
struct hn_config {
    ExperimentConfig c;
};
struct hn_records {
    std::vector<RunRecord> rs;
    std::vector<PassSummary> groups;
};

static_assert(HN_INF_DISTANCE == kInf, "C and C++ infinity must agree");

namespace {

thread_local std::string g_error;
thread_local std::int64_t g_fault_round = -1;

hn_status fail(hn_status s, const std::string& what, std::int64_t round = -1) {
    g_error = what;
    g_fault_round = round;
    return s;
}

template <class F>
hn_status guard(F&& f) {
    try {
        f();
        return HN_OK;
    } catch (const RunFault& e) {
        switch (e.kind) {
            case FaultKind::capacity: return fail(HN_CAPACITY_FAULT, e.what(), e.round);
            case FaultKind::protocol: return fail(HN_PROTOCOL_FAULT, e.what());
            case FaultKind::invalid_argument: return fail(HN_INVALID_ARGUMENT, e.what());
            case FaultKind::other: break;
        }
        return fail(HN_INTERNAL, e.what());
    } catch (const CapacityFault& e) {
        return fail(HN_CAPACITY_FAULT, e.what(), e.round);
    } catch (const ProtocolFault& e) {
        return fail(HN_PROTOCOL_FAULT, e.what());
    } catch (const InvalidArgument& e) {
        return fail(HN_INVALID_ARGUMENT, e.what());
    } catch (const Error& e) {
        return fail(HN_INTERNAL, e.what());
    } catch (const std::bad_alloc&) {
        return fail(HN_INTERNAL, "out of memory");
    } catch (const std::exception& e) {
        return fail(HN_INTERNAL, e.what());
    }
}

#define HN_REQUIRE(cond, msg) \
    if (!(cond)) return fail(HN_INVALID_ARGUMENT, msg)

HybridConfig to_config(const hn_options* o) {
    hn_options d;
    hn_options_default(&d);
    if (!o) o = &d;
    HybridConfig hc;
    hc.lambda = o->lambda == HN_LAMBDA_INF ? kUnbounded : o->lambda;
    hc.gamma = o->gamma;
    hc.seed = o->seed;
    hc.strict = o->strict != 0;
    return hc;
}

void fill(hn_stats* s, const Engine& e) {
    if (!s) return;
    s->rounds = e.ledger().rounds();
    s->dropped = e.ledger().dropped();
    s->max_local_per_edge = e.ledger().max_local();
    s->max_global_per_node = e.ledger().max_global();
}

}  // namespace

extern "C" {

const char* hn_version(void) { return "1.0.0"; }
const char* hn_last_error(void) { return g_error.c_str(); }
int64_t hn_last_fault_round(void) { return g_fault_round; }

const char* hn_status_name(hn_status s) {
    switch (s) {
        case HN_OK: return "ok";
        case HN_INVALID_ARGUMENT: return "invalid argument";
        case HN_CAPACITY_FAULT: return "capacity fault";
        case HN_PROTOCOL_FAULT: return "protocol fault";
        case HN_IO_ERROR: return "i/o error";
        case HN_INTERNAL: return "internal error";
    }
    return "unknown";
}

hn_status hn_graph_generate(const char* family, int n, uint64_t seed, int unit, int64_t max_weight, int handle,
                            hn_graph** out) {
    HN_REQUIRE(family && out, "null argument");
    return guard([&] {
        GenOptions opt;
        opt.unit = unit != 0;
        opt.max_weight = max_weight;
        opt.handle = handle;
        *out = new hn_graph{gen_graph(parse_family(family), n, seed, opt)};
    });
}

hn_status hn_graph_load(const char* path, hn_graph** out) {
    HN_REQUIRE(path && out, "null argument");
    std::ifstream in(path);
    if (!in) return fail(HN_IO_ERROR, std::string("cannot open '") + path + "'");
    return guard([&] { *out = new hn_graph{read_graph(in)}; });
}

hn_status hn_graph_save(const hn_graph* g, const char* path) {
    HN_REQUIRE(g && path, "null argument");
    std::ofstream out(path);
    if (!out) return fail(HN_IO_ERROR, std::string("cannot write '") + path + "'");
    return guard([&] { write_graph(out, g->g); });
}

int hn_graph_n(const hn_graph* g) { return g ? g->g.n() : 0; }
int64_t hn_graph_m(const hn_graph* g) { return g ? static_cast<int64_t>(g->g.m()) : 0; }

int hn_graph_spd(const hn_graph* g) {
    if (!g) return -1;
    int r = -1;
    if (guard([&] { r = shortest_path_diameter(g->g); }) != HN_OK) return -1;
    return r;
}

void hn_graph_free(hn_graph* g) { delete g; }

hn_status hn_config_new(hn_config** out) {
    HN_REQUIRE(out, "null argument");
    return guard([&] { *out = new hn_config{}; });
}

hn_status hn_config_set(hn_config* c, const char* key, const char* value) {
    HN_REQUIRE(c && key && value, "null argument");
    return guard([&] { apply_setting(c->c, key, value); });
}

hn_status hn_config_load(hn_config* c, const char* path) {
    HN_REQUIRE(c && path, "null argument");
    std::ifstream in(path);
    if (!in) return fail(HN_IO_ERROR, std::string("cannot open config '") + path + "'");
    return guard([&] { c->c = read_config(in, c->c); });
}

hn_status hn_config_validate(const hn_config* c) {
    HN_REQUIRE(c, "null argument");
    return guard([&] { c->c.validate(); });
}

double hn_config_min_pass(const hn_config* c) { return c ? c->c.min_pass : 1.0; }
void hn_config_free(hn_config* c) { delete c; }

hn_status hn_run(const hn_config* c, hn_records** out) {
    HN_REQUIRE(c && out, "null argument");
    return guard([&] {
        auto rs = run_experiment(c->c);
        auto groups = summarize(rs);
        *out = new hn_records{std::move(rs), std::move(groups)};
    });
}

hn_status hn_records_write_csv(const hn_records* r, const char* path, int timing) {
    HN_REQUIRE(r && path, "null argument");
    if (std::string(path) == "-") return guard([&] { write_records_csv(std::cout, r->rs, timing != 0); });
    std::ofstream out(path, std::ios::binary);
    if (!out) return fail(HN_IO_ERROR, std::string("cannot write '") + path + "'");
    return guard([&] {
        write_records_csv(out, r->rs, timing != 0);
        out.flush();
        if (!out) throw Error(std::string("write to '") + path + "' failed");
    });
}

hn_status hn_records_read_csv(const char* path, hn_records** out) {
    HN_REQUIRE(path && out, "null argument");
    std::ifstream in(path);
    if (!in) return fail(HN_IO_ERROR, std::string("cannot open '") + path + "'");
    return guard([&] {
        auto rs = read_records_csv(in);
        auto groups = summarize(rs);
        *out = new hn_records{std::move(rs), std::move(groups)};
    });
}

size_t hn_records_count(const hn_records* r) { return r ? r->rs.size() : 0; }
int hn_records_all_pass(const hn_records* r, double min_pass) { return r && all_pass(r->rs, min_pass) ? 1 : 0; }

int64_t hn_records_total_dropped(const hn_records* r) {
    int64_t d = 0;
    if (r)
        for (const auto& x : r->rs) d += x.dropped;
    return d;
}

size_t hn_records_group_count(const hn_records* r) { return r ? r->groups.size() : 0; }

hn_status hn_records_group(const hn_records* r, size_t i, const char** name, int* passes, int* trials) {
    HN_REQUIRE(r, "null argument");
    HN_REQUIRE(i < r->groups.size(), "group index out of range");
    if (name) *name = r->groups[i].group.c_str();
    if (passes) *passes = r->groups[i].passes;
    if (trials) *trials = r->groups[i].trials;
    return HN_OK;
}

void hn_records_free(hn_records* r) { delete r; }

hn_status hn_fit(const hn_records* r, const char* axis, int min_seeds, hn_fit_result* out) {
    HN_REQUIRE(r && axis && out, "null argument");
    return guard([&] {
        const auto f = scaling_fit(r->rs, parse_axis(axis), min_seeds);
        *out = {f.slope, f.intercept, f.ci_low, f.ci_high, static_cast<int>(f.points.size())};
    });
}

void hn_options_default(hn_options* o) {
    if (!o) return;
    *o = {HN_LAMBDA_INF, 0, 1, 0, 0.5, 8.0, 0};
}

hn_status hn_sssp(const hn_graph* g, const char* algo, int source, const hn_options* o, int64_t* dist,
                  hn_stats* stats) {
    HN_REQUIRE(g && algo && dist, "null argument");
    return guard([&] {
        hn_options d;
        hn_options_default(&d);
        const hn_options& op = o ? *o : d;
        Engine eng(g->g, to_config(o));
        const std::string a = algo;
        DistanceMap m;
        if (a == "sssp_exact") {
            m = exact_sssp(eng, source);
        } else if (a == "sssp_bcc") {
            BccParams p;
            p.eps = op.eps;
            p.x = op.x;
            m = approx_sssp_bcc(eng, source, p);
        } else if (a == "sssp_recursive") {
            HierarchyParams p;
            p.alpha = op.alpha;
            m = recursive_sssp(eng, source, p);
        } else {
            throw InvalidArgument("unknown SSSP algorithm '" + a + "'");
        }
        for (std::size_t v = 0; v < m.dist.size(); ++v) dist[v] = m.dist[v];
        fill(stats, eng);
    });
}

hn_status hn_apsp(const hn_graph* g, const char* algo, const hn_options* o, int64_t* dist, hn_stats* stats) {
    HN_REQUIRE(g && algo && dist, "null argument");
    return guard([&] {
        hn_options d;
        hn_options_default(&d);
        const hn_options& op = o ? *o : d;
        Engine eng(g->g, to_config(o));
        ApspParams p;
        p.eps = op.eps;
        p.x = op.x;
        const std::string a = algo;
        ApspResult res;
        if (a == "apsp_exact")
            res = exact_apsp(eng, p);
        else if (a == "apsp_3")
            res = approx_apsp(eng, ApspMode::approx3, p);
        else if (a == "apsp_eps")
            res = approx_apsp(eng, ApspMode::approx_eps, p);
        else
            throw InvalidArgument("unknown APSP algorithm '" + a + "'");
        const int n = g->g.n();
        for (NodeId u = 1; u <= n; ++u)
            for (NodeId v = 1; v <= n; ++v)
                dist[static_cast<std::size_t>(u - 1) * static_cast<std::size_t>(n) + static_cast<std::size_t>(v - 1)] =
                    res.d.at(u, v);
        fill(stats, eng);
    });
}

hn_status hn_spanner_export(const hn_graph* g, const int* marked, size_t count, int h, int k, double eta, uint64_t seed,
                            const char* graph_path, const char* witness_path, size_t* edges) {
    HN_REQUIRE(g && (marked || count == 0) && graph_path && witness_path, "null argument");
    std::ofstream go(graph_path);
    std::ofstream wo(witness_path);
    if (!go || !wo) return fail(HN_IO_ERROR, "cannot write spanner output");
    return guard([&] {
        SpannerParams p;
        p.h = h;
        p.k = k;
        p.eta = eta;
        const std::vector<NodeId> m(marked, marked + count);
        const auto s = build_skeleton_spanner(g->g, m, p, seed);
        write_spanner(go, wo, s);
        if (edges) *edges = s.edges.size();
    });
}

}  // extern "C"
