// Command-line front end; talks to the library only through the C API.
#include <cstdio>
#include <map>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "hybridnet/hybridnet.h"

namespace {

int report(hn_status s) {
    std::fprintf(stderr, "error (%s): %s\n", hn_status_name(s), hn_last_error());
    return 2;
}

int cmd_run(const std::string& config, const std::map<std::string, std::string>& flags, bool strict, bool unit,
            bool timing) {
    hn_config* c = nullptr;
    hn_status s = hn_config_new(&c);
    if (s != HN_OK) return report(s);
    auto bail = [&](hn_status st) {
        hn_config_free(c);
        return report(st);
    };
    if (!config.empty() && (s = hn_config_load(c, config.c_str())) != HN_OK) return bail(s);
    for (const auto& [k, v] : flags)
        if (!v.empty() && (s = hn_config_set(c, k.c_str(), v.c_str())) != HN_OK) return bail(s);
    if (strict && (s = hn_config_set(c, "strict", "true")) != HN_OK) return bail(s);
    if (unit && (s = hn_config_set(c, "unit", "true")) != HN_OK) return bail(s);
    if (timing && (s = hn_config_set(c, "timing", "true")) != HN_OK) return bail(s);
    if ((s = hn_config_validate(c)) != HN_OK) return bail(s);

    std::string out = "-";
    if (auto it = flags.find("out"); it != flags.end() && !it->second.empty()) out = it->second;

    hn_records* r = nullptr;
    if ((s = hn_run(c, &r)) != HN_OK) return bail(s);
    const double min_pass = hn_config_min_pass(c);
    hn_config_free(c);
    if ((s = hn_records_write_csv(r, out.c_str(), timing ? 1 : 0)) != HN_OK) {
        hn_records_free(r);
        return report(s);
    }
    for (std::size_t i = 0; i < hn_records_group_count(r); ++i) {
        const char* name = nullptr;
        int passes = 0, trials = 0;
        hn_records_group(r, i, &name, &passes, &trials);
        std::fprintf(stderr, "%s: %d/%d valid\n", name, passes, trials);
    }
    std::fprintf(stderr, "dropped messages: %lld\n", static_cast<long long>(hn_records_total_dropped(r)));
    const bool ok = hn_records_all_pass(r, min_pass) != 0;
    hn_records_free(r);
    return ok ? 0 : 1;
}

int cmd_fit(const std::string& in, const std::string& axis, int min_seeds, double lo, double hi) {
    hn_records* r = nullptr;
    hn_status s = hn_records_read_csv(in.c_str(), &r);
    if (s != HN_OK) return report(s);
    hn_fit_result f{};
    s = hn_fit(r, axis.c_str(), min_seeds, &f);
    hn_records_free(r);
    if (s != HN_OK) return report(s);
    std::printf("slope=%.4f intercept=%.4f ci95=[%.4f, %.4f] points=%d\n", f.slope, f.intercept, f.ci_low, f.ci_high,
                f.points);
    return f.slope >= lo && f.slope <= hi ? 0 : 1;
}

int cmd_gen(const std::string& family, int n, unsigned long long seed, bool unit, long long max_weight, int handle,
            const std::string& out) {
    hn_graph* g = nullptr;
    hn_status s = hn_graph_generate(family.c_str(), n, seed, unit, max_weight, handle, &g);
    if (s != HN_OK) return report(s);
    s = hn_graph_save(g, out.c_str());
    hn_graph_free(g);
    return s == HN_OK ? 0 : report(s);
}

int cmd_solve(const std::string& graph, const std::string& algo, int source, const hn_options& o) {
    hn_graph* g = nullptr;
    hn_status s = hn_graph_load(graph.c_str(), &g);
    if (s != HN_OK) return report(s);
    const int n = hn_graph_n(g);
    hn_stats st{};
    auto cell = [](long long d) { return d >= HN_INF_DISTANCE ? std::string("INF") : std::to_string(d); };
    if (algo.rfind("apsp", 0) == 0) {
        std::vector<std::int64_t> d(static_cast<std::size_t>(n) * static_cast<std::size_t>(n));
        s = hn_apsp(g, algo.c_str(), &o, d.data(), &st);
        if (s == HN_OK)
            for (int u = 0; u < n; ++u) {
                for (int v = 0; v < n; ++v)
                    std::printf("%s%s", v ? "," : "", cell(d[static_cast<std::size_t>(u) * n + v]).c_str());
                std::printf("\n");
            }
    } else {
        std::vector<std::int64_t> d(static_cast<std::size_t>(n) + 1);
        s = hn_sssp(g, algo.c_str(), source, &o, d.data(), &st);
        if (s == HN_OK) {
            std::printf("node,distance\n");
            for (int v = 1; v <= n; ++v) std::printf("%d,%s\n", v, cell(d[static_cast<std::size_t>(v)]).c_str());
        }
    }
    hn_graph_free(g);
    if (s != HN_OK) return report(s);
    std::fprintf(stderr, "rounds=%lld dropped=%lld max_local=%lld max_global=%lld\n", static_cast<long long>(st.rounds),
                 static_cast<long long>(st.dropped), static_cast<long long>(st.max_local_per_edge),
                 static_cast<long long>(st.max_global_per_node));
    return 0;
}

int cmd_spanner(const std::string& graph, const std::vector<int>& marked, int h, int k, double eta,
                unsigned long long seed, const std::string& out, const std::string& witness) {
    hn_graph* g = nullptr;
    hn_status s = hn_graph_load(graph.c_str(), &g);
    if (s != HN_OK) return report(s);
    std::size_t edges = 0;
    s = hn_spanner_export(g, marked.data(), marked.size(), h, k, eta, seed, out.c_str(), witness.c_str(), &edges);
    hn_graph_free(g);
    if (s != HN_OK) return report(s);
    std::fprintf(stderr, "spanner edges: %zu\n", edges);
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"hybrid network shortest-path simulator"};
    app.require_subcommand(1);
    app.set_version_flag("--version", hn_version());

    // run
    auto* run = app.add_subcommand("run", "run an experiment sweep and write its CSV");
    std::string config;
    std::map<std::string, std::string> flags;
    bool strict = false, unit = false, timing = false;
    run->add_option("--config", config, "key=value file; flags override it");
    for (const char* name : {"algo", "family", "n", "seeds", "lambda", "gamma", "eps", "alpha", "x", "k", "handles", "hops",
                             "spanner-k", "eta", "xi", "max-weight", "min-pass", "jobs", "out"})
        run->add_option(std::string("--") + name, flags[name]);
    run->add_flag("--strict", strict, "capacity overruns abort the run");
    run->add_flag("--unit", unit, "unit edge weights");
    run->add_flag("--timing", timing, "append wall-clock column (not byte-stable)");

    // fit
    auto* fit = app.add_subcommand("fit", "log-log slope of rounds over a run CSV");
    std::string fit_in, axis = "n";
    int min_seeds = 5;
    double lo = -1e9, hi = 1e9;
    fit->add_option("--in", fit_in)->required();
    fit->add_option("--x-axis", axis)->check(CLI::IsMember({"n", "k", "spd"}));
    fit->add_option("--min-seeds", min_seeds);
    fit->add_option("--min-slope", lo, "exit 1 when the slope is below");
    fit->add_option("--max-slope", hi, "exit 1 when the slope is above");

    // gen
    auto* gen = app.add_subcommand("gen", "write a generated graph");
    std::string family = "random_connected", gen_out;
    int gen_n = 64, handle = 0;
    unsigned long long gen_seed = 1;
    long long max_weight = 0;
    bool gen_unit = false;
    gen->add_option("--family", family);
    gen->add_option("--n", gen_n);
    gen->add_option("--seed", gen_seed);
    gen->add_option("--max-weight", max_weight);
    gen->add_option("--handle", handle);
    gen->add_flag("--unit", gen_unit);
    gen->add_option("--out", gen_out)->required();

    // solve
    auto* solve = app.add_subcommand("solve", "run one algorithm on a graph file and print distances");
    std::string graph, algo = "sssp_exact", lambda = "inf";
    int source = 1;
    hn_options opts;
    hn_options_default(&opts);
    solve->add_option("--graph", graph)->required();
    solve->add_option("--algo", algo);
    solve->add_option("--source", source);
    solve->add_option("--lambda", lambda);
    solve->add_option("--gamma", opts.gamma);
    solve->add_option("--seed", opts.seed);
    solve->add_option("--eps", opts.eps);
    solve->add_option("--alpha", opts.alpha);
    solve->add_option("--x", opts.x);
    bool solve_strict = false;
    solve->add_flag("--strict", solve_strict);

    // spanner
    auto* span = app.add_subcommand("spanner", "export a skeleton spanner and its witness paths");
    std::string span_graph, span_out, span_witness;
    std::vector<int> marked;
    int sh = 8, sk = 3;
    double eta = 2.0;
    unsigned long long span_seed = 1;
    span->add_option("--graph", span_graph)->required();
    span->add_option("--marked", marked, "ascending node IDs")->delimiter(',')->required();
    span->add_option("--hops", sh);
    span->add_option("--k", sk);
    span->add_option("--eta", eta);
    span->add_option("--seed", span_seed);
    span->add_option("--out", span_out)->required();
    span->add_option("--witness", span_witness)->required();

    CLI11_PARSE(app, argc, argv);

    if (*run) return cmd_run(config, flags, strict, unit, timing);
    if (*fit) return cmd_fit(fit_in, axis, min_seeds, lo, hi);
    if (*gen) return cmd_gen(family, gen_n, gen_seed, gen_unit, max_weight, handle, gen_out);
    if (*solve) {
        if (lambda == "inf") {
            opts.lambda = HN_LAMBDA_INF;
        } else {
            try {
                opts.lambda = std::stoll(lambda);
            } catch (const std::exception&) {
                std::fprintf(stderr, "error: --lambda must be a positive integer or inf\n");
                return 2;
            }
        }
        opts.strict = solve_strict;
        return cmd_solve(graph, algo, source, opts);
    }
    if (*span) return cmd_spanner(span_graph, marked, sh, sk, eta, span_seed, span_out, span_witness);
    return 2;
}
