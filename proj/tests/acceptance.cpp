// End-to-end acceptance runs. One PASS/FAIL line per criterion, exit 1 if any fails.
#include <chrono>
#include <cstdio>
#include <functional>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "hybridnet/harness.hpp"
#include "hybridnet/sssp_exact.hpp"

using namespace hybridnet;

namespace {

struct Batch {
    std::string name;
    ExperimentConfig cfg;
    std::vector<RunRecord> recs;
    bool reference_lambda = true;
    std::vector<std::uint64_t> rerun_seeds;  // empty: rerun everything
};

std::vector<Batch> batches;
int failures = 0;

ExperimentConfig make(std::initializer_list<std::pair<const char*, const char*>> kv) {
    ExperimentConfig c;
    for (const auto& [k, v] : kv) apply_setting(c, k, v);
    c.validate();
    return c;
}

const std::vector<RunRecord>& run(const std::string& name, const ExperimentConfig& c,
                                  std::vector<std::uint64_t> rerun_seeds = {}) {
    const auto t0 = std::chrono::steady_clock::now();
    Batch b{name, c, run_experiment(c), c.lambda == kLambdaReference, std::move(rerun_seeds)};
    const double s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::printf("  ran %-28s %4zu runs  %6.1fs\n", name.c_str(), b.recs.size(), s);
    std::fflush(stdout);
    batches.push_back(std::move(b));
    return batches.back().recs;
}

std::string note_value(const RunRecord& r, const std::string& key) {
    std::istringstream in(r.note);
    std::string kv;
    while (std::getline(in, kv, ';')) {
        const auto eq = kv.find('=');
        if (eq != std::string::npos && kv.substr(0, eq) == key) return kv.substr(eq + 1);
    }
    return {};
}

// passes per (n, k, handle) group
std::map<std::string, std::pair<int, int>> tally(const std::vector<RunRecord>& rs,
                                                 const std::function<bool(const RunRecord&)>& ok) {
    std::map<std::string, std::pair<int, int>> out;
    for (const auto& r : rs) {
        auto& [p, t] = out["n=" + std::to_string(r.n) + (r.k ? ",k=" + std::to_string(r.k) : "") +
                           (r.handle ? ",handle=" + std::to_string(r.handle) : "")];
        p += ok(r);
        ++t;
    }
    return out;
}

bool at_least(const std::map<std::string, std::pair<int, int>>& t, double frac, std::string& detail) {
    bool ok = true;
    for (const auto& [g, pt] : t) {
        detail += " [" + g + " " + std::to_string(pt.first) + "/" + std::to_string(pt.second) + "]";
        ok = ok && pt.first >= frac * pt.second - 1e-9;
    }
    return ok;
}

void report(int id, const std::string& what, bool ok, const std::string& detail) {
    std::printf("criterion %d: %s  %s:%s\n", id, ok ? "PASS" : "FAIL", what.c_str(), detail.c_str());
    std::fflush(stdout);
    failures += !ok;
}

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3f", v);
    return buf;
}

std::string fit_text(const FitResult& f) {
    return "slope " + fmt(f.slope) + " CI [" + fmt(f.ci_low) + ", " + fmt(f.ci_high) + "]";
}

std::string csv(const std::vector<RunRecord>& rs) {
    std::ostringstream out;
    write_records_csv(out, rs);
    return out.str();
}

// criterion 3 helpers
void for_each_tree(int n, const std::function<void(const std::vector<NodeId>&)>& f) {
    std::vector<NodeId> parent(n + 1, 0);
    std::function<void(int)> rec = [&](int v) {
        if (v > n) return f(parent);
        for (int p = 1; p < v; ++p) {
            parent[v] = p;
            rec(v + 1);
        }
    };
    rec(2);
}

int largest_piece(const std::vector<NodeId>& parent, NodeId x) {
    const int n = static_cast<int>(parent.size()) - 1;
    std::vector<int> comp(n + 1);
    for (int v = 1; v <= n; ++v) comp[v] = v;
    std::function<int(int)> find = [&](int v) { return comp[v] == v ? v : comp[v] = find(comp[v]); };
    for (int v = 2; v <= n; ++v)
        if (v != x && parent[v] != x) comp[find(v)] = find(parent[v]);
    std::vector<int> size(n + 1, 0);
    int best = 0;
    for (int v = 1; v <= n; ++v)
        if (v != x) best = std::max(best, ++size[find(v)]);
    return best;
}

}  // namespace

int main() {
    // 1: exact APSP
    {
        bool ok = true;
        std::string d;
        for (const char* n : {"64", "128"}) {
            const auto& rs = run(std::string("apsp_exact n=") + n,
                                 make({{"algo", "apsp_exact"}, {"family", "random_connected"}, {"n", n},
                                       {"max_weight", "8"}, {"seeds", "1-20"}}));
            ok = at_least(tally(rs, [](const RunRecord& r) { return r.exact_match; }), 0.95, d) && ok;
        }
        report(1, "exact APSP matches Floyd-Warshall", ok, d);
    }

    // 2: exact SSSP, phases and per-phase cost
    {
        bool exact = true, phases = true;
        double worst = 0;
        int runs = 0;
        for (const char* fam : {"path", "star", "random_connected"}) {
            const auto& rs = run(std::string("sssp_exact ") + fam,
                                 make({{"algo", "sssp_exact"}, {"family", fam}, {"n", "32,64,128"}, {"seeds", "1-10"}}));
            for (const auto& r : rs) {
                ++runs;
                exact = exact && r.exact_match;
                phases = phases && std::stoi(note_value(r, "phases")) <= std::stoi(note_value(r, "phase_bound"));
                worst = std::max(worst, std::stod(note_value(r, "max_phase_per_log2sq")));
            }
        }
        const double c = 2.0;
        report(2, "exact SSSP", exact && phases && worst <= c,
               " " + std::to_string(runs) + " runs exact=" + std::to_string(exact) + " phases_within_bound=" +
                   std::to_string(phases) + " max rounds/phase/log2^2 n=" + fmt(worst) + " (c=" + fmt(c) + ")");
    }

    // 3: splitting node
    {
        long trees = 0, bad = 0;
        for (int n = 2; n <= 9; ++n)
            for_each_tree(n, [&](const std::vector<NodeId>& parent) {
                std::vector<std::vector<NodeId>> ch(parent.size());
                for (std::size_t v = 2; v < parent.size(); ++v) ch[parent[v]].push_back(static_cast<NodeId>(v));
                ++trees;
                bad += 2 * largest_piece(parent, splitting_node(ch, 1)) > n;
            });
        report(3, "splitting node leaves components of size <= n/2", bad == 0,
               " " + std::to_string(trees) + " labelled trees (n<=9), " + std::to_string(bad) + " violations");
    }

    // 4: token dissemination
    {
        bool ok = true, copies = true;
        std::string d;
        for (auto [n, ks] : {std::pair{"256", "16,256"}, std::pair{"1024", "32,1024"}}) {
            const auto& rs = run(std::string("td n=") + n,
                                 make({{"algo", "td"}, {"family", "random_connected"}, {"n", n}, {"k", ks},
                                       {"seeds", "1-20"}}));
            ok = at_least(tally(rs, [](const RunRecord& r) { return r.exact_match; }), 0.95, d) && ok;
            for (const auto& r : rs) {
                std::int64_t expect = r.k;
                while (2 * expect <= r.n) expect *= 2;  // k * 2^floor(log2(n/k))
                copies = copies && std::stoll(note_value(r, "copies")) == expect;
            }
        }
        report(4, "token dissemination completes", ok && copies, d + " copies_ok=" + std::to_string(copies));
    }

    // 5: 3-approximate APSP
    {
        const auto& rs = run("apsp_3 n=256", make({{"algo", "apsp_3"}, {"n", "256"}, {"seeds", "1-20"}}));
        std::string d;
        bool ok = at_least(tally(rs, [](const RunRecord& r) { return r.max_ratio <= 3.0 + 1e-12; }), 0.95, d);
        int lower = 0;
        double worst = 1;
        for (const auto& r : rs) {
            lower += r.lower_bound_ok;
            worst = std::max(worst, r.max_ratio);
        }
        ok = ok && lower == static_cast<int>(rs.size());
        report(5, "3-approximate APSP", ok,
               d + " lower_bound " + std::to_string(lower) + "/" + std::to_string(rs.size()) + " max ratio " + fmt(worst));
    }

    // 6: (1+eps)-approximate APSP on unweighted graphs
    {
        bool ok = true;
        std::string d;
        for (const char* eps : {"0.25", "0.5"}) {
            const auto& rs = run(std::string("apsp_eps eps=") + eps,
                                 make({{"algo", "apsp_eps"}, {"n", "256"}, {"eps", eps}, {"seeds", "1-20"}}),
                                 {1, 2});
            d += " eps=" + std::string(eps);
            ok = at_least(tally(rs, [](const RunRecord& r) { return r.valid; }), 0.95, d) && ok;
        }
        report(6, "(1+eps)-approximate APSP", ok, d);
    }

    // 7: (1+eps)-approximate SSSP with broadcast congested clique
    {
        const auto& rs = run("sssp_bcc n=512",
                             make({{"algo", "sssp_bcc"}, {"n", "512"}, {"eps", "0.5"}, {"unit", "true"}, {"seeds", "1-20"}}));
        std::string d;
        bool ok = at_least(tally(rs, [](const RunRecord& r) { return r.max_ratio <= 1.5 + 1e-12; }), 0.95, d);
        for (const auto& r : rs) ok = ok && r.lower_bound_ok && note_value(r, "transcripts_agree") == "1";
        d += " x=" + note_value(rs.front(), "x") + " bcc_rounds=" + note_value(rs.front(), "bcc_rounds");
        // default parameters mark every node at this size; a sparse skeleton run exercises the clique path
        const auto& cs = run("sssp_bcc grid companion",
                             make({{"algo", "sssp_bcc"}, {"family", "grid"}, {"n", "256"}, {"eps", "0.5"},
                                   {"unit", "true"}, {"xi", "0.25"}, {"x", "16"}, {"lambda", "inf"}, {"seeds", "1-20"}}));
        std::string cd;
        const bool cok = at_least(tally(cs, [](const RunRecord& r) { return r.valid; }), 0.95, cd);
        double worst = 1;
        for (const auto& r : cs) worst = std::max(worst, r.max_ratio);
        report(7, "(1+eps)-approximate SSSP", ok, d + " | info, sparse skeleton on grid:" + cd + " max ratio " +
                                                         fmt(worst) + (cok ? " ok" : " below 19/20"));
    }

    // 8: skeleton spanner
    {
        const auto& rs = run("spanner_only n=256",
                             make({{"algo", "spanner_only"}, {"n", "256"}, {"k", "40"}, {"h", "8"}, {"spanner_k", "3"},
                                   {"eta", "2"}, {"seeds", "1-20"}}));
        int cover = 0, size = 0, wit = 0;
        for (const auto& r : rs) {
            cover += r.valid;
            size += note_value(r, "size_ok") == "1";
            wit += note_value(r, "witness_ok") == "1";
        }
        const int t = static_cast<int>(rs.size());
        report(8, "skeleton spanner", cover >= 0.95 * t && size >= 0.95 * t && wit == t,
               " coverage " + std::to_string(cover) + "/" + std::to_string(t) + " size " + std::to_string(size) + "/" +
                   std::to_string(t) + " witnesses " + std::to_string(wit) + "/" + std::to_string(t));
    }

    // 9: recursive SSSP
    {
        const auto& rs = run("sssp_recursive n=512",
                             make({{"algo", "sssp_recursive"}, {"n", "512"}, {"alpha", "8"}, {"seeds", "1-10"}}));
        int ok = 0;
        double worst = 1;
        for (const auto& r : rs) {
            ok += r.valid;
            worst = std::max(worst, r.max_ratio);
        }
        report(9, "recursive SSSP within stretch budget", ok == static_cast<int>(rs.size()),
               " " + std::to_string(ok) + "/" + std::to_string(rs.size()) + " max ratio " + fmt(worst) + " budget " +
                   note_value(rs.front(), "budget"));
    }

    // 10: round scaling
    {
        const auto fa = scaling_fit(run("apsp_exact scaling",
                                        make({{"algo", "apsp_exact"}, {"n", "64,128,256,512"}, {"seeds", "1-5"}}), {1}),
                                    FitAxis::n);
        const auto ft = scaling_fit(run("td scaling",
                                        make({{"algo", "td"}, {"n", "1024"}, {"k", "1024,4096,16384"}, {"seeds", "1-5"}}),
                                        {1}),
                                    FitAxis::k);
        const auto fs = scaling_fit(run("sssp_exact unit paths",
                                        make({{"algo", "sssp_exact"}, {"family", "path"}, {"unit", "true"},
                                              {"n", "64,128,256,512"}, {"seeds", "1-5"}})),
                                    FitAxis::spd);
        const auto fb = scaling_fit(run("sssp_exact brooms",
                                        make({{"algo", "sssp_exact"}, {"family", "broom"}, {"unit", "true"}, {"n", "512"},
                                              {"handles", "32,64,128,255"}, {"seeds", "1-5"}})),
                                    FitAxis::spd);
        auto in = [](const FitResult& f, double lo, double hi) { return f.slope >= lo && f.slope <= hi; };
        const bool a = in(fa, 0.55, 0.85), t = in(ft, 0.4, 0.65), s = in(fs, 0.4, 0.65);
        report(10, "round scaling", a && t && s,
               " apsp_exact vs n " + fit_text(fa) + (a ? " ok" : " OUT [0.55,0.85]") + "; td vs k " + fit_text(ft) +
                   (t ? " ok" : " OUT [0.4,0.65]") + "; sssp_exact vs SPD (unit paths) " + fit_text(fs) +
                   (s ? " ok" : " OUT [0.4,0.65]") + "; info, brooms n=512 " + fit_text(fb));
    }

    // 11: no drops under the reference local capacities
    {
        bool ok = true;
        std::string d;
        int configs = 0;
        for (const auto& b : batches) {
            if (!b.reference_lambda) continue;
            for (const auto& [g, pt] : tally(b.recs, [](const RunRecord& r) { return r.dropped == 0; })) {
                ++configs;
                if (pt.first < 0.95 * pt.second - 1e-9) {
                    ok = false;
                    d += " [" + b.name + " " + g + " " + std::to_string(pt.first) + "/" + std::to_string(pt.second) + "]";
                }
            }
        }
        report(11, "zero drops at reference capacities", ok, " " + std::to_string(configs) + " configurations checked" + d);
    }

    // 12: determinism
    {
        bool ok = true;
        int compared = 0;
        std::string d;
        const std::size_t original = batches.size();
        for (std::size_t i = 0; i < original; ++i) {
            Batch b = batches[i];
            std::vector<RunRecord> expect = b.recs;
            ExperimentConfig c = b.cfg;
            if (!b.rerun_seeds.empty()) {
                c.seeds = b.rerun_seeds;
                expect.clear();
                for (const auto& r : b.recs)
                    for (auto s : b.rerun_seeds)
                        if (r.seed == s) expect.push_back(r);
            }
            const auto again = run_experiment(c);
            compared += static_cast<int>(again.size());
            if (csv(again) != csv(expect)) {
                ok = false;
                d += " [" + b.name + " differs]";
            }
        }
        report(12, "byte-identical reruns", ok, " " + std::to_string(compared) + " runs recomputed" + d);
    }

    std::printf("%d criteria failed\n", failures);
    return failures ? 1 : 0;
}
