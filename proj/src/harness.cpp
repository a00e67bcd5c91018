#include "hybridnet/harness.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <exception>
#include <fstream>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>
#include <thread>

#include "hybridnet/apsp.hpp"
#include "hybridnet/rng.hpp"
#include "hybridnet/spanner.hpp"
#include "hybridnet/sssp_bcc.hpp"
#include "hybridnet/sssp_exact.hpp"
#include "hybridnet/tokens.hpp"

namespace hybridnet {

namespace {

const std::pair<Algo, const char*> kAlgos[] = {
    {Algo::td, "td"},
    {Algo::apsp_exact, "apsp_exact"},
    {Algo::apsp_3, "apsp_3"},
    {Algo::apsp_eps, "apsp_eps"},
    {Algo::sssp_exact, "sssp_exact"},
    {Algo::sssp_bcc, "sssp_bcc"},
    {Algo::sssp_recursive, "sssp_recursive"},
    {Algo::hk_ssp, "hk_ssp"},
    {Algo::spanner_only, "spanner_only"},
};

std::string trim(const std::string& s) {
    const auto a = s.find_first_not_of(" \t\r");
    if (a == std::string::npos) return "";
    const auto b = s.find_last_not_of(" \t\r");
    return s.substr(a, b - a + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::string cur;
    std::istringstream in(s);
    while (std::getline(in, cur, sep)) out.push_back(trim(cur));
    if (!s.empty() && s.back() == sep) out.emplace_back();
    return out;
}

long long to_ll(const std::string& s, const std::string& what) {
    try {
        std::size_t pos = 0;
        const long long v = std::stoll(s, &pos);
        if (pos != s.size()) throw InvalidArgument("");
        return v;
    } catch (const std::exception&) {
        throw InvalidArgument("bad " + what + " '" + s + "'");
    }
}

double to_double(const std::string& s, const std::string& what) {
    try {
        std::size_t pos = 0;
        const double v = std::stod(s, &pos);
        if (pos != s.size()) throw InvalidArgument("");
        return v;
    } catch (const std::exception&) {
        throw InvalidArgument("bad " + what + " '" + s + "'");
    }
}

bool to_bool(const std::string& s, const std::string& what) {
    if (s == "1" || s == "true" || s == "yes" || s == "on") return true;
    if (s == "0" || s == "false" || s == "no" || s == "off") return false;
    throw InvalidArgument("bad " + what + " '" + s + "'");
}

std::string fmt_double(double v) {
    if (std::isinf(v)) return "inf";
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.6f", v);
    return buf;
}

// max over pairs of approx / true, and whether approx >= true everywhere
struct Ratio {
    double max = 1.0;
    bool lower_ok = true;
    bool exact = true;
};

void account(Ratio& r, Weight approx, Weight truth) {
    if (approx != truth) r.exact = false;
    if (approx < truth) r.lower_ok = false;
    if (is_inf(truth) || truth == 0) return;
    const double q = is_inf(approx) ? INFINITY : static_cast<double>(approx) / static_cast<double>(truth);
    r.max = std::max(r.max, q);
}

std::vector<NodeId> pick_distinct(int n, std::int64_t k, std::uint64_t seed, std::uint64_t purpose) {
    std::vector<NodeId> ids(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) ids[static_cast<std::size_t>(i)] = i + 1;
    Rng rng = stream(seed, Stream::test, 0, purpose);
    const auto kk = static_cast<std::size_t>(std::min<std::int64_t>(k, n));
    for (std::size_t i = 0; i < kk; ++i) {
        const auto j = i + static_cast<std::size_t>(rng.below(ids.size() - i));
        std::swap(ids[i], ids[j]);
    }
    ids.resize(kk);
    std::sort(ids.begin(), ids.end());
    return ids;
}

std::string phases_to_string(const std::vector<std::pair<std::string, std::int64_t>>& v) {
    std::string s;
    for (const auto& [label, r] : v) {
        if (!s.empty()) s += ';';
        s += label + '=' + std::to_string(r);
    }
    return s;
}

std::int64_t default_k(Algo a, int n) {
    switch (a) {
        case Algo::td: return n;
        case Algo::hk_ssp: return static_cast<std::int64_t>(std::ceil(std::sqrt(static_cast<double>(n))));
        case Algo::spanner_only: return static_cast<std::int64_t>(std::ceil(std::cbrt(static_cast<double>(n) * n) - 1e-9));
        default: return 0;
    }
}

std::string context(Algo a, int n, std::uint64_t seed) {
    return algo_name(a) + " n=" + std::to_string(n) + " seed=" + std::to_string(seed);
}

bool uses_k(Algo a) { return a == Algo::td || a == Algo::hk_ssp || a == Algo::spanner_only; }
bool needs_spd(Algo a) { return a == Algo::sssp_exact || a == Algo::hk_ssp; }

}  // namespace

Algo parse_algo(const std::string& name) {
    for (const auto& [a, s] : kAlgos)
        if (name == s) return a;
    throw InvalidArgument("unknown algorithm '" + name + "'");
}

std::string algo_name(Algo a) {
    for (const auto& [b, s] : kAlgos)
        if (a == b) return s;
    return "?";
}

void ExperimentConfig::validate() const {
    if (n_list.empty()) throw InvalidArgument("n list is empty");
    if (seeds.empty()) throw InvalidArgument("seed list is empty");
    for (int n : n_list)
        if (n < 2) throw InvalidArgument("every n must be at least 2");
    if (lambda != kUnbounded && lambda < 0) throw InvalidArgument("lambda must be positive, inf, or 0 for the reference profile");
    if (gamma < 0) throw InvalidArgument("gamma must be non-negative");
    if (!(eps > 0) || eps > 1) throw InvalidArgument("eps must be in (0, 1]");
    if (algo == Algo::sssp_recursive && !(alpha >= 5)) throw InvalidArgument("sssp_recursive needs alpha >= 5");
    if (x < 0) throw InvalidArgument("x must be non-negative");
    if (h < 0) throw InvalidArgument("h must be non-negative");
    if (spanner_k < 1) throw InvalidArgument("spanner_k must be at least 1");
    if (!(eta > 1)) throw InvalidArgument("eta must exceed 1");
    if (!(xi > 0)) throw InvalidArgument("xi must be positive");
    if (min_pass < 0 || min_pass > 1) throw InvalidArgument("min_pass must be in [0, 1]");
    if (jobs < 1) throw InvalidArgument("jobs must be at least 1");
    for (auto k : k_list)
        if (k < 1) throw InvalidArgument("k values must be positive");
    if (!handles.empty() && family != Family::broom) throw InvalidArgument("handles only apply to the broom family");
    for (int hd : handles)
        for (int n : n_list)
            if (hd < 1 || hd > n) throw InvalidArgument("broom handle must be in [1, n]");
}

std::vector<int> parse_int_list(const std::string& s) {
    std::vector<int> out;
    for (const auto& part : split(s, ',')) {
        if (part.empty()) throw InvalidArgument("empty entry in list '" + s + "'");
        out.push_back(static_cast<int>(to_ll(part, "integer")));
    }
    return out;
}

std::vector<std::uint64_t> parse_seed_list(const std::string& s) {
    std::vector<std::uint64_t> out;
    for (const auto& part : split(s, ',')) {
        if (part.empty()) throw InvalidArgument("empty entry in seed list '" + s + "'");
        const auto dash = part.find('-', 1);
        if (dash == std::string::npos) {
            const auto v = to_ll(part, "seed");
            if (v < 0) throw InvalidArgument("seeds must be non-negative");
            out.push_back(static_cast<std::uint64_t>(v));
            continue;
        }
        const auto a = to_ll(part.substr(0, dash), "seed");
        const auto b = to_ll(part.substr(dash + 1), "seed");
        if (a < 0 || b < a) throw InvalidArgument("bad seed range '" + part + "'");
        for (auto v = a; v <= b; ++v) out.push_back(static_cast<std::uint64_t>(v));
    }
    return out;
}

std::int64_t parse_lambda(const std::string& s) {
    if (s == "inf" || s == "unbounded") return kUnbounded;
    if (s == "reference") return kLambdaReference;
    const auto v = to_ll(s, "lambda");
    if (v < 1) throw InvalidArgument("lambda must be positive, 'inf' or 'reference'");
    return v;
}

void apply_setting(ExperimentConfig& c, const std::string& key_in, const std::string& value) {
    std::string key = key_in;
    std::replace(key.begin(), key.end(), '-', '_');
    if (key == "algo") c.algo = parse_algo(value);
    else if (key == "family") c.family = parse_family(value);
    else if (key == "n") c.n_list = parse_int_list(value);
    else if (key == "seeds") c.seeds = parse_seed_list(value);
    else if (key == "lambda") c.lambda = parse_lambda(value);
    else if (key == "gamma") c.gamma = to_ll(value, "gamma");
    else if (key == "eps") c.eps = to_double(value, "eps");
    else if (key == "alpha") c.alpha = to_double(value, "alpha");
    else if (key == "x") c.x = to_ll(value, "x");
    else if (key == "strict") c.strict = to_bool(value, "strict");
    else if (key == "unit") c.unit = to_bool(value, "unit");
    else if (key == "max_weight") c.max_weight = to_ll(value, "max_weight");
    else if (key == "handles") c.handles = parse_int_list(value);
    else if (key == "k") {
        c.k_list.clear();
        for (int v : parse_int_list(value)) c.k_list.push_back(v);
    } else if (key == "h" || key == "hops") c.h = static_cast<int>(to_ll(value, "h"));
    else if (key == "spanner_k") c.spanner_k = static_cast<int>(to_ll(value, "spanner_k"));
    else if (key == "eta") c.eta = to_double(value, "eta");
    else if (key == "xi") c.xi = to_double(value, "xi");
    else if (key == "min_pass") c.min_pass = to_double(value, "min_pass");
    else if (key == "jobs") c.jobs = static_cast<int>(to_ll(value, "jobs"));
    else if (key == "timing") c.timing = to_bool(value, "timing");
    else if (key == "out") c.out = value;
    else throw InvalidArgument("unknown config key '" + key_in + "'");
}

ExperimentConfig read_config(std::istream& in, ExperimentConfig base) {
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw InvalidArgument("config line " + std::to_string(lineno) + ": expected key=value");
        try {
            apply_setting(base, trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
        } catch (const InvalidArgument& e) {
            throw InvalidArgument("config line " + std::to_string(lineno) + ": " + e.what());
        }
    }
    return base;
}

ExperimentConfig load_config(const std::string& path, ExperimentConfig base) {
    std::ifstream in(path);
    if (!in) throw InvalidArgument("cannot open config '" + path + "'");
    return read_config(in, std::move(base));
}

std::int64_t reference_lambda(Algo a, int n, std::int64_t k, int spd, double eps) {
    const double lg = std::max<double>(1.0, static_cast<double>(ceil_log2(n)));
    const double nn = static_cast<double>(n);
    auto up = [](double v) { return std::max<std::int64_t>(1, static_cast<std::int64_t>(std::ceil(v - 1e-9))); };
    switch (a) {
        case Algo::td: return up(std::sqrt(static_cast<double>(std::max<std::int64_t>(1, k))));
        case Algo::apsp_exact:
        case Algo::apsp_3:
        case Algo::apsp_eps: return 2 * static_cast<std::int64_t>(n);
        case Algo::sssp_exact:
        case Algo::hk_ssp: return up(nn * nn * lg / std::sqrt(static_cast<double>(std::max(1, spd))));
        case Algo::sssp_bcc: return up(std::cbrt(nn * nn) * std::pow(eps, 6.0) * lg);
        case Algo::sssp_recursive:
        case Algo::spanner_only: return 1;
    }
    return kUnbounded;
}

RunRecord run_one(const ExperimentConfig& c, int n, std::uint64_t seed, std::int64_t k, int handle) {
    const auto t0 = std::chrono::steady_clock::now();
    RunRecord rec;
    rec.algo = c.algo;
    rec.family = c.family;
    rec.n = n;
    rec.seed = seed;
    rec.handle = c.family == Family::broom ? (handle > 0 ? handle : std::max(1, n / 2)) : 0;
    if (uses_k(c.algo)) rec.k = k > 0 ? k : default_k(c.algo, n);

    try {
        GenOptions opt;
        opt.unit = c.unit || c.algo == Algo::apsp_eps;
        opt.max_weight = c.max_weight;
        opt.handle = rec.handle;
        const WeightedGraph g = gen_graph(c.family, n, seed, opt);
        if (needs_spd(c.algo)) rec.spd = shortest_path_diameter(g);

        HybridConfig hc;
        hc.lambda = c.lambda == kLambdaReference ? reference_lambda(c.algo, n, rec.k, rec.spd, c.eps) : c.lambda;
        hc.gamma = c.gamma;
        hc.seed = seed;
        hc.strict = c.strict;
        Engine eng(g, hc);
        rec.lambda = hc.lambda;
        rec.gamma = eng.gamma();
        std::ostringstream note;

        switch (c.algo) {
            case Algo::td: {
                std::vector<Token> tokens;
                std::vector<NodeId> origin;
                const auto where = rec.k >= n ? std::vector<NodeId>{} : pick_distinct(n, rec.k, seed, 1);
                for (std::int64_t t = 0; t < rec.k; ++t) {
                    tokens.push_back({static_cast<NodeId>(t % n) + 1, 0, t});
                    origin.push_back(rec.k >= n ? static_cast<NodeId>(t % n) + 1 : where[static_cast<std::size_t>(t)]);
                }
                TdParams p;
                p.x = c.x;
                TokenState st;
                const auto m = disseminate(eng, tokens, origin, p, &st);
                bool copies_ok = true;
                if (m.multiplication_phases > 0)
                    copies_ok = m.copies_after_multiplication == rec.k * (std::int64_t{1} << m.multiplication_phases);
                rec.exact_match = m.complete;
                rec.valid = m.complete && copies_ok;
                note << "x=" << m.x << ";phi=" << m.multiplication_phases << ";copies=" << m.copies_after_multiplication
                     << ";copies_ok=" << copies_ok;
                break;
            }
            case Algo::apsp_exact:
            case Algo::apsp_3:
            case Algo::apsp_eps: {
                ApspParams p;
                p.xi = c.xi;
                p.x = c.x;
                p.eps = c.eps;
                const auto res = c.algo == Algo::apsp_exact ? exact_apsp(eng, p)
                                                            : approx_apsp(eng, c.algo == Algo::apsp_3 ? ApspMode::approx3
                                                                                                      : ApspMode::approx_eps,
                                                                          p);
                const auto truth = all_pairs_dijkstra(g);
                Ratio r;
                for (NodeId u = 1; u <= n; ++u)
                    for (NodeId v = 1; v <= n; ++v) account(r, res.d.at(u, v), truth.at(u, v));
                rec.exact_match = r.exact;
                rec.max_ratio = r.max;
                rec.lower_bound_ok = r.lower_ok;
                const double bound = c.algo == Algo::apsp_exact ? 1.0 : c.algo == Algo::apsp_3 ? 3.0 : 1.0 + c.eps;
                rec.valid = c.algo == Algo::apsp_exact ? r.exact : (r.lower_ok && r.max <= bound + 1e-12);
                note << "x=" << res.skeleton.x << ";h=" << res.skeleton.h << ";marked=" << res.skeleton.marked.size()
                     << ";td_complete=" << res.td_complete;
                break;
            }
            case Algo::sssp_exact: {
                SsspMetrics m;
                const auto d = exact_sssp(eng, 1, {}, &m);
                const auto truth = dijkstra(g, 1);
                Ratio r;
                for (NodeId v = 1; v <= n; ++v) account(r, d[v], truth[v]);
                const int bound = static_cast<int>(std::ceil(2.0 * std::sqrt(static_cast<double>(rec.spd)) - 1e-9)) + 1;
                std::int64_t worst = 0;
                for (auto x : m.rounds_per_phase) worst = std::max(worst, x);
                const double lg = std::log2(static_cast<double>(n));
                rec.exact_match = r.exact;
                rec.max_ratio = r.max;
                rec.lower_bound_ok = r.lower_ok;
                rec.valid = r.exact && m.phases <= bound;
                note << "phases=" << m.phases << ";phase_bound=" << bound << ";max_phase_per_log2sq="
                     << fmt_double(static_cast<double>(worst) / (lg * lg));
                break;
            }
            case Algo::sssp_bcc: {
                BccParams p;
                p.eps = c.eps;
                p.xi = c.xi;
                p.x = c.x;
                BccMetrics m;
                const auto d = approx_sssp_bcc(eng, 1, p, &m);
                const auto truth = dijkstra(g, 1);
                Ratio r;
                for (NodeId v = 1; v <= n; ++v) account(r, d[v], truth[v]);
                rec.exact_match = r.exact;
                rec.max_ratio = r.max;
                rec.lower_bound_ok = r.lower_ok;
                rec.valid = r.lower_ok && r.max <= 1.0 + c.eps + 1e-12 && m.transcripts_agree;
                note << "x=" << m.x << ";h=" << m.h << ";marked=" << m.marked << ";bcc_rounds=" << m.bcc_rounds
                     << ";transcripts_agree=" << m.transcripts_agree;
                break;
            }
            case Algo::sssp_recursive: {
                HierarchyParams p;
                p.alpha = c.alpha;
                p.eta = c.eta;
                RecursiveMetrics m;
                const auto d = recursive_sssp(eng, 1, p, &m);
                const auto truth = dijkstra(g, 1);
                Ratio r;
                bool finite = true;
                for (NodeId v = 1; v <= n; ++v) {
                    account(r, d[v], truth[v]);
                    finite = finite && !is_inf(d[v]);
                }
                rec.exact_match = r.exact;
                rec.max_ratio = r.max;
                rec.lower_bound_ok = r.lower_ok;
                rec.valid = r.lower_ok && finite && r.max <= m.stretch_budget;
                note << "T=" << m.T << ";k=" << m.k << ";h=" << m.h << ";bfs_rounds=" << m.bfs_rounds
                     << ";budget=" << m.stretch_budget << ";finite=" << finite;
                break;
            }
            case Algo::hk_ssp: {
                const int h = c.h > 0 ? c.h : static_cast<int>(std::ceil(std::sqrt(static_cast<double>(n))));
                const auto sources = pick_distinct(n, rec.k, seed, 2);
                const auto res = hk_ssp(eng, sources, h);
                Ratio r;
                for (std::size_t j = 0; j < sources.size(); ++j) {
                    const auto truth = h_limited_distances(g, sources[j], h);
                    for (NodeId v = 1; v <= n; ++v) account(r, res.dist[j][static_cast<std::size_t>(v)], truth[v]);
                }
                rec.exact_match = r.exact;
                rec.max_ratio = r.max;
                rec.lower_bound_ok = r.lower_ok;
                rec.valid = r.exact;
                note << "h=" << h << ";q=" << res.q;
                break;
            }
            case Algo::spanner_only: {
                SpannerParams p;
                p.h = c.h > 0 ? c.h : 8;
                p.k = c.spanner_k;
                p.eta = c.eta;
                std::vector<NodeId> marked;
                const double prob = static_cast<double>(rec.k) / n;
                for (NodeId v = 1; v <= n; ++v) {
                    Rng rng = stream(seed, Stream::marking, static_cast<std::uint64_t>(v), 7);
                    if (rng.bernoulli(prob)) marked.push_back(v);
                }
                const auto s = build_skeleton_spanner(g, marked, p, seed, &eng);
                const auto H = s.as_graph();
                bool witness_ok = true;
                for (const auto& e : s.edges)
                    witness_ok = witness_ok && e.witness.size() >= 2 && e.witness.front() == e.u &&
                                 e.witness.back() == e.v && path_weight(g, e.witness) == e.w;
                // <=2-edge coverage against the h-limited oracle
                const auto hops = all_pairs_hops(g);
                const double stretch = 2.0 * p.eta * p.k;
                double worst = 1.0;
                bool lower = true;
                for (std::size_t i = 0; i < marked.size(); ++i) {
                    const NodeId u = marked[i];
                    const auto dh = h_limited_distances(g, u, p.h);
                    const auto dg = dijkstra(g, u);
                    for (const auto& a : H.neighbors(u)) lower = lower && a.w >= dg[a.to];
                    for (std::size_t j = i + 1; j < marked.size(); ++j) {
                        const NodeId v = marked[j];
                        const int hp = hops[static_cast<std::size_t>(u)][static_cast<std::size_t>(v)];
                        if (hp < 0 || hp > p.h) continue;
                        Weight best = H.weight(u, v);
                        for (const auto& a : H.neighbors(u)) best = std::min(best, sat_add(a.w, H.weight(a.to, v)));
                        worst = std::max(worst, is_inf(best) ? INFINITY
                                                             : static_cast<double>(best) / static_cast<double>(dh[v]));
                    }
                }
                const double m = static_cast<double>(marked.size());
                const double size_bound = 8.0 * p.k * std::pow(m, 1.0 + 1.0 / p.k) * std::log(static_cast<double>(n)) *
                                          std::max(1.0, std::log(static_cast<double>(s.W)) / std::log(p.eta));
                rec.k = static_cast<std::int64_t>(marked.size());
                rec.max_ratio = worst;
                rec.lower_bound_ok = lower;
                rec.valid = witness_ok && worst <= stretch + 1e-12;
                note << "edges=" << s.edges.size() << ";size_ok=" << (static_cast<double>(s.edges.size()) <= size_bound)
                     << ";witness_ok=" << witness_ok << ";W=" << s.W << ";stages=" << s.stages
                     << ";max_membership=" << s.max_membership << ";max_responsible=" << s.max_responsible();
                break;
            }
        }
        rec.rounds_total = eng.ledger().rounds();
        rec.rounds_by_phase = eng.ledger().rounds_by_phase();
        rec.max_local_per_edge = eng.ledger().max_local();
        rec.max_global_per_node = eng.ledger().max_global();
        rec.dropped = eng.ledger().dropped();
        rec.note = note.str();
    } catch (const RunFault&) {
        throw;
    } catch (const CapacityFault& e) {
        throw RunFault(context(c.algo, n, seed) + " round=" + std::to_string(e.round) + ": " + e.what(),
                       FaultKind::capacity, c.algo, n, seed, e.round);
    } catch (const ProtocolFault& e) {
        throw RunFault(context(c.algo, n, seed) + ": " + e.what(), FaultKind::protocol, c.algo, n, seed, -1);
    } catch (const InvalidArgument& e) {
        throw RunFault(context(c.algo, n, seed) + ": " + e.what(), FaultKind::invalid_argument, c.algo, n, seed, -1);
    } catch (const Error& e) {
        throw RunFault(context(c.algo, n, seed) + ": " + e.what(), FaultKind::other, c.algo, n, seed, -1);
    }
    rec.wall_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
    return rec;
}

std::vector<RunRecord> run_experiment(const ExperimentConfig& c) {
    c.validate();
    struct Job {
        int n;
        int handle;
        std::int64_t k;
        std::uint64_t seed;
    };
    std::vector<Job> jobs;
    const std::vector<int> hs = c.handles.empty() ? std::vector<int>{0} : c.handles;
    const std::vector<std::int64_t> ks = c.k_list.empty() ? std::vector<std::int64_t>{0} : c.k_list;
    for (int n : c.n_list)
        for (int hd : hs)
            for (auto k : ks)
                for (auto s : c.seeds) jobs.push_back({n, hd, k, s});

    std::vector<RunRecord> out(jobs.size());
    std::vector<std::exception_ptr> errs(jobs.size());
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i; (i = next++) < jobs.size();) {
            try {
                out[i] = run_one(c, jobs[i].n, jobs[i].seed, jobs[i].k, jobs[i].handle);
            } catch (...) {
                errs[i] = std::current_exception();
            }
        }
    };
    const int threads = std::min<int>(c.jobs, static_cast<int>(jobs.size()));
    if (threads <= 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (int t = 0; t < threads; ++t) pool.emplace_back(worker);
        for (auto& t : pool) t.join();
    }
    // report the first failure in job order so the outcome is deterministic
    for (const auto& e : errs)
        if (e) std::rethrow_exception(e);
    return out;
}

void write_records_csv(std::ostream& out, const std::vector<RunRecord>& rs, bool timing) {
    out << "schema,algo,family,n,seed,k,handle,spd,lambda,gamma,rounds_total,rounds_by_phase,max_local_per_edge,"
           "max_global_per_node,dropped,exact_match,max_ratio,lower_bound_ok,valid,note";
    if (timing) out << ",wall_ms";
    out << '\n';
    for (const auto& r : rs) {
        out << kCsvSchema << ',' << algo_name(r.algo) << ',' << family_name(r.family) << ',' << r.n << ',' << r.seed
            << ',' << r.k << ',' << r.handle << ',' << r.spd << ',' << (r.lambda == kUnbounded ? "inf" : std::to_string(r.lambda))
            << ',' << r.gamma << ',' << r.rounds_total << ',' << phases_to_string(r.rounds_by_phase) << ','
            << r.max_local_per_edge << ',' << r.max_global_per_node << ',' << r.dropped << ',' << r.exact_match << ','
            << fmt_double(r.max_ratio) << ',' << r.lower_bound_ok << ',' << r.valid << ',' << r.note;
        if (timing) out << ',' << fmt_double(r.wall_ms);
        out << '\n';
    }
}

std::vector<RunRecord> read_records_csv(std::istream& in) {
    std::string line;
    if (!std::getline(in, line)) throw InvalidArgument("empty records file");
    const auto header = split(line, ',');
    std::map<std::string, std::size_t> col;
    for (std::size_t i = 0; i < header.size(); ++i) col[header[i]] = i;
    for (const char* need : {"schema", "algo", "n", "seed", "k", "spd", "rounds_total", "valid"})
        if (!col.count(need)) throw InvalidArgument(std::string("records file lacks column '") + need + "'");
    std::vector<RunRecord> rs;
    int lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (trim(line).empty()) continue;
        const auto f = split(line, ',');
        if (f.size() != header.size())
            throw InvalidArgument("records line " + std::to_string(lineno) + " has " + std::to_string(f.size()) +
                                  " fields, expected " + std::to_string(header.size()));
        auto get = [&](const char* name) -> const std::string& { return f[col.at(name)]; };
        if (to_ll(get("schema"), "schema") != kCsvSchema) throw InvalidArgument("unsupported records schema");
        RunRecord r;
        r.algo = parse_algo(get("algo"));
        if (col.count("family")) r.family = parse_family(get("family"));
        r.n = static_cast<int>(to_ll(get("n"), "n"));
        r.seed = static_cast<std::uint64_t>(to_ll(get("seed"), "seed"));
        r.k = to_ll(get("k"), "k");
        if (col.count("handle")) r.handle = static_cast<int>(to_ll(get("handle"), "handle"));
        r.spd = static_cast<int>(to_ll(get("spd"), "spd"));
        r.rounds_total = to_ll(get("rounds_total"), "rounds_total");
        r.valid = to_bool(get("valid"), "valid");
        if (col.count("lambda")) r.lambda = to_ll(get("lambda"), "lambda");
        if (col.count("gamma")) r.gamma = to_ll(get("gamma"), "gamma");
        if (col.count("rounds_by_phase"))
            for (const auto& part : split(get("rounds_by_phase"), ';')) {
                if (part.empty()) continue;
                const auto eq = part.rfind('=');
                if (eq == std::string::npos) throw InvalidArgument("bad rounds_by_phase entry '" + part + "'");
                r.rounds_by_phase.emplace_back(part.substr(0, eq), to_ll(part.substr(eq + 1), "phase rounds"));
            }
        if (col.count("max_local_per_edge")) r.max_local_per_edge = to_ll(get("max_local_per_edge"), "max_local_per_edge");
        if (col.count("max_global_per_node"))
            r.max_global_per_node = to_ll(get("max_global_per_node"), "max_global_per_node");
        if (col.count("dropped")) r.dropped = to_ll(get("dropped"), "dropped");
        if (col.count("wall_ms")) r.wall_ms = to_double(get("wall_ms"), "wall_ms");
        if (col.count("exact_match")) r.exact_match = to_bool(get("exact_match"), "exact_match");
        if (col.count("lower_bound_ok")) r.lower_bound_ok = to_bool(get("lower_bound_ok"), "lower_bound_ok");
        if (col.count("max_ratio")) {
            const auto& s = get("max_ratio");
            r.max_ratio = s == "inf" ? INFINITY : to_double(s, "max_ratio");
        }
        if (col.count("note")) r.note = get("note");
        rs.push_back(std::move(r));
    }
    return rs;
}

std::vector<PassSummary> summarize(const std::vector<RunRecord>& rs) {
    std::vector<PassSummary> out;
    for (const auto& r : rs) {
        const std::string g = algo_name(r.algo) + " n=" + std::to_string(r.n) + " k=" + std::to_string(r.k) +
                              " handle=" + std::to_string(r.handle);
        auto it = std::find_if(out.begin(), out.end(), [&](const PassSummary& p) { return p.group == g; });
        if (it == out.end()) {
            out.push_back({g, 0, 0});
            it = out.end() - 1;
        }
        ++it->trials;
        if (r.valid) ++it->passes;
    }
    return out;
}

bool all_pass(const std::vector<RunRecord>& rs, double min_pass) {
    for (const auto& s : summarize(rs))
        if (static_cast<double>(s.passes) < min_pass * s.trials - 1e-9) return false;
    return true;
}

FitAxis parse_axis(const std::string& s) {
    if (s == "n") return FitAxis::n;
    if (s == "k") return FitAxis::k;
    if (s == "spd") return FitAxis::spd;
    throw InvalidArgument("unknown fit axis '" + s + "' (n, k or spd)");
}

namespace {

// two-sided 97.5% quantile of Student's t
double t975(int dof) {
    static const double table[] = {12.706, 4.303, 3.182, 2.776, 2.571, 2.447, 2.365, 2.306, 2.262, 2.228,
                                   2.201,  2.179, 2.160, 2.145, 2.131, 2.120, 2.110, 2.101, 2.093, 2.086,
                                   2.080,  2.074, 2.069, 2.064, 2.060, 2.056, 2.052, 2.048, 2.045, 2.042};
    if (dof < 1) return INFINITY;
    if (dof <= 30) return table[dof - 1];
    return 1.96;
}

}  // namespace

FitResult fit_points(const std::vector<std::pair<double, double>>& points) {
    if (points.size() < 2) throw InvalidArgument("a fit needs at least two points");
    std::vector<double> lx, ly;
    for (auto [x, y] : points) {
        if (!(x > 0) || !(y > 0)) throw InvalidArgument("fit points must be positive");
        lx.push_back(std::log(x));
        ly.push_back(std::log(y));
    }
    const auto m = static_cast<double>(lx.size());
    double mx = 0, my = 0;
    for (std::size_t i = 0; i < lx.size(); ++i) {
        mx += lx[i];
        my += ly[i];
    }
    mx /= m;
    my /= m;
    double sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < lx.size(); ++i) {
        sxx += (lx[i] - mx) * (lx[i] - mx);
        sxy += (lx[i] - mx) * (ly[i] - my);
    }
    if (!(sxx > 0)) throw InvalidArgument("fit needs distinct x values");
    FitResult f;
    f.points = points;
    f.slope = sxy / sxx;
    f.intercept = my - f.slope * mx;
    double sse = 0;
    for (std::size_t i = 0; i < lx.size(); ++i) {
        const double e = ly[i] - (f.intercept + f.slope * lx[i]);
        sse += e * e;
    }
    const int dof = static_cast<int>(lx.size()) - 2;
    const double se = dof > 0 ? std::sqrt(sse / dof / sxx) : INFINITY;
    const double half = dof > 0 ? t975(dof) * se : INFINITY;
    f.ci_low = f.slope - half;
    f.ci_high = f.slope + half;
    return f;
}

FitResult scaling_fit(const std::vector<RunRecord>& rs, FitAxis axis, int min_seeds) {
    std::map<double, std::vector<double>> by_x;
    for (const auto& r : rs) {
        double x = 0;
        switch (axis) {
            case FitAxis::n: x = r.n; break;
            case FitAxis::k: x = static_cast<double>(r.k); break;
            case FitAxis::spd: x = r.spd; break;
        }
        if (!(x > 0)) throw InvalidArgument("record without a positive value on the fit axis");
        by_x[x].push_back(static_cast<double>(r.rounds_total));
    }
    if (by_x.size() < 3) throw InvalidArgument("a scaling fit needs at least 3 distinct x values");
    std::vector<std::pair<double, double>> pts;
    for (auto& [x, ys] : by_x) {
        if (static_cast<int>(ys.size()) < min_seeds)
            throw InvalidArgument("x=" + fmt_double(x) + " has " + std::to_string(ys.size()) + " runs, need " +
                                  std::to_string(min_seeds));
        std::sort(ys.begin(), ys.end());
        const std::size_t h = ys.size() / 2;
        const double med = ys.size() % 2 ? ys[h] : 0.5 * (ys[h - 1] + ys[h]);
        pts.emplace_back(x, med);
    }
    return fit_points(pts);
}

}  // namespace hybridnet
