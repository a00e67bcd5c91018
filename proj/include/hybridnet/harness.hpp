#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "hybridnet/graph.hpp"
#include "hybridnet/sim.hpp"

namespace hybridnet {

enum class Algo { td, apsp_exact, apsp_3, apsp_eps, sssp_exact, sssp_bcc, sssp_recursive, hk_ssp, spanner_only };

Algo parse_algo(const std::string& name);
std::string algo_name(Algo a);

inline constexpr std::int64_t kLambdaReference = 0;  // per-algorithm profile

struct ExperimentConfig {
    Algo algo = Algo::sssp_exact;
    Family family = Family::random_connected;
    std::vector<int> n_list;
    std::vector<std::uint64_t> seeds;
    std::int64_t lambda = kLambdaReference;  // kUnbounded for inf
    std::int64_t gamma = 0;              // 0: ceil(log2 n)
    double eps = 0.5;
    double alpha = 8.0;
    std::int64_t x = 0;                  // 0: algorithm default
    bool strict = false;
    bool unit = false;
    Weight max_weight = 0;               // 0: generator default
    std::vector<int> handles;            // broom handle lengths; empty: n/2
    std::vector<std::int64_t> k_list;    // tokens (td), sources (hk_ssp), marked (spanner_only); empty: default
    int h = 0;                           // hk_ssp / spanner_only hop bound, 0: default
    int spanner_k = 3;
    double eta = 2.0;
    double xi = 8.0;
    double min_pass = 0.95;              // per-configuration pass fraction the exit code requires
    int jobs = 1;
    bool timing = false;                 // add a wall_ms column (breaks byte stability)
    std::string out;

    void validate() const;
};

// key=value lines, '#' comments. Keys match the long CLI flags with '-'
// replaced by '_'. Lists are comma separated.
void apply_setting(ExperimentConfig& c, const std::string& key, const std::string& value);
ExperimentConfig read_config(std::istream& in, ExperimentConfig base = {});
ExperimentConfig load_config(const std::string& path, ExperimentConfig base = {});

std::vector<int> parse_int_list(const std::string& s);
std::vector<std::uint64_t> parse_seed_list(const std::string& s);  // also accepts a-b ranges
std::int64_t parse_lambda(const std::string& s);                    // integer or "inf"

// Reference local capacity for the algorithm on this instance.
std::int64_t reference_lambda(Algo a, int n, std::int64_t k, int spd, double eps);

struct RunRecord {
    Algo algo = Algo::sssp_exact;
    Family family = Family::random_connected;
    int n = 0;
    std::uint64_t seed = 0;
    std::int64_t k = 0;       // tokens / sources / marked nodes; 0 if not applicable
    int handle = 0;           // broom only
    int spd = -1;             // computed for the SSSP family of algorithms
    std::int64_t lambda = 0;  // effective, -1 for unbounded
    std::int64_t gamma = 0;
    std::int64_t rounds_total = 0;
    std::vector<std::pair<std::string, std::int64_t>> rounds_by_phase;
    std::int64_t max_local_per_edge = 0;
    std::int64_t max_global_per_node = 0;
    std::int64_t dropped = 0;
    bool exact_match = false;
    double max_ratio = 1.0;   // over pairs with positive true distance
    bool lower_bound_ok = true;
    bool valid = false;       // the algorithm-specific guarantee
    std::string note;         // short key=value diagnostics
    double wall_ms = 0;
};

enum class FaultKind { invalid_argument, capacity, protocol, other };

struct RunFault : Error {
    RunFault(const std::string& what, FaultKind kind, Algo algo, int n, std::uint64_t seed, std::int64_t round)
        : Error(what), kind(kind), algo(algo), n(n), seed(seed), round(round) {}
    FaultKind kind;
    Algo algo;
    int n;
    std::uint64_t seed;
    std::int64_t round;  // -1 when the failure is not tied to a round
};

// One (n, handle, k, seed) run.
RunRecord run_one(const ExperimentConfig& c, int n, std::uint64_t seed, std::int64_t k = 0, int handle = 0);

std::vector<RunRecord> run_experiment(const ExperimentConfig& c);

inline constexpr int kCsvSchema = 1;
void write_records_csv(std::ostream& out, const std::vector<RunRecord>& rs, bool timing = false);
std::vector<RunRecord> read_records_csv(std::istream& in);

struct PassSummary {
    std::string group;  // "n=..,k=..,handle=.."
    int passes = 0;
    int trials = 0;
};

std::vector<PassSummary> summarize(const std::vector<RunRecord>& rs);
bool all_pass(const std::vector<RunRecord>& rs, double min_pass);

enum class FitAxis { n, k, spd };
FitAxis parse_axis(const std::string& s);

struct FitResult {
    double slope = 0;
    double intercept = 0;
    double ci_low = 0;   // 95% for the slope
    double ci_high = 0;
    std::vector<std::pair<double, double>> points;  // (x, median rounds)
};

// Least squares of log(median rounds) on log(x).
FitResult scaling_fit(const std::vector<RunRecord>& rs, FitAxis axis, int min_seeds = 5);
FitResult fit_points(const std::vector<std::pair<double, double>>& points);

}  // namespace hybridnet
