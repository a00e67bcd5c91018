/* C interface to the hybridnet simulator. Every call returns an hn_status;
 * on failure hn_last_error() describes it (per thread, valid until the next
 * failing call on that thread). Handles are opaque and owned by the caller. */
#ifndef HYBRIDNET_H
#define HYBRIDNET_H

#include <stddef.h>
#include <stdint.h>

#if defined(__GNUC__)
#define HN_API __attribute__((visibility("default")))
#else
#define HN_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum {
    HN_OK = 0,
    HN_INVALID_ARGUMENT = 1,
    HN_CAPACITY_FAULT = 2,
    HN_PROTOCOL_FAULT = 3,
    HN_IO_ERROR = 4,
    HN_INTERNAL = 5
} hn_status;

#define HN_LAMBDA_INF (-1)
#define HN_LAMBDA_REFERENCE 0
#define HN_INF_DISTANCE (INT64_MAX / 4)

typedef struct hn_graph hn_graph;
typedef struct hn_config hn_config;
typedef struct hn_records hn_records;

HN_API const char* hn_version(void);
HN_API const char* hn_last_error(void);
/* Round of the last capacity fault, -1 if the last failure had none. */
HN_API int64_t hn_last_fault_round(void);
HN_API const char* hn_status_name(hn_status s);

/* graphs; nodes are 1..n */
HN_API hn_status hn_graph_generate(const char* family, int n, uint64_t seed, int unit, int64_t max_weight, int handle,
                            hn_graph** out);
HN_API hn_status hn_graph_load(const char* path, hn_graph** out);
HN_API hn_status hn_graph_save(const hn_graph* g, const char* path);
HN_API int hn_graph_n(const hn_graph* g);
HN_API int64_t hn_graph_m(const hn_graph* g);
HN_API int hn_graph_spd(const hn_graph* g);
HN_API void hn_graph_free(hn_graph* g);

/* experiment configuration, keys as in the key=value config file */
HN_API hn_status hn_config_new(hn_config** out);
HN_API hn_status hn_config_set(hn_config* c, const char* key, const char* value);
HN_API hn_status hn_config_load(hn_config* c, const char* path);
HN_API hn_status hn_config_validate(const hn_config* c);
HN_API double hn_config_min_pass(const hn_config* c);
HN_API void hn_config_free(hn_config* c);

/* experiments */
HN_API hn_status hn_run(const hn_config* c, hn_records** out);
/* path "-" writes to stdout */
HN_API hn_status hn_records_write_csv(const hn_records* r, const char* path, int timing);
HN_API hn_status hn_records_read_csv(const char* path, hn_records** out);
HN_API size_t hn_records_count(const hn_records* r);
HN_API int hn_records_all_pass(const hn_records* r, double min_pass);
HN_API int64_t hn_records_total_dropped(const hn_records* r);
HN_API size_t hn_records_group_count(const hn_records* r);
/* name stays valid while r lives */
HN_API hn_status hn_records_group(const hn_records* r, size_t i, const char** name, int* passes, int* trials);
HN_API void hn_records_free(hn_records* r);

typedef struct {
    double slope;
    double intercept;
    double ci_low;
    double ci_high;
    int points;
} hn_fit_result;

/* axis: "n", "k" or "spd" */
HN_API hn_status hn_fit(const hn_records* r, const char* axis, int min_seeds, hn_fit_result* out);

/* single runs on a given graph */
typedef struct {
    int64_t lambda; /* HN_LAMBDA_INF or positive */
    int64_t gamma;  /* 0: ceil(log2 n) */
    uint64_t seed;
    int strict;
    double eps;
    double alpha;
    int64_t x; /* 0: default */
} hn_options;

typedef struct {
    int64_t rounds;
    int64_t dropped;
    int64_t max_local_per_edge;
    int64_t max_global_per_node;
} hn_stats;

HN_API void hn_options_default(hn_options* o);

/* algo: sssp_exact, sssp_bcc or sssp_recursive; dist has n+1 slots, dist[0] unused */
HN_API hn_status hn_sssp(const hn_graph* g, const char* algo, int source, const hn_options* o, int64_t* dist,
                  hn_stats* stats);
/* algo: apsp_exact, apsp_3 or apsp_eps; dist is row-major n*n, node u row u-1 */
HN_API hn_status hn_apsp(const hn_graph* g, const char* algo, const hn_options* o, int64_t* dist, hn_stats* stats);

/* Skeleton spanner over `marked` (ascending) written as a graph file plus a
 * witness sidecar with lines "u v w : v0 v1 ... vp". */
HN_API hn_status hn_spanner_export(const hn_graph* g, const int* marked, size_t count, int h, int k, double eta, uint64_t seed,
                            const char* graph_path, const char* witness_path, size_t* edges);

#ifdef __cplusplus
}
#endif

#endif
