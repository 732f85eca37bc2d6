/* C interface to the busekit library.
 *
 * All objects are opaque handles owned by the caller and released with the
 * matching *_free function. Every fallible call returns a bk_status; on
 * failure the message of the last error on the calling thread is available
 * from bk_last_error() until the next call on that thread.
 */
#ifndef BUSEKIT_H
#define BUSEKIT_H

#include <stddef.h>

#if defined(_WIN32)
#define BK_API __declspec(dllexport)
#else
#define BK_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum bk_status {
  BK_OK = 0,
  BK_INVALID_ARGUMENT = 1, /* null handle, unknown relation name, bad index */
  BK_CONFIG = 2,           /* config syntax, unknown key or object id */
  BK_IO = 3,
  BK_DOMAIN = 4,           /* point or set outside the chart */
  BK_PRECONDITION = 5,
  BK_NUMERICAL = 6,        /* convergence, horizon, schedule, coverage */
  BK_DATA = 7,             /* masked or missing field data */
  BK_INCONSISTENCY = 8,    /* a structural property failed beyond tolerance */
  BK_INTERNAL = 9
} bk_status;

typedef struct bk_config bk_config;
typedef struct bk_field bk_field;
typedef struct bk_report bk_report;

BK_API const char* bk_version(void);
BK_API const char* bk_status_name(bk_status status);
BK_API const char* bk_last_error(void);

/* ---- configs */

BK_API bk_status bk_config_load(const char* path, bk_config** out);
BK_API bk_status bk_config_parse(const char* text, bk_config** out);
BK_API void bk_config_free(bk_config* config);
/* Output path configured under [outputs] for `key` (field_csv, pgm, report,
 * report_csv, path_csv), joined with `dir`; "" when the key is not set. The
 * string lives as long as the config. */
BK_API const char* bk_config_output(const bk_config* config, const char* key);

/* ---- fields
 *
 * Each computation builds the chart of the config, computes the field and
 * stores a one-paragraph summary (range, masked fraction, convergence) with
 * it. Object ids refer to the [objects] section; a null id selects the first
 * object of the kind.
 */

BK_API bk_status bk_distance(const bk_config* config, const char* source_id, bk_field** out);
BK_API bk_status bk_busemann(const bk_config* config, const char* ray_id, bk_field** out);
BK_API bk_status bk_horo(const bk_config* config, const char* horo_id, bk_field** out);
BK_API bk_status bk_dl(const bk_config* config, const char* dl_id, bk_field** out);
BK_API bk_status bk_barrier(const bk_config* config, const char* line_id, bk_field** out);
/* Singular mask of the Busemann field of a ray: 1 on marked nodes, 0 on the
 * other valid nodes. */
BK_API bk_status bk_singular(const bk_config* config, const char* ray_id, bk_field** out);

BK_API void bk_field_free(bk_field* field);
BK_API const char* bk_field_summary(const bk_field* field);
BK_API int bk_field_nx(const bk_field* field);
BK_API int bk_field_ny(const bk_field* field);
/* Node (i, j) value; *valid is 0 on masked nodes. */
BK_API bk_status bk_field_value(const bk_field* field, int i, int j, double* value, int* valid);
BK_API bk_status bk_field_range(const bk_field* field, double* min, double* max, double* valid_fraction);
BK_API bk_status bk_field_write_csv(const bk_field* field, const char* path);
BK_API bk_status bk_field_read_csv(const char* path, int periodic_x, bk_field** out);
BK_API bk_status bk_field_write_pgm(const bk_field* field, const char* path);

/* Geodesic path CSV of a ray, or of the glued line for a line id. */
BK_API bk_status bk_path_write_csv(const bk_config* config, const char* object_id, const char* path);

/* ---- reports */

/* relation is "precedes" or "equivalent". */
BK_API bk_status bk_relate(const bk_config* config, const char* candidate_id, const char* reference_id,
                           const char* relation, bk_report** out);
BK_API bk_status bk_classify(const bk_config* config, bk_report** out);
BK_API bk_status bk_verify(const bk_config* config, bk_report** out);

BK_API void bk_report_free(bk_report* report);
/* 1 when no claim of the report failed or errored. */
BK_API int bk_report_pass(const bk_report* report);
/* Number of records with the given outcome (PASS, FAIL, ERROR, INFO, SKIP). */
BK_API size_t bk_report_count(const bk_report* report, const char* outcome);
BK_API const char* bk_report_text(const bk_report* report, int with_runtime);
BK_API const char* bk_report_csv(const bk_report* report, int with_runtime);

#ifdef __cplusplus
}
#endif

#endif /* BUSEKIT_H */
