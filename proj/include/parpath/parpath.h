#ifndef PARPATH_PARPATH_H
#define PARPATH_PARPATH_H

/* C interface to the partial-rough-path library. Every handle is opaque and
 * owned by the caller once returned; free it with the matching *_free. Strings
 * returned as const char* stay valid until the owning handle is freed (or, for
 * pp_last_error, until the next failing call on the same thread). */

#include <stddef.h>
#include <stdint.h>

#if defined(PARPATH_BUILDING_LIBRARY)
#define PP_API __attribute__((visibility("default")))
#else
#define PP_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

/* Values 2..4 double as CLI exit codes. */
typedef enum pp_status {
  PP_OK = 0,
  PP_ERR_CONFIG = 2,
  PP_ERR_NUMERICAL = 3,
  PP_ERR_INSUFFICIENT_DATA = 4,
  PP_ERR_IO = 5,
  PP_ERR_ARGUMENT = 6,
  PP_ERR_INTERNAL = 7
} pp_status;

typedef struct pp_config pp_config;
typedef struct pp_prp pp_prp;
typedef struct pp_integral pp_integral;
typedef struct pp_table pp_table;

PP_API const char* pp_last_error(void);
PP_API const char* pp_version(void);
PP_API const char* pp_git_describe(void);

/* 0 restores the default (PARPATH_THREADS, else hardware concurrency). */
PP_API pp_status pp_set_threads(unsigned threads);
PP_API unsigned pp_get_threads(void);

/* ---- run configuration ---- */
PP_API pp_status pp_config_new(pp_config** out);
PP_API pp_status pp_config_parse(const char* text, pp_config** out);
PP_API pp_status pp_config_load(const char* path, pp_config** out);
PP_API pp_status pp_config_set(pp_config* cfg, const char* key, const char* value);
/* NULL when the key is not set explicitly. */
PP_API const char* pp_config_get(pp_config* cfg, const char* key);
/* Typed reads that record the value used into the resolved set. The string
 * result stays valid until the next call on cfg. */
PP_API pp_status pp_config_read_u64(pp_config* cfg, const char* key, uint64_t fallback, uint64_t* out);
PP_API pp_status pp_config_read_string(pp_config* cfg, const char* key, const char* fallback, const char** out);
/* Sorted "key = value" lines of the explicit entries. */
PP_API const char* pp_config_text(pp_config* cfg);
/* Every key read by a pipeline so far, with the value used (defaults included). */
PP_API size_t pp_config_resolved_count(const pp_config* cfg);
PP_API const char* pp_config_resolved_key(pp_config* cfg, size_t index);
PP_API const char* pp_config_resolved_value(pp_config* cfg, size_t index);
/* FNV-1a 64 of the explicit entries' text. */
PP_API uint64_t pp_config_hash(const pp_config* cfg);
PP_API void pp_config_free(pp_config* cfg);

/* ---- partial rough paths ---- */
typedef struct pp_prp_info {
  size_t N;        /* grid cells */
  size_t e;        /* dimension of x̂ */
  size_t d;        /* dimension of X */
  size_t level1;   /* |I| */
  size_t level2;   /* |J| */
  double alpha;
  double beta;
  double T;
} pp_prp_info;

/* Lift of Monte Carlo path `path_index` for the model keys of cfg. */
PP_API pp_status pp_lift_new(pp_config* cfg, uint64_t path_index, pp_prp** out);
PP_API pp_status pp_prp_load(const char* path, pp_prp** out);
PP_API pp_status pp_prp_save(const pp_prp* prp, const char* path);
/* Columns node, t, xhat_1..xhat_e, X. */
PP_API pp_status pp_prp_write_csv(const pp_prp* prp, const char* path);
PP_API pp_status pp_prp_get_info(const pp_prp* prp, pp_prp_info* info);
/* x̂ at node q; out holds e values. */
PP_API pp_status pp_prp_xhat(const pp_prp* prp, size_t q, double* out);
/* Multi-indices hold e entries. out holds d (level 1) or d*d (level 2, row-major) values. */
PP_API pp_status pp_prp_level1(const pp_prp* prp, const int* i, size_t s, size_t t, double* out);
PP_API pp_status pp_prp_level2(const pp_prp* prp, const int* j, const int* k, size_t s, size_t t, double* out);
PP_API void pp_prp_free(pp_prp* prp);

/* ---- rough integral of f(x̂) against X ---- */
/* f from model.f.*, tolerance from integrate.tol. */
PP_API pp_status pp_integrate(const pp_prp* prp, pp_config* cfg, pp_integral** out);
PP_API pp_status pp_integral_save(const pp_integral* integral, const char* path);
PP_API pp_status pp_integral_load(const char* path, pp_integral** out);
/* Columns node, t, Y1_a..., Y2_ab... of the anchored values. */
PP_API pp_status pp_integral_write_csv(const pp_integral* integral, const char* path);
PP_API size_t pp_integral_dim(const pp_integral* integral);
PP_API size_t pp_integral_cells(const pp_integral* integral);
PP_API pp_status pp_integral_level1(const pp_integral* integral, size_t s, size_t t, double* out);
PP_API pp_status pp_integral_level2(const pp_integral* integral, size_t s, size_t t, double* out);
/* Refinement trace; empty for loaded integrals. */
PP_API pp_status pp_integral_trace(const pp_integral* integral, pp_table** out);
PP_API void pp_integral_free(pp_integral* integral);

/* ---- result tables ---- */
/* scheme: "auto", "exhaustive" or "dyadic". */
PP_API pp_status pp_holder_table(const pp_prp* prp, const char* scheme, pp_table** out);
PP_API pp_status pp_verify_table(const pp_prp* prp, pp_config* cfg, pp_table** out);
PP_API pp_status pp_rde_table(pp_config* cfg, pp_table** out);
/* minimizers may be NULL; otherwise receives (z, u, g) rows of each minimizer. */
PP_API pp_status pp_rate_table(pp_config* cfg, pp_table** out, pp_table** minimizers);
PP_API pp_status pp_smile_table(pp_config* cfg, pp_table** out);
PP_API pp_status pp_mc_table(pp_config* cfg, pp_table** out);

PP_API size_t pp_table_rows(const pp_table* table);
PP_API size_t pp_table_columns(const pp_table* table);
PP_API const char* pp_table_column_name(const pp_table* table, size_t column);
/* Rendered text; numbers in shortest round-trip form, NaN as "". */
PP_API const char* pp_table_cell_text(const pp_table* table, size_t row, size_t column);
/* 1 when the cell is numeric. */
PP_API int pp_table_cell_is_number(const pp_table* table, size_t row, size_t column);
/* NaN for text cells and out-of-range positions. */
PP_API double pp_table_cell_number(const pp_table* table, size_t row, size_t column);
PP_API size_t pp_table_meta_count(const pp_table* table);
PP_API const char* pp_table_meta_key(const pp_table* table, size_t index);
PP_API const char* pp_table_meta_text(const pp_table* table, size_t index);
PP_API int pp_table_meta_is_number(const pp_table* table, size_t index);
PP_API double pp_table_meta_number(const pp_table* table, size_t index);
PP_API pp_status pp_table_write_csv(const pp_table* table, const char* path);
PP_API void pp_table_free(pp_table* table);

#ifdef __cplusplus
}
#endif

#endif
