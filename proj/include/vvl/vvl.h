#ifndef VVL_VVL_H
#define VVL_VVL_H

#include <stddef.h>

#ifdef __cplusplus
extern "C" {
#endif

#if defined(VVL_BUILDING_LIBRARY)
#define VVL_API __attribute__((visibility("default")))
#else
#define VVL_API
#endif

/* Status values double as CLI exit codes for the first four. */
typedef enum vvl_status {
  VVL_OK = 0,
  VVL_ERR_CONFIG = 2,
  VVL_ERR_BLOWUP = 3,
  VVL_ERR_IO = 4,
  VVL_ERR_INVALID_ARGUMENT = 5,
  VVL_ERR_GEOMETRY = 6,
  VVL_ERR_CFL = 7,
  VVL_ERR_NON_FINITE = 8,
  VVL_ERR_NEGATIVE_DENSITY = 9,
  VVL_ERR_SUPPORT = 10,
  VVL_ERR_MISMATCH = 11,
  VVL_ERR_INTERNAL = 99
} vvl_status;

typedef struct vvl_config vvl_config;
typedef struct vvl_report vvl_report;
typedef struct vvl_validation vvl_validation;
typedef struct vvl_snapshot vvl_snapshot;

VVL_API const char* vvl_version(void);
/* Message of the last failed call on this thread; empty after success. */
VVL_API const char* vvl_last_error(void);

VVL_API vvl_status vvl_config_load(const char* path, vvl_config** out);
VVL_API vvl_status vvl_config_parse(const char* json_text, vvl_config** out);
VVL_API void vvl_config_free(vvl_config* cfg);
/* Writes 16 hex digits plus NUL; len must be at least 17. */
VVL_API vvl_status vvl_config_hash(const vvl_config* cfg, char* buf, size_t len);
VVL_API vvl_status vvl_config_members(const vvl_config* cfg, int* out);
/* Normalized JSON; the pointer stays valid until the handle is freed. */
VVL_API const char* vvl_config_json(const vvl_config* cfg);
VVL_API const char* vvl_config_output_dir(const vvl_config* cfg);

/* Parses "A..B" or "A" (1-based, inclusive). */
VVL_API vvl_status vvl_parse_member_range(const char* text, int* first, int* last);

/* Member bounds are 1-based and inclusive; 0 selects all. */
typedef struct vvl_run_options {
  const char* out_dir; /* NULL: the config's output directory */
  int first_member;
  int last_member;
  int threads;
} vvl_run_options;

typedef struct vvl_run_summary {
  int recomputed;
  int skipped;
  int blown_up;
} vvl_run_summary;

/* Returns VVL_ERR_BLOWUP when any member blew up; the run is still persisted. */
VVL_API vvl_status vvl_run(const vvl_config* cfg, const vvl_run_options* options, vvl_run_summary* summary);

typedef struct vvl_report_options {
  const char* run_dir;
  const char* out_dir; /* NULL: <run_dir>/report */
  int first_member;
  int last_member;
  int strict;
  int threads;
} vvl_report_options;

typedef struct vvl_report_row {
  size_t n;
  const char* diagnostic;
  const char* observable;
  const char* window;
  double value;
} vvl_report_row;

VVL_API vvl_status vvl_report_run(const vvl_report_options* options, vvl_report** out);
VVL_API size_t vvl_report_row_count(const vvl_report* report);
/* String members stay valid until the handle is freed. */
VVL_API vvl_status vvl_report_get_row(const vvl_report* report, size_t i, vvl_report_row* row);
VVL_API const char* vvl_report_summary(const vvl_report* report);
VVL_API void vvl_report_free(vvl_report* report);

VVL_API vvl_status vvl_equiv(const char* run_a, const char* run_b, const char* out_dir, size_t* rows,
                             double* max_abs_diff);

typedef struct vvl_check {
  const char* name;
  double value;
  double tolerance;
  int pass;
} vvl_check;

VVL_API vvl_status vvl_validate(int strict, vvl_validation** out);
VVL_API size_t vvl_validation_count(const vvl_validation* v);
VVL_API vvl_status vvl_validation_get(const vvl_validation* v, size_t i, vvl_check* check);
VVL_API void vvl_validation_free(vvl_validation* v);

VVL_API vvl_status vvl_pressure(double a, double gamma, double rho, double* out);
VVL_API vvl_status vvl_relative_energy(double a, double gamma, double rho_inf, double ux_inf, double uy_inf,
                                       double rho, double mx, double my, double* out);

/* Reads a three-plane snapshot file (rho, m_x, m_y). */
VVL_API vvl_status vvl_snapshot_read(const char* path, vvl_snapshot** out);
VVL_API vvl_status vvl_snapshot_info(const vvl_snapshot* s, int* nx, int* ny, double* time, double* epsilon);
/* plane 0..2; data has nx*ny row-major values valid until the handle is freed. */
VVL_API vvl_status vvl_snapshot_plane(const vvl_snapshot* s, int plane, const double** data);
VVL_API void vvl_snapshot_free(vvl_snapshot* s);

#ifdef __cplusplus
}
#endif

#endif
