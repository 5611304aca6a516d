#include <math.h>
#include <stdio.h>
#include <stdlib.h>
#include <string.h>

#include "vvl/vvl.h"

static int failures = 0;

#define EXPECT(cond)                                               \
  do {                                                             \
    if (!(cond)) {                                                 \
      fprintf(stderr, "%s:%d: failed: %s\n", __FILE__, __LINE__, #cond); \
      ++failures;                                                  \
    }                                                              \
  } while (0)

int main(int argc, char** argv) {
  if (argc < 3) {
    fprintf(stderr, "usage: capi_test <config.json> <scratch dir>\n");
    return 2;
  }
  EXPECT(strlen(vvl_version()) > 0);

  double p = 0.0;
  EXPECT(vvl_pressure(1.0, 1.4, 2.0, &p) == VVL_OK);
  EXPECT(fabs(p - pow(2.0, 1.4)) < 1e-15);
  EXPECT(vvl_pressure(1.0, 1.4, -1.0, &p) == VVL_ERR_INVALID_ARGUMENT);
  EXPECT(strlen(vvl_last_error()) > 0);

  double e = -1.0;
  EXPECT(vvl_relative_energy(1.0, 1.4, 1.0, 0.5, 0.0, 1.0, 0.5, 0.0, &e) == VVL_OK);
  EXPECT(e == 0.0);
  EXPECT(vvl_relative_energy(1.0, 2.0, 1.0, 0.0, 0.0, 1.0, 1.0, 0.0, &e) == VVL_OK);
  EXPECT(fabs(e - 0.5) < 1e-15);

  vvl_config* bad = NULL;
  EXPECT(vvl_config_parse("{\"bogus\": 1}", &bad) == VVL_ERR_CONFIG);
  EXPECT(bad == NULL);
  EXPECT(vvl_config_load("/nonexistent/config.json", &bad) != VVL_OK);

  int first = 0, last = 0;
  EXPECT(vvl_parse_member_range("2..3", &first, &last) == VVL_OK && first == 2 && last == 3);
  EXPECT(vvl_parse_member_range("3..2", &first, &last) == VVL_ERR_CONFIG);

  vvl_config* cfg = NULL;
  EXPECT(vvl_config_load(argv[1], &cfg) == VVL_OK);
  if (!cfg) return 1;
  char hash[17];
  EXPECT(vvl_config_hash(cfg, hash, sizeof hash) == VVL_OK);
  EXPECT(strlen(hash) == 16);
  char tiny[4];
  EXPECT(vvl_config_hash(cfg, tiny, sizeof tiny) == VVL_ERR_INVALID_ARGUMENT);
  int members = 0;
  EXPECT(vvl_config_members(cfg, &members) == VVL_OK && members == 4);
  EXPECT(strstr(vvl_config_json(cfg), "\"gamma\"") != NULL);
  EXPECT(strcmp(vvl_config_output_dir(cfg), "small_run") == 0);

  char run_dir[1024];
  snprintf(run_dir, sizeof run_dir, "%s/run", argv[2]);
  vvl_run_options ro = {run_dir, 1, 2, 2};
  vvl_run_summary sum;
  EXPECT(vvl_run(cfg, &ro, &sum) == VVL_OK);
  EXPECT(sum.recomputed + sum.skipped == 2 && sum.blown_up == 0);

  vvl_report_options rep_opt = {run_dir, NULL, 0, 0, 0, 1};
  vvl_report* rep = NULL;
  EXPECT(vvl_report_run(&rep_opt, &rep) == VVL_OK);
  if (rep) {
    size_t n = vvl_report_row_count(rep);
    EXPECT(n > 0);
    vvl_report_row row;
    EXPECT(vvl_report_get_row(rep, 0, &row) == VVL_OK);
    EXPECT(row.n >= 1 && strlen(row.diagnostic) > 0);
    EXPECT(vvl_report_get_row(rep, n, &row) == VVL_ERR_INVALID_ARGUMENT);
    EXPECT(strlen(vvl_report_summary(rep)) > 0);
    vvl_report_free(rep);
  }

  size_t rows = 0;
  double diff = -1.0;
  char eq_dir[1024];
  snprintf(eq_dir, sizeof eq_dir, "%s/equiv", argv[2]);
  EXPECT(vvl_equiv(run_dir, run_dir, eq_dir, &rows, &diff) == VVL_OK);
  EXPECT(rows > 0 && diff == 0.0);

  char snap[1100];
  snprintf(snap, sizeof snap, "%s/member_0001/snap_0000.vvl", run_dir);
  vvl_snapshot* s = NULL;
  EXPECT(vvl_snapshot_read(snap, &s) == VVL_OK);
  if (s) {
    int nx = 0, ny = 0;
    double t = -1.0, eps = 0.0;
    EXPECT(vvl_snapshot_info(s, &nx, &ny, &t, &eps) == VVL_OK);
    EXPECT(nx == 24 && ny == 16 && t == 0.0 && eps > 0.0);
    const double* rho = NULL;
    EXPECT(vvl_snapshot_plane(s, 0, &rho) == VVL_OK && rho != NULL);
    EXPECT(vvl_snapshot_plane(s, 7, &rho) == VVL_ERR_INVALID_ARGUMENT);
    vvl_snapshot_free(s);
  }
  EXPECT(vvl_snapshot_read("/nonexistent.vvl", &s) == VVL_ERR_IO);

  vvl_validation* v = NULL;
  EXPECT(vvl_validate(0, &v) == VVL_OK);
  if (v) {
    size_t n = vvl_validation_count(v);
    EXPECT(n > 0);
    for (size_t i = 0; i < n; ++i) {
      vvl_check c;
      EXPECT(vvl_validation_get(v, i, &c) == VVL_OK);
      EXPECT(c.pass);
    }
    vvl_validation_free(v);
  }

  vvl_config_free(cfg);
  vvl_config_free(NULL);
  if (failures) fprintf(stderr, "%d failure(s)\n", failures);
  else printf("capi: all checks passed\n");
  return failures ? 1 : 0;
}
