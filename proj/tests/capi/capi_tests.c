/* Exercises the C interface from C through the shared library. */
#include <math.h>
#include <stdio.h>
#include <stdlib.h>
#include <string.h>
#include <sys/stat.h>

#include "omni360/omni360.h"

static int g_failures = 0;
static int g_checks = 0;

#define CHECK(cond)                                                  \
  do {                                                               \
    ++g_checks;                                                      \
    if (!(cond)) {                                                   \
      ++g_failures;                                                  \
      fprintf(stderr, "%s:%d: CHECK(%s) failed\n", __FILE__, __LINE__, #cond); \
    }                                                                \
  } while (0)

static const char* tmp_path(const char* name) {
  static char buf[4][1024];
  static int slot = 0;
  slot = (slot + 1) % 4;
  snprintf(buf[slot], sizeof buf[slot], "%s/%s", OMNI360_TEST_TMP, name);
  return buf[slot];
}

static void test_status(void) {
  CHECK(strcmp(o360_version(), "1.0.0") == 0);
  CHECK(strcmp(o360_status_name(O360_OK), "ok") == 0);
  CHECK(strcmp(o360_status_name((o360_status)42), "internal") == 0);
  CHECK(strlen(o360_status_name(O360_ERR_CODEC)) > 0);
}

static void test_projection(void) {
  o360_projection* p = NULL;
  int w = 0, h = 0, face = 7, i;
  double xyz[3], u, v;
  CHECK(o360_projection_create("erp", 0, 0, &p) == O360_OK);
  CHECK(o360_projection_size(p, &w, &h) == O360_OK);
  CHECK(w == 2 * h);
  /* centre of ERP looks along +x */
  CHECK(o360_projection_forward(p, 0.5, 0.5, xyz) == O360_OK);
  CHECK(fabs(xyz[0] - 1.0) < 1e-12 && fabs(xyz[1]) < 1e-12 && fabs(xyz[2]) < 1e-12);
  CHECK(o360_projection_inverse(p, xyz, &u, &v, &face) == O360_OK);
  CHECK(fabs(u - 0.5) < 1e-12 && fabs(v - 0.5) < 1e-12 && face == -1);
  o360_projection_destroy(p);

  CHECK(o360_projection_create("eac", 96, 64, &p) == O360_OK);
  CHECK(o360_projection_size(p, &w, &h) == O360_OK && w == 96 && h == 64);
  for (i = 0; i < 100; ++i) {
    const double d[3] = {cos(i * 0.7) * cos(i * 0.3), sin(i * 0.7) * cos(i * 0.3), sin(i * 0.3)};
    double back[3];
    CHECK(o360_projection_inverse(p, d, &u, &v, &face) == O360_OK);
    CHECK(face >= 0 && face < 6);
    CHECK(o360_projection_forward(p, u, v, back) == O360_OK);
    CHECK(fabs(back[0] - d[0]) + fabs(back[1] - d[1]) + fabs(back[2] - d[2]) < 1e-9);
  }
  o360_projection_destroy(p);

  p = NULL;
  CHECK(o360_projection_create("mercator", 0, 0, &p) == O360_ERR_CONFIG || p == NULL);
  CHECK(p == NULL);
  CHECK(strlen(o360_last_error()) > 0);
  CHECK(o360_projection_create(NULL, 0, 0, &p) == O360_ERR_CONTRACT);
  CHECK(o360_projection_create("erp", 0, 0, NULL) == O360_ERR_CONTRACT);
  CHECK(o360_projection_size(NULL, &w, &h) == O360_ERR_CONTRACT);
  o360_projection_destroy(NULL);
}

static void test_files(void) {
  const o360_geometry g = {64, 32, 8, 420};
  const size_t frame_bytes = 64 * 32 * 3 / 2;
  unsigned char* buf = malloc(frame_bytes * 2);
  FILE* f;
  size_t i;
  o360_quality q;
  long long used = 0;
  for (i = 0; i < frame_bytes * 2; ++i) buf[i] = (unsigned char)(64 + (i * 7) % 128);
  f = fopen(tmp_path("src.yuv"), "wb");
  fwrite(buf, 1, frame_bytes * 2, f);
  fclose(f);

  CHECK(o360_metrics_files(tmp_path("src.yuv"), tmp_path("src.yuv"), g, -1, 0, &q, &used) == O360_OK);
  CHECK(used == 2);
  CHECK(q.lossless == 1);
  CHECK(q.yuv_wspsnr == 999.99);

  buf[5] ^= 8;
  f = fopen(tmp_path("test.yuv"), "wb");
  fwrite(buf, 1, frame_bytes * 2, f);
  fclose(f);
  CHECK(o360_metrics_files(tmp_path("src.yuv"), tmp_path("test.yuv"), g, 1, 0, &q, &used) == O360_OK);
  /* one luma sample off by 8: MSE 64 / 2048 */
  CHECK(fabs(q.psnr_y - 10 * log10(255.0 * 255.0 * 2048 / 64)) < 1e-9);
  CHECK(q.lossless == 0);
  CHECK(o360_metrics_files(tmp_path("src.yuv"), tmp_path("test.yuv"), g, 3, 0, &q, &used) == O360_ERR_CONTRACT);
  CHECK(o360_metrics_files(tmp_path("none.yuv"), tmp_path("test.yuv"), g, 1, 0, &q, &used) == O360_ERR_IO);

  CHECK(o360_convert_file(tmp_path("src.yuv"), g, "erp", "cmp", 48, 32, "bilinear", 0, -1,
                          tmp_path("cmp.yuv")) == O360_OK);
  {
    struct stat st;
    CHECK(stat(tmp_path("cmp.yuv"), &st) == 0 && st.st_size == 48 * 32 * 3 / 2 * 2);
  }
  CHECK(o360_convert_file(tmp_path("src.yuv"), g, "erp", "cmp", 47, 32, "bilinear", 0, -1,
                          tmp_path("odd.yuv")) != O360_OK);
  CHECK(o360_convert_file(tmp_path("src.yuv"), g, "erp", "cmp", 48, 32, "sinc9", 0, -1,
                          tmp_path("k.yuv")) != O360_OK);
  free(buf);
}

static void test_bd(void) {
  const double ar[] = {0.1, 0.2, 0.4, 0.8}, aq[] = {30, 32, 34, 36};
  const double tr[] = {0.2, 0.4, 0.8, 1.6};
  o360_bd_result r;
  o360_curve_set* set = NULL;
  FILE* f;
  CHECK(o360_bd_compute(ar, aq, 4, tr, aq, 4, O360_FIT_PIECEWISE_CUBIC, &r) == O360_OK);
  CHECK(fabs(r.bd_rate - 100.0) < 1e-9);
  CHECK(r.iou == 1.0 && r.flagged == 0);
  CHECK(o360_bd_compute(ar, aq, 2, tr, aq, 2, O360_FIT_CUBIC_POLY, &r) == O360_ERR_INSUFFICIENT_DATA);
  CHECK(o360_bd_compute(ar, aq, 4, tr, aq, 4, (o360_bd_fit)9, &r) == O360_ERR_CONTRACT);

  f = fopen(tmp_path("curves.csv"), "w");
  fputs("label,rate_bpp,quality_db\na,0.1,30\na,0.2,31\na,0.3,32\nb,0.1,40\nb,0.2,41\nb,0.3,42\n", f);
  fclose(f);
  CHECK(o360_curves_load_csv(tmp_path("curves.csv"), &set) == O360_OK);
  CHECK(o360_curves_count(set) == 2);
  CHECK(strcmp(o360_curves_label(set, 1), "b") == 0);
  CHECK(o360_curves_label(set, 2) == NULL);
  CHECK(o360_curves_bd(set, 0, 1, O360_FIT_PIECEWISE_CUBIC, &r) == O360_ERR_DISJOINT_CURVES);
  CHECK(o360_curves_bd(set, 0, 0, O360_FIT_PIECEWISE_CUBIC, &r) == O360_OK && r.bd_rate == 0.0);
  CHECK(o360_curves_bd(set, 0, 5, O360_FIT_PIECEWISE_CUBIC, &r) == O360_ERR_CONTRACT);
  o360_curves_destroy(set);
  CHECK(o360_curves_load_csv(tmp_path("absent.csv"), &set) == O360_ERR_IO);
}

static int g_log_lines = 0;
static void on_log(const char* line, void* user) {
  (void)line;
  ++*(int*)user;
}

static void test_pipeline(void) {
  o360_report* rep = NULL;
  FILE* f = fopen(tmp_path("run.json"), "w");
  fputs("{\"schema_version\": 1, \"output_dir\": \"run\",\n"
        " \"sequences\": [{\"path\": \"src.yuv\", \"width\": 64, \"height\": 32, \"frames\": 2}],\n"
        " \"formats\": [{\"name\": \"erp\", \"width\": 64, \"height\": 32},\n"
        "             {\"name\": \"cmp\", \"width\": 48, \"height\": 32}]}\n", f);
  fclose(f);
  CHECK(o360_run_config(tmp_path("run.json"), NULL, 2, on_log, &g_log_lines, &rep) == O360_OK);
  CHECK(g_log_lines > 0);
  CHECK(o360_report_cell_count(rep) == 8);
  CHECK(o360_report_failed_count(rep) == 0);
  CHECK(strstr(o360_report_markdown(rep), "| cmp |") != NULL);
  CHECK(o360_report_emit(rep, tmp_path("emitted"), O360_REPORT_CSV) == O360_OK);
  o360_report_destroy(rep);
  {
    struct stat st;
    CHECK(stat(tmp_path("emitted/cells.csv"), &st) == 0);
    CHECK(stat(tmp_path("emitted/report.md"), &st) != 0);
  }

  rep = NULL;
  CHECK(o360_report_load(tmp_path("run"), &rep) == O360_OK);
  CHECK(o360_report_cell_count(rep) == 8);
  o360_report_destroy(rep);
  CHECK(o360_report_load(tmp_path("not_a_run"), &rep) == O360_ERR_PIPELINE_STATE);
  CHECK(o360_run_config(tmp_path("absent.json"), NULL, 0, NULL, NULL, &rep) == O360_ERR_CONFIG);
  CHECK(o360_report_cell_count(NULL) == 0);
  CHECK(strcmp(o360_report_markdown(NULL), "") == 0);
}

int main(void) {
  char cmd[1200];
  snprintf(cmd, sizeof cmd, "rm -rf '%s' && mkdir -p '%s'", OMNI360_TEST_TMP, OMNI360_TEST_TMP);
  if (system(cmd) != 0) return 1;
  test_status();
  test_projection();
  test_files();
  test_bd();
  test_pipeline();
  printf("capi_tests: %d checks, %d failures\n", g_checks, g_failures);
  return g_failures == 0 ? 0 : 1;
}
