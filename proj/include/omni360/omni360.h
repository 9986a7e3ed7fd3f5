/* C interface of the omni360 library: projection mapping, format conversion,
 * quality metrics, BD analysis and the evaluation pipeline. All functions
 * return a status code; on failure o360_last_error() describes the problem
 * (per thread, valid until the next failing call on that thread). */
#ifndef OMNI360_H
#define OMNI360_H

#include <stddef.h>

#if defined(OMNI360_BUILDING_LIBRARY)
#define O360_API __attribute__((visibility("default")))
#else
#define O360_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum o360_status {
  O360_OK = 0,
  O360_ERR_DOMAIN = 1,
  O360_ERR_CONTRACT = 2,
  O360_ERR_IO = 3,
  O360_ERR_DATA = 4,
  O360_ERR_DISJOINT_CURVES = 5,
  O360_ERR_INSUFFICIENT_DATA = 6,
  O360_ERR_CONFIG = 7,
  O360_ERR_CODEC = 8,
  O360_ERR_PIPELINE_STATE = 9,
  O360_ERR_INTERNAL = 100
} o360_status;

O360_API const char* o360_version(void);
O360_API const char* o360_last_error(void);
O360_API const char* o360_status_name(o360_status status);

/* ---- Projections --------------------------------------------------------- */

typedef struct o360_projection o360_projection;

/* spec: "erp", "acp", "gcp:0.3,0.7", ... width/height 0 select the default
 * coded resolution of the format. */
O360_API o360_status o360_projection_create(const char* spec, int width, int height,
                                            o360_projection** out);
O360_API void o360_projection_destroy(o360_projection* p);
O360_API o360_status o360_projection_size(const o360_projection* p, int* width, int* height);
/* Normalized picture position (u, v) in [0,1]^2 to a unit direction. */
O360_API o360_status o360_projection_forward(const o360_projection* p, double u, double v,
                                             double xyz[3]);
/* Unit direction to (u, v); face receives the face index (-1 for ERP/AEP). */
O360_API o360_status o360_projection_inverse(const o360_projection* p, const double xyz[3],
                                             double* u, double* v, int* face);

/* ---- Files --------------------------------------------------------------- */

typedef struct o360_geometry {
  int width;
  int height;
  int bit_depth; /* 8 or 10 */
  int chroma;    /* 420 or 444 */
} o360_geometry;

/* Resamples frames [first, first + count) of a headerless YUV file from
 * src_spec to dst_spec (dst_width/dst_height 0: format default). count < 0
 * converts every remaining frame. Output keeps bit depth and chroma format. */
O360_API o360_status o360_convert_file(const char* in_path, o360_geometry in_geometry,
                                       const char* src_spec, const char* dst_spec,
                                       int dst_width, int dst_height, const char* kernel,
                                       long long first, long long count, const char* out_path);

typedef struct o360_quality {
  double psnr_y, psnr_u, psnr_v;
  double wspsnr_y, wspsnr_u, wspsnr_v;
  double yuv_psnr, yuv_wspsnr;
  int lossless;
} o360_quality;

/* PSNR / WS-PSNR of test against ref over `frames` frames (< 0: all frames
 * of the shorter file). pooled_mse selects MSE pooling over dB averaging. */
O360_API o360_status o360_metrics_files(const char* ref_path, const char* test_path,
                                        o360_geometry geometry, long long frames,
                                        int pooled_mse, o360_quality* out,
                                        long long* frames_used);

/* ---- BD analysis --------------------------------------------------------- */

typedef enum o360_bd_fit { O360_FIT_CUBIC_POLY = 0, O360_FIT_PIECEWISE_CUBIC = 1 } o360_bd_fit;

typedef struct o360_bd_result {
  double bd_rate;    /* percent */
  double bd_quality; /* dB */
  double iou;
  int flagged; /* iou < 1/3 */
} o360_bd_result;

O360_API o360_status o360_bd_compute(const double* anchor_rate, const double* anchor_quality,
                                     size_t anchor_count, const double* test_rate,
                                     const double* test_quality, size_t test_count,
                                     o360_bd_fit fit, o360_bd_result* out);

/* Labelled curves from a "label,rate_bpp,quality_db" CSV file. */
typedef struct o360_curve_set o360_curve_set;

O360_API o360_status o360_curves_load_csv(const char* path, o360_curve_set** out);
O360_API void o360_curves_destroy(o360_curve_set* set);
O360_API size_t o360_curves_count(const o360_curve_set* set);
O360_API const char* o360_curves_label(const o360_curve_set* set, size_t index);
O360_API o360_status o360_curves_bd(const o360_curve_set* set, size_t anchor, size_t test,
                                    o360_bd_fit fit, o360_bd_result* out);

/* ---- Pipeline ------------------------------------------------------------ */

typedef struct o360_report o360_report;
typedef void (*o360_log_fn)(const char* line, void* user);

/* Runs the sweep described by a JSON config file. output_dir may be NULL and
 * parallelism 0 to keep the config's values. The report is written into the
 * output directory and also returned (caller destroys it). */
O360_API o360_status o360_run_config(const char* config_path, const char* output_dir,
                                     int parallelism, o360_log_fn log, void* user,
                                     o360_report** out);
/* Rebuilds the report of a finished run directory. */
O360_API o360_status o360_report_load(const char* run_dir, o360_report** out);

enum { O360_REPORT_CSV = 1, O360_REPORT_JSON = 2, O360_REPORT_MARKDOWN = 4 };
O360_API o360_status o360_report_emit(const o360_report* report, const char* dir, int formats);
O360_API size_t o360_report_cell_count(const o360_report* report);
O360_API size_t o360_report_failed_count(const o360_report* report);
/* Markdown rendering owned by the handle. */
O360_API const char* o360_report_markdown(const o360_report* report);
O360_API void o360_report_destroy(o360_report* report);

#ifdef __cplusplus
}
#endif

#endif /* OMNI360_H */
