/*
 * C interface to the ppii library: probabilistic Poisson-blended synthetic
 * anomalies and anomaly-localisation metrics.
 *
 * Objects are opaque handles owned by the caller and released with the
 * matching *_free function. Every fallible call returns a ppii_status; on
 * failure ppii_last_error() describes the problem for the calling thread.
 * Rasters hold doubles in row-major order, nominally in [0,1].
 */
#ifndef PPII_PPII_H
#define PPII_PPII_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#  if defined(PPII_BUILDING_LIBRARY)
#    define PPII_API __declspec(dllexport)
#  else
#    define PPII_API __declspec(dllimport)
#  endif
#else
#  define PPII_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum ppii_status {
  PPII_OK = 0,
  PPII_ERR_INVALID_INPUT = 1,
  PPII_ERR_CAP_EXCEEDED = 2,
  PPII_ERR_DEGENERATE_DISTRIBUTION = 3,
  PPII_ERR_UNDEFINED_METRIC = 4,
  PPII_ERR_NO_INPUTS = 5,
  PPII_ERR_IO = 6,
  PPII_ERR_INTERNAL = 7,
  PPII_ERR_PARTIAL_FAILURE = 8
} ppii_status;

typedef enum ppii_backend {
  PPII_BACKEND_DIRECT = 0,
  PPII_BACKEND_DST = 1,
  PPII_BACKEND_CG = 2
} ppii_backend;

typedef struct ppii_raster ppii_raster;
typedef struct ppii_config ppii_config;
typedef struct ppii_bundle ppii_bundle;

typedef struct ppii_rect {
  size_t x, y, width, height;
} ppii_rect;

typedef struct ppii_solver_report {
  ppii_backend backend;
  double residual_norm;
  double wall_time;
} ppii_solver_report;

typedef struct ppii_generate_summary {
  size_t images;
  size_t succeeded;
  size_t failed;
} ppii_generate_summary;

PPII_API const char* ppii_version(void);

/* Message of the last failed call on this thread ("" if none). */
PPII_API const char* ppii_last_error(void);

PPII_API const char* ppii_status_name(ppii_status status);

/* ---- rasters ------------------------------------------------------------ */

/* data may be NULL for an all-zero raster; otherwise width*height values are copied. */
PPII_API ppii_status ppii_raster_create(size_t width, size_t height, const double* data, ppii_raster** out);
PPII_API ppii_status ppii_raster_create_f32(size_t width, size_t height, const float* data, ppii_raster** out);
PPII_API void ppii_raster_free(ppii_raster* raster);
PPII_API size_t ppii_raster_width(const ppii_raster* raster);
PPII_API size_t ppii_raster_height(const ppii_raster* raster);
/* Borrowed pointer, valid until the raster is freed. */
PPII_API const double* ppii_raster_data(const ppii_raster* raster);
PPII_API ppii_status ppii_raster_copy_f32(const ppii_raster* raster, float* out, size_t count);

/* 8/16-bit grayscale PNG or P5 PGM; 16-bit values are divided by 65535. */
PPII_API ppii_status ppii_raster_load(const char* path, ppii_raster** out);
/* bit_depth 8 or 16; values clamped to [0,1] and rounded half-to-even. */
PPII_API ppii_status ppii_raster_save(const ppii_raster* raster, const char* path, int bit_depth);

PPII_API ppii_status ppii_normalize(const ppii_raster* in, ppii_raster** out);
PPII_API ppii_status ppii_equalize(const ppii_raster* in, size_t bins, ppii_raster** out);
PPII_API ppii_status ppii_resize(const ppii_raster* in, size_t width, size_t height, ppii_raster** out);

/* ---- blending ----------------------------------------------------------- */

PPII_API ppii_status ppii_blend(const ppii_raster* target, const ppii_raster* source, ppii_rect target_rect,
                                ppii_rect source_rect, double alpha, double gain, ppii_backend backend,
                                ppii_raster** out, ppii_solver_report* report);

/* ---- configuration ------------------------------------------------------ */

PPII_API ppii_status ppii_config_create(ppii_config** out);
PPII_API void ppii_config_free(ppii_config* config);
/* Sets one "section.key" from text, e.g. ("generator.gain", "3"). */
PPII_API ppii_status ppii_config_set(ppii_config* config, const char* key, const char* value);
/* Applies a key = value file on top of the current values. */
PPII_API ppii_status ppii_config_load(ppii_config* config, const char* path);
/* Number of published keys and their name/default. */
PPII_API size_t ppii_config_key_count(void);
PPII_API const char* ppii_config_key_name(size_t index);
PPII_API const char* ppii_config_key_default(size_t index);
PPII_API const char* ppii_config_key_description(size_t index);

/* ---- generation --------------------------------------------------------- */

/* In-memory generation for one target. image_index selects the per-image
 * random streams, so (seed, image_index) reproduces the batch outputs. */
PPII_API ppii_status ppii_generate(const ppii_raster* target, const ppii_raster* const* sources, size_t source_count,
                                   const ppii_config* config, uint64_t seed, uint64_t image_index,
                                   ppii_bundle** out);
PPII_API void ppii_bundle_free(ppii_bundle* bundle);
/* Borrowed rasters, valid until the bundle is freed. */
PPII_API const ppii_raster* ppii_bundle_mean(const ppii_bundle* bundle);
PPII_API const ppii_raster* ppii_bundle_variance(const ppii_bundle* bundle);
PPII_API const ppii_raster* ppii_bundle_label(const ppii_bundle* bundle);
PPII_API const ppii_raster* ppii_bundle_mask(const ppii_bundle* bundle);
PPII_API size_t ppii_bundle_anomaly_count(const ppii_bundle* bundle);

/* Batch generation over the images in input_dir; PPII_ERR_PARTIAL_FAILURE
 * when some images failed (the rest are written). workers = 0 keeps the
 * configured count. */
PPII_API ppii_status ppii_run_generate(const ppii_config* config, const char* input_dir, const char* output_dir,
                                       uint64_t seed, size_t workers, ppii_generate_summary* summary);

/* Writes the JSON metrics report comparing prediction and ground-truth
 * directories paired by file name. config may be NULL. */
PPII_API ppii_status ppii_run_evaluate(const ppii_config* config, const char* pred_dir, const char* gt_dir,
                                       const char* report_path);

/* Single-patch blend between two image files; normalize != 0 rescales both
 * inputs to [0,1] first. The rect needs a one-pixel margin. */
PPII_API ppii_status ppii_run_blend(const char* source_path, const char* target_path, ppii_rect rect, double alpha,
                                    double gain, ppii_backend backend, int normalize, const char* out_path,
                                    ppii_solver_report* report);

PPII_API ppii_status ppii_run_equalize(const char* input_path, const char* output_path, size_t bins);

/* ---- metrics ------------------------------------------------------------ */

/* labels nonzero = anomalous. */
PPII_API ppii_status ppii_auroc(const double* scores, const uint8_t* labels, size_t n, double* out);
PPII_API ppii_status ppii_average_precision(const double* scores, const uint8_t* labels, size_t n, double* out);
/* Float32 convenience for host bindings: labels > 0.5 are positive. */
PPII_API ppii_status ppii_metrics_f32(const float* scores, const float* labels, size_t n, double* auroc,
                                      double* average_precision);

#ifdef __cplusplus
}
#endif

#endif /* PPII_PPII_H */
