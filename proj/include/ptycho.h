/*
 * ptycho — direct solver for ptychographic phase retrieval from
 * squared-modulus windowed Fourier measurements.
 *
 * C interface: opaque handles, status codes, thread-local error messages.
 * All functions return PTYCHO_OK (0) on success; on failure they return a
 * nonzero status and leave a human-readable message in ptycho_last_error().
 *
 * Objects are 1D complex vectors or square 2D complex images (row-major).
 * 2D simulation/reconstruction uses the separable window W = w w* built
 * from the supplied 1D window.
 */

#ifndef PTYCHO_H
#define PTYCHO_H

#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

#ifndef PTYCHO_API
#define PTYCHO_API __attribute__((visibility("default")))
#endif

typedef int32_t ptycho_status;

enum {
    PTYCHO_OK = 0,
    PTYCHO_ERR_INVALID = 1, /* bad arguments or inconsistent geometry */
    PTYCHO_ERR_IO = 2,      /* file missing, malformed or unwritable */
    PTYCHO_ERR_NUMERIC = 3, /* numerically unsolvable system */
    PTYCHO_ERR_INTERNAL = 4
};

enum { PTYCHO_PROJECTOR_TIGHT = 0, PTYCHO_PROJECTOR_PATTERN = 1 };
enum { PTYCHO_DEGREE_NORM_AUTO = -1, PTYCHO_DEGREE_NORM_OFF = 0, PTYCHO_DEGREE_NORM_ON = 1 };
enum { PTYCHO_PGM_AMPLITUDE = 0, PTYCHO_PGM_PHASE = 1 };
enum { PTYCHO_MODE_INTERIOR = 0, PTYCHO_MODE_CIRCULANT = 1 };

typedef struct ptycho_grid ptycho_grid;
typedef struct ptycho_window ptycho_window;
typedef struct ptycho_measurements ptycho_measurements;
typedef struct ptycho_result ptycho_result;

PTYCHO_API const char* ptycho_version(void);

/* Message describing the most recent failure on this thread. */
PTYCHO_API const char* ptycho_last_error(void);

/* ---- grids ---- */

/* ndims 1: extent values; ndims 2: extent*extent values, row-major.
 * im may be NULL for real data. */
PTYCHO_API ptycho_status ptycho_grid_create(int32_t ndims, int64_t extent, const double* re,
                                            const double* im, ptycho_grid** out);
PTYCHO_API ptycho_status ptycho_grid_ndims(const ptycho_grid* g, int32_t* out);
PTYCHO_API ptycho_status ptycho_grid_extent(const ptycho_grid* g, int64_t* out);
PTYCHO_API ptycho_status ptycho_grid_size(const ptycho_grid* g, int64_t* out);
/* re/im must hold ptycho_grid_size(g) doubles each. */
PTYCHO_API ptycho_status ptycho_grid_values(const ptycho_grid* g, double* re, double* im);
/* Format by extension: ".csv" text, anything else binary PTYG. */
PTYCHO_API ptycho_status ptycho_grid_read(const char* path, ptycho_grid** out);
PTYCHO_API ptycho_status ptycho_grid_write(const ptycho_grid* g, const char* path);
PTYCHO_API ptycho_status ptycho_grid_export_pgm(const ptycho_grid* g, int32_t channel,
                                                const char* path);
PTYCHO_API void ptycho_grid_destroy(ptycho_grid* g);

/* ---- windows ---- */

PTYCHO_API ptycho_status ptycho_window_exponential(int64_t n, int64_t s, double a,
                                                   ptycho_window** out);
PTYCHO_API ptycho_status ptycho_window_gaussian(int64_t n, int64_t s, double alpha,
                                                double photons, int32_t one_sided,
                                                ptycho_window** out);
PTYCHO_API ptycho_status ptycho_window_custom(int64_t n, int64_t s, const double* re,
                                              const double* im, ptycho_window** out);
/* spec: "ew:s=8,a=4" | "gw:s=8,alpha=0.99[,photons=1][,onesided]" | "file:w.ptyg" */
PTYCHO_API ptycho_status ptycho_window_from_spec(const char* spec, int64_t n,
                                                 ptycho_window** out);
/* 1D grid holding the N window coefficients. */
PTYCHO_API ptycho_status ptycho_window_coeffs(const ptycho_window* w, ptycho_grid** out);
PTYCHO_API void ptycho_window_destroy(ptycho_window* w);

/* ---- measurements ---- */

PTYCHO_API ptycho_status ptycho_simulate(const ptycho_grid* object, const ptycho_window* w,
                                         int64_t max_freq, int64_t stride, int32_t mode,
                                         ptycho_measurements** out);
PTYCHO_API ptycho_status ptycho_measurements_read(const char* path, ptycho_measurements** out);
PTYCHO_API ptycho_status ptycho_measurements_write(const ptycho_measurements* ms,
                                                   const char* path);
PTYCHO_API ptycho_status ptycho_measurements_info(const ptycho_measurements* ms, int32_t* ndims,
                                                  int64_t* extent, int64_t* support,
                                                  int64_t* max_freq, int64_t* value_count);
PTYCHO_API void ptycho_measurements_destroy(ptycho_measurements* ms);

/* ---- reconstruction ---- */

PTYCHO_API ptycho_status ptycho_reconstruct(const ptycho_measurements* ms,
                                            const ptycho_window* w, int32_t projector,
                                            int32_t degree_norm, ptycho_result** out);
PTYCHO_API ptycho_status ptycho_result_estimate(const ptycho_result* r, ptycho_grid** out);
PTYCHO_API ptycho_status ptycho_result_components(const ptycho_result* r, int64_t* out);
PTYCHO_API ptycho_status ptycho_result_iterations(const ptycho_result* r, int64_t* out);
PTYCHO_API ptycho_status ptycho_result_residual(const ptycho_result* r, double* out);
PTYCHO_API void ptycho_result_destroy(ptycho_result* r);

/* ---- evaluation ---- */

PTYCHO_API ptycho_status ptycho_phantom(int64_t n, uint64_t seed, ptycho_grid** out);
/* Global phase is aligned before differencing; any output pointer may be NULL. */
PTYCHO_API ptycho_status ptycho_metrics(const ptycho_grid* truth, const ptycho_grid* estimate,
                                        double* mse_total, double* mse_amplitude,
                                        double* mse_phase, double* aligned_theta);
/* Runs the sweep described by a JSON config file and writes the CSV table. */
PTYCHO_API ptycho_status ptycho_sweep(const char* config_json_path, const char* out_csv_path);

#ifdef __cplusplus
} /* extern "C" */
#endif

#endif /* PTYCHO_H */
