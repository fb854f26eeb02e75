#include "ptycho.h"

#include <cstring>
#include <string>

#include "core/bench.hpp"
#include "core/forward.hpp"
#include "core/io.hpp"
#include "core/solver1d.hpp"
#include "core/solver2d.hpp"
#include "core/types.hpp"
#include "core/window.hpp"

using namespace ptycho;

struct ptycho_grid {
    ComplexGrid grid;
};
struct ptycho_window {
    Window window;
};
struct ptycho_measurements {
    MeasurementSet ms;
};
struct ptycho_result {
    ReconstructionResult result;
};

namespace {

thread_local std::string g_last_error;

ptycho_status fail(ptycho_status code, const char* what) {
    g_last_error = what;
    return code;
}

ptycho_status map_error(const Error& e) {
    g_last_error = e.what();
    switch (e.kind()) {
    case ErrorKind::invalid_argument:
        return PTYCHO_ERR_INVALID;
    case ErrorKind::io:
        return PTYCHO_ERR_IO;
    case ErrorKind::numeric:
        return PTYCHO_ERR_NUMERIC;
    }
    return PTYCHO_ERR_INTERNAL;
}

template <typename Fn>
ptycho_status guarded(Fn&& fn) {
    try {
        return fn();
    } catch (const Error& e) {
        return map_error(e);
    } catch (const std::exception& e) {
        g_last_error = e.what();
        return PTYCHO_ERR_INTERNAL;
    } catch (...) {
        g_last_error = "unknown error";
        return PTYCHO_ERR_INTERNAL;
    }
}

VectorXcd pack_values(std::int64_t count, const double* re, const double* im) {
    VectorXcd v(count);
    for (std::int64_t i = 0; i < count; ++i) v[i] = cdouble(re[i], im ? im[i] : 0.0);
    return v;
}

} // namespace

extern "C" {

const char* ptycho_version(void) { return "1.0.0"; }

const char* ptycho_last_error(void) { return g_last_error.c_str(); }

ptycho_status ptycho_grid_create(int32_t ndims, int64_t extent, const double* re,
                                 const double* im, ptycho_grid** out) {
    if (!re || !out) return fail(PTYCHO_ERR_INVALID, "null pointer argument");
    return guarded([&] {
        const std::int64_t count = ndims == 2 ? extent * extent : extent;
        ComplexGrid g = ndims == 2 ? make_grid_2d(extent, pack_values(count, re, im))
                                   : make_grid_1d(pack_values(count, re, im));
        *out = new ptycho_grid{std::move(g)};
        return PTYCHO_OK;
    });
}

ptycho_status ptycho_grid_ndims(const ptycho_grid* g, int32_t* out) {
    if (!g || !out) return fail(PTYCHO_ERR_INVALID, "null pointer argument");
    *out = g->grid.ndims;
    return PTYCHO_OK;
}

ptycho_status ptycho_grid_extent(const ptycho_grid* g, int64_t* out) {
    if (!g || !out) return fail(PTYCHO_ERR_INVALID, "null pointer argument");
    *out = g->grid.extent;
    return PTYCHO_OK;
}

ptycho_status ptycho_grid_size(const ptycho_grid* g, int64_t* out) {
    if (!g || !out) return fail(PTYCHO_ERR_INVALID, "null pointer argument");
    *out = g->grid.size();
    return PTYCHO_OK;
}

ptycho_status ptycho_grid_values(const ptycho_grid* g, double* re, double* im) {
    if (!g || !re || !im) return fail(PTYCHO_ERR_INVALID, "null pointer argument");
    for (Eigen::Index i = 0; i < g->grid.values.size(); ++i) {
        re[i] = g->grid.values[i].real();
        im[i] = g->grid.values[i].imag();
    }
    return PTYCHO_OK;
}

ptycho_status ptycho_grid_read(const char* path, ptycho_grid** out) {
    if (!path || !out) return fail(PTYCHO_ERR_INVALID, "null pointer argument");
    return guarded([&] {
        *out = new ptycho_grid{read_grid(path)};
        return PTYCHO_OK;
    });
}

ptycho_status ptycho_grid_write(const ptycho_grid* g, const char* path) {
    if (!g || !path) return fail(PTYCHO_ERR_INVALID, "null pointer argument");
    return guarded([&] {
        write_grid(g->grid, path);
        return PTYCHO_OK;
    });
}

ptycho_status ptycho_grid_export_pgm(const ptycho_grid* g, int32_t channel, const char* path) {
    if (!g || !path) return fail(PTYCHO_ERR_INVALID, "null pointer argument");
    return guarded([&] {
        export_pgm(g->grid,
                   channel == PTYCHO_PGM_PHASE ? PgmChannel::phase : PgmChannel::amplitude, path);
        return PTYCHO_OK;
    });
}

void ptycho_grid_destroy(ptycho_grid* g) { delete g; }

ptycho_status ptycho_window_exponential(int64_t n, int64_t s, double a, ptycho_window** out) {
    if (!out) return fail(PTYCHO_ERR_INVALID, "null pointer argument");
    return guarded([&] {
        *out = new ptycho_window{exponential_window(n, s, a)};
        return PTYCHO_OK;
    });
}

ptycho_status ptycho_window_gaussian(int64_t n, int64_t s, double alpha, double photons,
                                     int32_t one_sided, ptycho_window** out) {
    if (!out) return fail(PTYCHO_ERR_INVALID, "null pointer argument");
    return guarded([&] {
        *out = new ptycho_window{gaussian_window(n, s, alpha, photons, one_sided != 0)};
        return PTYCHO_OK;
    });
}

ptycho_status ptycho_window_custom(int64_t n, int64_t s, const double* re, const double* im,
                                   ptycho_window** out) {
    if (!re || !out) return fail(PTYCHO_ERR_INVALID, "null pointer argument");
    return guarded([&] {
        *out = new ptycho_window{custom_window(pack_values(n, re, im), s)};
        return PTYCHO_OK;
    });
}

ptycho_status ptycho_window_from_spec(const char* spec, int64_t n, ptycho_window** out) {
    if (!spec || !out) return fail(PTYCHO_ERR_INVALID, "null pointer argument");
    return guarded([&] {
        *out = new ptycho_window{realize_window(parse_window_spec(spec), n)};
        return PTYCHO_OK;
    });
}

ptycho_status ptycho_window_coeffs(const ptycho_window* w, ptycho_grid** out) {
    if (!w || !out) return fail(PTYCHO_ERR_INVALID, "null pointer argument");
    return guarded([&] {
        *out = new ptycho_grid{make_grid_1d(w->window.coeffs)};
        return PTYCHO_OK;
    });
}

void ptycho_window_destroy(ptycho_window* w) { delete w; }

ptycho_status ptycho_simulate(const ptycho_grid* object, const ptycho_window* w,
                              int64_t max_freq, int64_t stride, int32_t mode,
                              ptycho_measurements** out) {
    if (!object || !w || !out) return fail(PTYCHO_ERR_INVALID, "null pointer argument");
    return guarded([&] {
        const ShiftMode m =
            mode == PTYCHO_MODE_CIRCULANT ? ShiftMode::circulant : ShiftMode::interior;
        const ShiftSet shifts =
            make_shift_set(object->grid.extent, w->window.support, stride, m);
        MeasurementSet ms =
            object->grid.ndims == 1
                ? simulate_1d(object->grid, w->window, shifts, max_freq)
                : simulate_2d(object->grid, Window2D{w->window, w->window}, shifts, max_freq);
        *out = new ptycho_measurements{std::move(ms)};
        return PTYCHO_OK;
    });
}

ptycho_status ptycho_measurements_read(const char* path, ptycho_measurements** out) {
    if (!path || !out) return fail(PTYCHO_ERR_INVALID, "null pointer argument");
    return guarded([&] {
        *out = new ptycho_measurements{read_measurements(path)};
        return PTYCHO_OK;
    });
}

ptycho_status ptycho_measurements_write(const ptycho_measurements* ms, const char* path) {
    if (!ms || !path) return fail(PTYCHO_ERR_INVALID, "null pointer argument");
    return guarded([&] {
        write_measurements(ms->ms, path);
        return PTYCHO_OK;
    });
}

ptycho_status ptycho_measurements_info(const ptycho_measurements* ms, int32_t* ndims,
                                       int64_t* extent, int64_t* support, int64_t* max_freq,
                                       int64_t* value_count) {
    if (!ms) return fail(PTYCHO_ERR_INVALID, "null pointer argument");
    if (ndims) *ndims = ms->ms.ndims;
    if (extent) *extent = ms->ms.shifts[0].ambient_n;
    if (support) *support = ms->ms.shifts[0].support;
    if (max_freq) *max_freq = ms->ms.max_freq[0];
    if (value_count) *value_count = ms->ms.values.size();
    return PTYCHO_OK;
}

void ptycho_measurements_destroy(ptycho_measurements* ms) { delete ms; }

ptycho_status ptycho_reconstruct(const ptycho_measurements* ms, const ptycho_window* w,
                                 int32_t projector, int32_t degree_norm, ptycho_result** out) {
    if (!ms || !w || !out) return fail(PTYCHO_ERR_INVALID, "null pointer argument");
    return guarded([&] {
        ReconstructOptions opts;
        opts.projector =
            projector == PTYCHO_PROJECTOR_PATTERN ? Projector::pattern : Projector::tight;
        opts.degree_norm = degree_norm == PTYCHO_DEGREE_NORM_OFF  ? DegreeNorm::off
                           : degree_norm == PTYCHO_DEGREE_NORM_ON ? DegreeNorm::on
                                                                  : DegreeNorm::automatic;
        ReconstructionResult res =
            ms->ms.ndims == 1
                ? reconstruct_1d(ms->ms, w->window, opts)
                : reconstruct_2d(ms->ms, Window2D{w->window, w->window}, opts);
        *out = new ptycho_result{std::move(res)};
        return PTYCHO_OK;
    });
}

ptycho_status ptycho_result_estimate(const ptycho_result* r, ptycho_grid** out) {
    if (!r || !out) return fail(PTYCHO_ERR_INVALID, "null pointer argument");
    return guarded([&] {
        *out = new ptycho_grid{r->result.estimate};
        return PTYCHO_OK;
    });
}

ptycho_status ptycho_result_components(const ptycho_result* r, int64_t* out) {
    if (!r || !out) return fail(PTYCHO_ERR_INVALID, "null pointer argument");
    *out = r->result.sync.components;
    return PTYCHO_OK;
}

ptycho_status ptycho_result_iterations(const ptycho_result* r, int64_t* out) {
    if (!r || !out) return fail(PTYCHO_ERR_INVALID, "null pointer argument");
    *out = r->result.sync.iterations;
    return PTYCHO_OK;
}

ptycho_status ptycho_result_residual(const ptycho_result* r, double* out) {
    if (!r || !out) return fail(PTYCHO_ERR_INVALID, "null pointer argument");
    *out = r->result.solve.residual;
    return PTYCHO_OK;
}

void ptycho_result_destroy(ptycho_result* r) { delete r; }

ptycho_status ptycho_phantom(int64_t n, uint64_t seed, ptycho_grid** out) {
    if (!out) return fail(PTYCHO_ERR_INVALID, "null pointer argument");
    return guarded([&] {
        *out = new ptycho_grid{phantom(n, seed)};
        return PTYCHO_OK;
    });
}

ptycho_status ptycho_metrics(const ptycho_grid* truth, const ptycho_grid* estimate,
                             double* mse_total, double* mse_amplitude, double* mse_phase,
                             double* aligned_theta) {
    if (!truth || !estimate) return fail(PTYCHO_ERR_INVALID, "null pointer argument");
    return guarded([&] {
        const MseMetrics m = mse_metrics(truth->grid, estimate->grid);
        if (mse_total) *mse_total = m.total;
        if (mse_amplitude) *mse_amplitude = m.amplitude;
        if (mse_phase) *mse_phase = m.phase;
        if (aligned_theta)
            *aligned_theta = align_global_phase(truth->grid, estimate->grid).theta;
        return PTYCHO_OK;
    });
}

ptycho_status ptycho_sweep(const char* config_json_path, const char* out_csv_path) {
    if (!config_json_path || !out_csv_path)
        return fail(PTYCHO_ERR_INVALID, "null pointer argument");
    return guarded([&] {
        const SweepConfig cfg = read_sweep_config(config_json_path);
        write_sweep_csv(sweep(cfg), out_csv_path);
        return PTYCHO_OK;
    });
}

} // extern "C"
