#pragma once

// Benchmark harness: seeded phantoms, global-phase alignment, error metrics
// and the projector/window parameter sweeps.

#include <optional>
#include <string>
#include <vector>

#include "core/types.hpp"
#include "core/window.hpp"

namespace ptycho {

/// Deterministic smooth complex image: low-pass-filtered noise fields
/// (cutoff at N/8 grid frequencies) mapped affinely into the amplitude and
/// phase ranges.
ComplexGrid phantom(std::int64_t n, std::uint64_t seed, double amp_lo = 0.2, double amp_hi = 0.7,
                    double phase_lo = 0.0, double phase_hi = 1.5707963267948966);

struct Alignment {
    double theta = 0.0;   // estimate rotated by e^{i theta} minimizes the error
    ComplexGrid aligned;
    bool degenerate = false; // <estimate, truth> was zero
};

Alignment align_global_phase(const ComplexGrid& truth, const ComplexGrid& estimate);

struct MseMetrics {
    double total = 0.0;     // ||F - aligned||_F^2 / numel
    double amplitude = 0.0; // |||F| - |aligned|||_F^2 / numel
    double phase = 0.0;     // mean squared wrapped phase difference on lit pixels
};

/// Alignment is applied internally before differencing.
MseMetrics mse_metrics(const ComplexGrid& truth, const ComplexGrid& estimate);

struct SweepConfig {
    std::int64_t n = 64;
    std::int64_t support = 8;
    std::int64_t max_freq = 15;
    std::vector<std::int64_t> strides;
    std::vector<std::string> projectors; // "tight" / "pattern"
    std::vector<WindowSpec> windows;     // reconstruction windows
    std::optional<WindowSpec> probe;     // simulation window; defaults to each window itself
    ShiftMode mode = ShiftMode::interior;
    std::uint64_t seed = 7;
};

SweepConfig parse_sweep_config(const std::string& json_text);
SweepConfig read_sweep_config(const std::string& path);

struct SweepRow {
    std::int64_t stride = 0;
    std::string projector;
    std::string window;
    MseMetrics mse;
    std::int64_t components = 0;
    double seconds = 0.0;
    std::string error; // nonempty when the cell failed
};

std::vector<SweepRow> sweep(const SweepConfig& config);

/// Header "kappa,projector,window,mse_total,mse_phase,mse_amp,components,seconds".
void write_sweep_csv(const std::vector<SweepRow>& rows, const std::string& path);

} // namespace ptycho
