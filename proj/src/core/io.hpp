#pragma once

// File formats: PTYG complex grids, PTYM measurement sets (both binary,
// little-endian), CSV grid interchange, and 16-bit PGM image export.

#include <string>

#include "core/types.hpp"
#include "core/window.hpp"

namespace ptycho {

enum class GridFormat { ptyg, csv };

/// Format inferred from the extension (.csv -> CSV, anything else PTYG).
GridFormat grid_format_for_path(const std::string& path);

ComplexGrid read_grid(const std::string& path);
ComplexGrid read_grid(const std::string& path, GridFormat format);
void write_grid(const ComplexGrid& grid, const std::string& path);
void write_grid(const ComplexGrid& grid, const std::string& path, GridFormat format);

MeasurementSet read_measurements(const std::string& path);
void write_measurements(const MeasurementSet& ms, const std::string& path);

enum class PgmChannel { amplitude, phase };

/// 16-bit binary PGM; amplitudes mapped linearly from [0,1] (clamped),
/// phases from [-pi, pi].
void export_pgm(const ComplexGrid& grid, PgmChannel channel, const std::string& path);

/// Window specifications of the form "ew:s=8,a=4", "gw:s=8,alpha=0.99
/// [,photons=1][,onesided]" or "file:coeffs.ptyg".
WindowSpec parse_window_spec(const std::string& spec);

} // namespace ptycho
