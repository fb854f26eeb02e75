#pragma once

// Restricted inversion of the lifted 1D problem: the Gram system of the
// translated/modulated rank-one window matrices (tight projector) and the
// masked least-squares baseline on standard-basis entries (pattern
// projector).

#include "core/solve.hpp"
#include "core/types.hpp"
#include "core/window.hpp"

namespace ptycho {

/// Gram matrix G[a,b] = |<v_a, v_b>|^2 of the frame vectors, with the
/// spectral factorization prepared. Frequency sign -1 builds the system for
/// the conjugate-modulation frames used by the second dimension of the 2D
/// solver.
struct GramSystem {
    std::int64_t shift_count = 0;
    std::int64_t max_freq = 0;
    int freq_sign = +1;
    MatrixXld G;
    SpectralSolver<long double> solver;

    std::int64_t size() const { return shift_count * (max_freq + 1); }
    Eigen::MatrixXd matrix() const { return G.cast<double>(); }
};

GramSystem build_gram(const Window& w, const ShiftSet& shifts, std::int64_t max_freq,
                      int freq_sign = +1);

struct TightSolve {
    VectorXd coefficients;
    SolveDiagnostics diagnostics;
};

/// Minimal-norm solution of G c = y via the spectral pseudo-inverse.
TightSolve solve_tight(const GramSystem& gram, const VectorXd& y);

/// Z = sum_a c_a v_a v_a* accumulated on the band mask, diagonal clamped.
LiftedSolution expand_to_band(const VectorXd& coefficients, const Window& w,
                              const ShiftSet& shifts, std::int64_t max_freq);

/// Least squares min ||A(Z) - y||^2 over complex Z supported on the band
/// mask, then Z <- (Z + Z*)/2 and diagonal clamping.
LiftedSolution solve_pattern(const Window& w, const ShiftSet& shifts, std::int64_t max_freq,
                             const VectorXd& y);

/// Re-apply the measurement map to a lifted solution: <B_a, Z>_HS per index.
VectorXd remeasure(const LiftedSolution& z, const Window& w, const ShiftSet& shifts,
                   std::int64_t max_freq);

enum class Projector { tight, pattern };
enum class DegreeNorm { automatic, off, on };

struct ReconstructOptions {
    Projector projector = Projector::tight;
    DegreeNorm degree_norm = DegreeNorm::automatic;
    double band_threshold = 1e-12; // relative to the largest diagonal entry
    double sync_tol = 1e-12;
    std::int64_t sync_max_iter = 5000;
};

ReconstructionResult reconstruct_1d(const MeasurementSet& ms, const Window& w,
                                    const ReconstructOptions& options = {});

} // namespace ptycho
