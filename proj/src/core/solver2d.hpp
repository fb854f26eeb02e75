#pragma once

// 2D driver. Separability W = u v* factorizes the lifted system into a
// Kronecker product of two 1D Gram systems; the expansion accumulates a
// sparse band over row-major vec indices and hands off to angular
// synchronization. Both dimensions share the shift set and frequency count.

#include "core/solver1d.hpp"
#include "core/types.hpp"
#include "core/window.hpp"

namespace ptycho {

struct FactorGrams {
    GramSystem u; // frames T_l M_{+k} u
    GramSystem v; // frames T_l M_{-k} v
};

FactorGrams build_gram_2d(const Window2D& w, const ShiftSet& shifts, std::int64_t max_freq);

struct TightSolve2D {
    Eigen::MatrixXd coefficients; // D1 x D2
    SolveDiagnostics diagnostics;
};

/// Solves (G_u (x) G_v) vec(C) = vec(Y) by factor-wise spectral solves along
/// each dimension of Y.
TightSolve2D solve_tight_2d(const FactorGrams& grams, const MeasurementSet& ms);

/// Z = sum_{a1,a2} C[a1,a2] vec(B_a1,a2) vec(B_a1,a2)* on the product band
/// mask; dimension N^2.
LiftedSolution expand_to_band_2d(const Eigen::MatrixXd& coefficients, const Window2D& w,
                                 const ShiftSet& shifts, std::int64_t max_freq);

/// Masked least squares over the vec-index band, solved through the factor
/// structure of the normal equations, then symmetrized and clamped.
LiftedSolution solve_pattern_2d(const Window2D& w, const ShiftSet& shifts,
                                std::int64_t max_freq, const MeasurementSet& ms);

ReconstructionResult reconstruct_2d(const MeasurementSet& ms, const Window2D& w,
                                    const ReconstructOptions& options = {});

} // namespace ptycho
