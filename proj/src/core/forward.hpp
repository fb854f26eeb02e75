#pragma once

// Forward model: squared-modulus windowed Fourier measurements in 1D and 2D.
// Values are computed by direct summation over the window support, so each
// output is an independent deterministic sum.

#include "core/types.hpp"
#include "core/window.hpp"

namespace ptycho {

/// V_w f(l,k) = sum_n f(n) conj(w(n-l mod N)) e^{-2 pi i k n / N}.
/// Reference implementation summing over all N grid points.
cdouble brute_force_stft(const ComplexGrid& f, const Window& w, std::int64_t shift,
                         std::int64_t k);

/// y[alpha] = |V_w f(l,k)|^2 over the given shift set and k = 0..K.
MeasurementSet simulate_1d(const ComplexGrid& f, const Window& w, const ShiftSet& shifts,
                           std::int64_t max_freq);

/// 2D measurements with a separable window W = u v*:
/// Y[l,k] = |sum_{n1,n2} F(n1,n2) conj(W(n1-l1,n2-l2)) e^{-2 pi i (k1 n1 + k2 n2)/N}|^2.
/// Both dimensions share the shift set and frequency count.
MeasurementSet simulate_2d(const ComplexGrid& f, const Window2D& w, const ShiftSet& shifts,
                           std::int64_t max_freq);

} // namespace ptycho
