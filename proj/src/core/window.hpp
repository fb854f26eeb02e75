#pragma once

// Window construction and the translated/modulated frame vectors built from
// them. Windows are supported on the first s entries and nonvanishing there.

#include <optional>
#include <string>

#include "core/types.hpp"

namespace ptycho {

enum class WindowKind { exponential, gaussian, custom };

struct Window {
    std::int64_t ambient_n = 0; // N
    std::int64_t support = 0;   // s
    VectorXcd coeffs;           // length N, zero for n >= s
    WindowKind kind = WindowKind::custom;
    double decay = 0.0;        // a (exponential)
    double alpha = 0.0;        // coverage (gaussian)
    double photons = 0.0;      // squared-norm normalization (gaussian)
    bool one_sided = false;    // quantile convention (gaussian)
    bool low_decay_warning = false; // exponential with a < 4

    double norm() const { return coeffs.norm(); }
};

/// Separable 2D window W = u v*; both factors share N and s.
struct Window2D {
    Window u;
    Window v;
};

/// w(n) = (2s-1)^(-1/4) exp(-n/a) on the support. a below 4 is accepted but
/// flagged via low_decay_warning.
Window exponential_window(std::int64_t n, std::int64_t s, double a);

/// Gaussian sampled uniformly on [-t_alpha, t_alpha] and scaled so that the
/// squared Euclidean norm equals the photon count. t_alpha is the two-sided
/// coverage quantile by default; one_sided selects Phi^{-1}(alpha) instead.
Window gaussian_window(std::int64_t n, std::int64_t s, double alpha, double photons = 1.0,
                       bool one_sided = false);

/// Wrap externally supplied coefficients; must vanish exactly off the
/// support and nowhere on it.
Window custom_window(VectorXcd coeffs, std::int64_t s);

/// Two-sided standard normal coverage quantile: P(|X| <= t) = alpha.
double coverage_quantile(double alpha, bool one_sided);

/// Frame vector v(n) = w(m) exp(2*pi*i*k*m/N) with m = (n - l) mod N.
/// Satisfies <f, v> = exp(2*pi*i*k*l/N) * sum_n f(n) conj(w(n-l)) e^{-2*pi*i*k*n/N},
/// so |<f, v>|^2 reproduces the squared-modulus windowed Fourier measurement.
VectorXcd frame_vector(const Window& w, std::int64_t k, std::int64_t shift);

/// Same frame vector evaluated in extended precision (solver assembly).
Eigen::Vector<std::complex<long double>, Eigen::Dynamic>
frame_vector_ld(const Window& w, std::int64_t k, std::int64_t shift);

/// Short human-readable tag, e.g. "ew(a=4)" or "gw(alpha=0.99)".
std::string describe_window(const Window& w);

/// Parameters from which a Window can be realized once N is known.
struct WindowSpec {
    WindowKind kind = WindowKind::exponential;
    std::int64_t support = 0;     // required for ew/gw
    double a = 4.0;               // ew
    double alpha = 0.99;          // gw
    double photons = 1.0;         // gw
    bool one_sided = false;       // gw
    std::string path;             // custom: PTYG coefficient file

    std::string label() const;
};

Window realize_window(const WindowSpec& spec, std::int64_t n);

} // namespace ptycho
