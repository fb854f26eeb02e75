#include "core/window.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

#include <boost/math/special_functions/erf.hpp>

#include "core/io.hpp"

namespace ptycho {

namespace {

void check_support(std::int64_t n, std::int64_t s) {
    if (s < 1 || s > n)
        throw Error(ErrorKind::invalid_argument,
                    "window support must satisfy 1 <= s <= N, got s=" + std::to_string(s) +
                        " N=" + std::to_string(n));
}

} // namespace

Window exponential_window(std::int64_t n, std::int64_t s, double a) {
    check_support(n, s);
    if (a <= 0) throw Error(ErrorKind::invalid_argument, "exponential decay must be positive");
    Window w;
    w.ambient_n = n;
    w.support = s;
    w.kind = WindowKind::exponential;
    w.decay = a;
    w.low_decay_warning = a < 4.0;
    w.coeffs = VectorXcd::Zero(n);
    const double scale = std::pow(2.0 * static_cast<double>(s) - 1.0, -0.25);
    for (std::int64_t i = 0; i < s; ++i)
        w.coeffs[i] = scale * std::exp(-static_cast<double>(i) / a);
    return w;
}

double coverage_quantile(double alpha, bool one_sided) {
    if (!(alpha > 0.0 && alpha < 1.0))
        throw Error(ErrorKind::invalid_argument, "quantile coverage must lie in (0,1)");
    // Phi^{-1}(p) = sqrt(2) erf^{-1}(2p - 1)
    const double p = one_sided ? alpha : (1.0 + alpha) / 2.0;
    return std::sqrt(2.0) * boost::math::erf_inv(2.0 * p - 1.0);
}

Window gaussian_window(std::int64_t n, std::int64_t s, double alpha, double photons,
                       bool one_sided) {
    check_support(n, s);
    if (s < 2) throw Error(ErrorKind::invalid_argument, "gaussian window needs s >= 2");
    if (photons <= 0) throw Error(ErrorKind::invalid_argument, "photon count must be positive");
    const double t = coverage_quantile(alpha, one_sided);
    Window w;
    w.ambient_n = n;
    w.support = s;
    w.kind = WindowKind::gaussian;
    w.alpha = alpha;
    w.photons = photons;
    w.one_sided = one_sided;
    w.coeffs = VectorXcd::Zero(n);
    const double denom = 2.0 * static_cast<double>((s - 1) * (s - 1));
    double sq = 0.0;
    for (std::int64_t i = 0; i < s; ++i) {
        const double m = static_cast<double>(2 * i - s + 1);
        const double u = std::exp(-t * t * m * m / denom);
        w.coeffs[i] = u;
        sq += u * u;
    }
    const double scale = std::sqrt(photons / sq);
    for (std::int64_t i = 0; i < s; ++i) w.coeffs[i] *= scale;
    return w;
}

Window custom_window(VectorXcd coeffs, std::int64_t s) {
    const std::int64_t n = coeffs.size();
    check_support(n, s);
    for (std::int64_t i = 0; i < n; ++i) {
        if (i < s && coeffs[i] == cdouble(0.0, 0.0))
            throw Error(ErrorKind::invalid_argument, "window must be nonvanishing on support");
        if (i >= s && coeffs[i] != cdouble(0.0, 0.0))
            throw Error(ErrorKind::invalid_argument, "window must vanish outside support");
        if (!std::isfinite(coeffs[i].real()) || !std::isfinite(coeffs[i].imag()))
            throw Error(ErrorKind::invalid_argument, "window coefficients must be finite");
    }
    Window w;
    w.ambient_n = n;
    w.support = s;
    w.kind = WindowKind::custom;
    w.coeffs = std::move(coeffs);
    return w;
}

VectorXcd frame_vector(const Window& w, std::int64_t k, std::int64_t shift) {
    const std::int64_t n = w.ambient_n;
    if (k < 0 || k >= n) throw Error(ErrorKind::invalid_argument, "frequency index out of range");
    if (shift < 0 || shift >= n) throw Error(ErrorKind::invalid_argument, "shift out of range");
    VectorXcd v = VectorXcd::Zero(n);
    const double two_pi = 2.0 * std::numbers::pi;
    for (std::int64_t m = 0; m < w.support; ++m) {
        const std::int64_t idx = (shift + m) % n;
        const double phase = two_pi * static_cast<double>(k) * static_cast<double>(m) /
                             static_cast<double>(n);
        v[idx] = w.coeffs[m] * cdouble(std::cos(phase), std::sin(phase));
    }
    return v;
}

Eigen::Vector<std::complex<long double>, Eigen::Dynamic>
frame_vector_ld(const Window& w, std::int64_t k, std::int64_t shift) {
    const std::int64_t n = w.ambient_n;
    Eigen::Vector<std::complex<long double>, Eigen::Dynamic> v(n);
    v.setZero();
    const long double two_pi = 2.0L * std::numbers::pi_v<long double>;
    for (std::int64_t m = 0; m < w.support; ++m) {
        const std::int64_t idx = (shift + m) % n;
        const long double phase = two_pi * static_cast<long double>(k) *
                                  static_cast<long double>(m) / static_cast<long double>(n);
        const std::complex<long double> c(static_cast<long double>(w.coeffs[m].real()),
                                          static_cast<long double>(w.coeffs[m].imag()));
        v[idx] = c * std::complex<long double>(std::cos(phase), std::sin(phase));
    }
    return v;
}

std::string describe_window(const Window& w) {
    std::ostringstream os;
    switch (w.kind) {
    case WindowKind::exponential:
        os << "ew(a=" << w.decay << ")";
        break;
    case WindowKind::gaussian:
        os << "gw(alpha=" << w.alpha;
        if (w.photons != 1.0) os << ",photons=" << w.photons;
        if (w.one_sided) os << ",onesided";
        os << ")";
        break;
    case WindowKind::custom:
        os << "custom(s=" << w.support << ")";
        break;
    }
    return os.str();
}

std::string WindowSpec::label() const {
    std::ostringstream os;
    switch (kind) {
    case WindowKind::exponential:
        os << "ew(a=" << a << ")";
        break;
    case WindowKind::gaussian:
        os << "gw(alpha=" << alpha;
        if (photons != 1.0) os << ",photons=" << photons;
        if (one_sided) os << ",onesided";
        os << ")";
        break;
    case WindowKind::custom:
        os << "file(" << path << ")";
        break;
    }
    return os.str();
}

Window realize_window(const WindowSpec& spec, std::int64_t n) {
    switch (spec.kind) {
    case WindowKind::exponential:
        return exponential_window(n, spec.support, spec.a);
    case WindowKind::gaussian:
        return gaussian_window(n, spec.support, spec.alpha, spec.photons, spec.one_sided);
    case WindowKind::custom: {
        ComplexGrid g = read_grid(spec.path);
        if (g.ndims != 1)
            throw Error(ErrorKind::invalid_argument, "window coefficient file must hold a 1D grid");
        if (g.extent != n)
            throw Error(ErrorKind::invalid_argument,
                        "window length " + std::to_string(g.extent) + " does not match N=" +
                            std::to_string(n));
        // infer the support: leading nonzeros, zero tail enforced by custom_window
        std::int64_t s = 0;
        while (s < g.extent && g.values[s] != cdouble(0.0, 0.0)) ++s;
        if (s == 0) throw Error(ErrorKind::invalid_argument, "window file starts with a zero");
        return custom_window(std::move(g.values), s);
    }
    }
    throw Error(ErrorKind::invalid_argument, "unknown window kind");
}

} // namespace ptycho
