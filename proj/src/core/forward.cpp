#include "core/forward.hpp"

#include <cmath>
#include <numbers>

namespace ptycho {

namespace {

// e^{-2 pi i k m / N} for m = 0..s-1, k = 0..K: shared by every shift.
Eigen::MatrixXcd twiddle_table(std::int64_t n, std::int64_t s, std::int64_t max_freq) {
    Eigen::MatrixXcd t(max_freq + 1, s);
    const double two_pi = 2.0 * std::numbers::pi;
    for (std::int64_t k = 0; k <= max_freq; ++k)
        for (std::int64_t m = 0; m < s; ++m) {
            const double phase = -two_pi * static_cast<double>(k) * static_cast<double>(m) /
                                 static_cast<double>(n);
            t(k, m) = cdouble(std::cos(phase), std::sin(phase));
        }
    return t;
}

} // namespace

cdouble brute_force_stft(const ComplexGrid& f, const Window& w, std::int64_t shift,
                         std::int64_t k) {
    if (f.ndims != 1) throw Error(ErrorKind::invalid_argument, "brute_force_stft expects a 1D grid");
    const std::int64_t n = f.extent;
    if (w.ambient_n != n) throw Error(ErrorKind::invalid_argument, "window length does not match grid");
    const double two_pi = 2.0 * std::numbers::pi;
    cdouble acc(0.0, 0.0);
    for (std::int64_t i = 0; i < n; ++i) {
        const std::int64_t m = (i - shift % n + n) % n;
        const double phase = -two_pi * static_cast<double>(k) * static_cast<double>(i) /
                             static_cast<double>(n);
        acc += f.values[i] * std::conj(w.coeffs[m]) * cdouble(std::cos(phase), std::sin(phase));
    }
    return acc;
}

MeasurementSet simulate_1d(const ComplexGrid& f, const Window& w, const ShiftSet& shifts,
                           std::int64_t max_freq) {
    if (f.ndims != 1) throw Error(ErrorKind::invalid_argument, "simulate_1d expects a 1D grid");
    const std::int64_t n = f.extent;
    if (w.ambient_n != n || shifts.ambient_n != n)
        throw Error(ErrorKind::invalid_argument, "grid, window and shifts disagree on N");
    if (max_freq < 0 || max_freq > n - 1)
        throw Error(ErrorKind::invalid_argument, "max frequency must lie in [0, N-1]");
    const std::int64_t s = w.support;
    const Eigen::MatrixXcd tw = twiddle_table(n, s, max_freq);

    MeasurementSet ms;
    ms.ndims = 1;
    ms.shifts[0] = shifts;
    ms.max_freq[0] = max_freq;
    ms.values = VectorXd::Zero(ms.expected_size());
    for (std::int64_t pos = 0; pos < shifts.count(); ++pos) {
        const std::int64_t l = shifts.offsets[pos];
        for (std::int64_t k = 0; k <= max_freq; ++k) {
            cdouble acc(0.0, 0.0);
            for (std::int64_t m = 0; m < s; ++m)
                acc += f.values[(l + m) % n] * std::conj(w.coeffs[m]) * tw(k, m);
            ms.values[measurement_index(pos, k, max_freq, shifts.count())] = std::norm(acc);
        }
    }
    return ms;
}

MeasurementSet simulate_2d(const ComplexGrid& f, const Window2D& w, const ShiftSet& shifts,
                           std::int64_t max_freq) {
    if (f.ndims != 2) throw Error(ErrorKind::invalid_argument, "simulate_2d expects a 2D grid");
    const std::int64_t n = f.extent;
    if (w.u.ambient_n != n || w.v.ambient_n != n || shifts.ambient_n != n)
        throw Error(ErrorKind::invalid_argument, "grid, window and shifts disagree on N");
    if (w.u.support != w.v.support)
        throw Error(ErrorKind::invalid_argument, "2D window factors must share the support");
    if (max_freq < 0 || max_freq > n - 1)
        throw Error(ErrorKind::invalid_argument, "max frequency must lie in [0, N-1]");
    const std::int64_t s = w.u.support;
    const std::int64_t kk = max_freq + 1;
    const Eigen::MatrixXcd tw = twiddle_table(n, s, max_freq);

    MeasurementSet ms;
    ms.ndims = 2;
    ms.shifts[0] = shifts;
    ms.shifts[1] = shifts;
    ms.max_freq[0] = max_freq;
    ms.max_freq[1] = max_freq;
    const std::int64_t d2 = ms.dim_count(1);
    ms.values = VectorXd::Zero(ms.expected_size());

    // W(a,b) = u(a) conj(v(b)), so conj(W) contributes conj(u(m1)) v(m2):
    //   A(l,k) = sum_{m1,m2} F(l1+m1, l2+m2) conj(u(m1)) v(m2) tw(k1,m1) tw(k2,m2)
    // evaluated per shift pair through an s x (K+1) partial table over m2.
    Eigen::MatrixXcd partial(s, kk);
    for (std::int64_t p1 = 0; p1 < shifts.count(); ++p1) {
        const std::int64_t l1 = shifts.offsets[p1];
        for (std::int64_t p2 = 0; p2 < shifts.count(); ++p2) {
            const std::int64_t l2 = shifts.offsets[p2];
            for (std::int64_t m1 = 0; m1 < s; ++m1) {
                const std::int64_t r = (l1 + m1) % n;
                for (std::int64_t k2 = 0; k2 < kk; ++k2) {
                    cdouble acc(0.0, 0.0);
                    for (std::int64_t m2 = 0; m2 < s; ++m2)
                        acc += f.at(r, (l2 + m2) % n) * w.v.coeffs[m2] * tw(k2, m2);
                    partial(m1, k2) = acc;
                }
            }
            for (std::int64_t k1 = 0; k1 < kk; ++k1)
                for (std::int64_t k2 = 0; k2 < kk; ++k2) {
                    cdouble acc(0.0, 0.0);
                    for (std::int64_t m1 = 0; m1 < s; ++m1)
                        acc += std::conj(w.u.coeffs[m1]) * tw(k1, m1) * partial(m1, k2);
                    const std::int64_t a1 = measurement_index(p1, k1, max_freq, shifts.count());
                    const std::int64_t a2 = measurement_index(p2, k2, max_freq, shifts.count());
                    ms.values[a1 * d2 + a2] = std::norm(acc);
                }
        }
    }
    return ms;
}

} // namespace ptycho
