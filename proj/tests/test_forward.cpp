#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <numbers>
#include <random>

#include "core/forward.hpp"
#include "oracles.hpp"

using namespace ptycho;

namespace {

MeasurementSet simulate_ref(const ComplexGrid& f, const Window& w, const ShiftSet& shifts,
                            std::int64_t max_freq) {
    MeasurementSet ms;
    ms.ndims = 1;
    ms.shifts[0] = shifts;
    ms.max_freq[0] = max_freq;
    ms.values = VectorXd::Zero(ms.expected_size());
    for (std::int64_t pos = 0; pos < shifts.count(); ++pos)
        for (std::int64_t k = 0; k <= max_freq; ++k) {
            const auto v = oracle::stft_ld(f.values, w.coeffs, f.extent, shifts.offsets[pos], k);
            ms.values[measurement_index(pos, k, max_freq, shifts.count())] =
                static_cast<double>(std::norm(v));
        }
    return ms;
}

} // namespace

TEST_CASE("zero object gives zero measurements") {
    const Window w = exponential_window(8, 3, 4.0);
    const ShiftSet shifts = make_shift_set(8, 3, 1, ShiftMode::circulant);
    const ComplexGrid f = make_grid_1d(VectorXcd::Zero(8));
    const MeasurementSet ms = simulate_1d(f, w, shifts, 5);
    CHECK(ms.values.maxCoeff() == 0.0);
    for (std::int64_t l = 0; l < 8; ++l)
        CHECK(brute_force_stft(f, w, l, 3) == cdouble(0, 0));
}

TEST_CASE("point objects probe the window directly") {
    const std::int64_t n = 12, s = 4, n0 = 5;
    std::mt19937_64 rng(3);
    const Window w = oracle::random_window(rng, n, s);
    VectorXcd delta = VectorXcd::Zero(n);
    const cdouble c(0.8, -0.3);
    delta[n0] = c;
    const ComplexGrid f = make_grid_1d(delta);
    const ShiftSet shifts = make_shift_set(n, s, 1, ShiftMode::circulant);
    const MeasurementSet ms = simulate_1d(f, w, shifts, n - 1);
    for (std::int64_t pos = 0; pos < shifts.count(); ++pos) {
        const std::int64_t m = ((n0 - shifts.offsets[pos]) % n + n) % n;
        const double expected = std::norm(c) * std::norm(w.coeffs[m]);
        for (std::int64_t k = 0; k < n; ++k) {
            const double got = ms.values[measurement_index(pos, k, n - 1, shifts.count())];
            CHECK(got == doctest::Approx(expected).epsilon(1e-13)); // k-independent
        }
    }
}

TEST_CASE("simulation matches the extended-precision oracle") {
    std::mt19937_64 rng(17);
    for (const std::int64_t n : {8LL, 16LL, 32LL}) {
        const std::int64_t s = 2 + static_cast<std::int64_t>(oracle::uniform(rng) * (n / 2 - 2));
        const Window w = oracle::random_window(rng, n, s);
        const ComplexGrid f = make_grid_1d(oracle::random_signal(rng, n));
        for (const ShiftMode mode : {ShiftMode::circulant, ShiftMode::interior}) {
            const ShiftSet shifts = make_shift_set(n, s, 1, mode);
            const std::int64_t k = n - 1;
            const MeasurementSet got = simulate_1d(f, w, shifts, k);
            const MeasurementSet ref = simulate_ref(f, w, shifts, k);
            const double scale = ref.values.maxCoeff();
            for (Eigen::Index i = 0; i < got.values.size(); ++i)
                CHECK(std::abs(got.values[i] - ref.values[i]) < 1e-12 * scale);
        }
    }
}

TEST_CASE("measurements scale quadratically") {
    std::mt19937_64 rng(21);
    const std::int64_t n = 16, s = 5;
    const Window w = oracle::random_window(rng, n, s);
    const ComplexGrid f = make_grid_1d(oracle::random_signal(rng, n));
    const ShiftSet shifts = make_shift_set(n, s, 2, ShiftMode::interior);
    const cdouble c(1.3, -0.4);
    ComplexGrid cf = f;
    cf.values *= c;
    const MeasurementSet base = simulate_1d(f, w, shifts, 7);
    const MeasurementSet scaled = simulate_1d(cf, w, shifts, 7);
    for (Eigen::Index i = 0; i < base.values.size(); ++i)
        CHECK(scaled.values[i] ==
              doctest::Approx(std::norm(c) * base.values[i]).epsilon(1e-12));
}

TEST_CASE("global phase invariance") {
    std::mt19937_64 rng(22);
    const std::int64_t n = 16, s = 5;
    const Window w = oracle::random_window(rng, n, s);
    const ComplexGrid f = make_grid_1d(oracle::random_signal(rng, n));
    const ShiftSet shifts = make_shift_set(n, s, 1, ShiftMode::interior);
    const MeasurementSet base = simulate_1d(f, w, shifts, 9);

    // multiplication by i is exact in IEEE arithmetic: bitwise equality
    ComplexGrid rot = f;
    rot.values *= cdouble(0.0, 1.0);
    const MeasurementSet quarter = simulate_1d(rot, w, shifts, 9);
    for (Eigen::Index i = 0; i < base.values.size(); ++i)
        CHECK(quarter.values[i] == base.values[i]);

    ComplexGrid rot2 = f;
    rot2.values *= cdouble(std::cos(0.7), std::sin(0.7));
    const MeasurementSet generic = simulate_1d(rot2, w, shifts, 9);
    const double scale = base.values.maxCoeff();
    for (Eigen::Index i = 0; i < base.values.size(); ++i)
        CHECK(std::abs(generic.values[i] - base.values[i]) < 1e-12 * scale);
}

TEST_CASE("Plancherel sum over the full frequency set") {
    std::mt19937_64 rng(25);
    const std::int64_t n = 24, s = 6;
    const Window w = oracle::random_window(rng, n, s);
    const ComplexGrid f = make_grid_1d(oracle::random_signal(rng, n));
    const ShiftSet shifts = make_shift_set(n, s, 1, ShiftMode::circulant);
    const MeasurementSet ms = simulate_1d(f, w, shifts, n - 1);
    for (std::int64_t pos = 0; pos < shifts.count(); ++pos) {
        double lhs = 0.0;
        for (std::int64_t k = 0; k < n; ++k)
            lhs += ms.values[measurement_index(pos, k, n - 1, shifts.count())];
        double rhs = 0.0;
        for (std::int64_t i = 0; i < n; ++i) {
            const std::int64_t m = ((i - shifts.offsets[pos]) % n + n) % n;
            rhs += std::norm(f.values[i]) * std::norm(w.coeffs[m]);
        }
        rhs *= static_cast<double>(n);
        CHECK(lhs == doctest::Approx(rhs).epsilon(1e-10));
    }
}

TEST_CASE("2D simulation against a direct quadruple sum") {
    std::mt19937_64 rng(31);
    const std::int64_t n = 6, s = 2, k = 2;
    const Window u = oracle::random_window(rng, n, s);
    const Window v = oracle::random_window(rng, n, s);
    VectorXcd fv = oracle::random_signal(rng, n * n);
    const ComplexGrid f = make_grid_2d(n, fv);
    const ShiftSet shifts = make_shift_set(n, s, 1, ShiftMode::circulant);
    const MeasurementSet ms = simulate_2d(f, Window2D{u, v}, shifts, k);
    const std::int64_t d2 = ms.dim_count(1);
    const long double two_pi = 2.0L * std::numbers::pi_v<long double>;
    double worst = 0.0;
    for (std::int64_t p1 = 0; p1 < shifts.count(); ++p1)
        for (std::int64_t k1 = 0; k1 <= k; ++k1)
            for (std::int64_t p2 = 0; p2 < shifts.count(); ++p2)
                for (std::int64_t k2 = 0; k2 <= k; ++k2) {
                    oracle::cld acc(0.0L, 0.0L);
                    for (std::int64_t n1 = 0; n1 < n; ++n1)
                        for (std::int64_t n2 = 0; n2 < n; ++n2) {
                            const std::int64_t a = ((n1 - shifts.offsets[p1]) % n + n) % n;
                            const std::int64_t b = ((n2 - shifts.offsets[p2]) % n + n) % n;
                            // W(a,b) = u(a) conj(v(b))
                            const oracle::cld wc(
                                (u.coeffs[a] * std::conj(v.coeffs[b])).real(),
                                (u.coeffs[a] * std::conj(v.coeffs[b])).imag());
                            const long double phase =
                                -two_pi * static_cast<long double>(k1 * n1 + k2 * n2) /
                                static_cast<long double>(n);
                            acc += oracle::cld(f.at(n1, n2).real(), f.at(n1, n2).imag()) *
                                   std::conj(wc) *
                                   oracle::cld(std::cos(phase), std::sin(phase));
                        }
                    const std::int64_t a1 = measurement_index(p1, k1, k, shifts.count());
                    const std::int64_t a2 = measurement_index(p2, k2, k, shifts.count());
                    worst = std::max(worst,
                                     std::abs(ms.values[a1 * d2 + a2] -
                                              static_cast<double>(std::norm(acc))));
                }
    CHECK(worst < 1e-12 * ms.values.maxCoeff());
}

TEST_CASE("2D values match the lifted frame inner products") {
    // pins the modulation-sign convention of the second dimension
    std::mt19937_64 rng(37);
    const std::int64_t n = 8, s = 3, k = 2;
    const Window u = oracle::random_window(rng, n, s);
    const Window v = oracle::random_window(rng, n, s);
    const ComplexGrid f = make_grid_2d(n, oracle::random_signal(rng, n * n));
    const ShiftSet shifts = make_shift_set(n, s, 2, ShiftMode::interior);
    const MeasurementSet ms = simulate_2d(f, Window2D{u, v}, shifts, k);
    const std::int64_t d2 = ms.dim_count(1);
    for (std::int64_t p1 = 0; p1 < shifts.count(); ++p1)
        for (std::int64_t k1 = 0; k1 <= k; ++k1)
            for (std::int64_t p2 = 0; p2 < shifts.count(); ++p2)
                for (std::int64_t k2 = 0; k2 <= k; ++k2) {
                    const VectorXcd a = frame_vector(u, k1, shifts.offsets[p1]);
                    const VectorXcd b = frame_vector(v, (n - k2) % n, shifts.offsets[p2]);
                    cdouble ip(0, 0); // <vec B, vec F> with B = a b^*
                    for (std::int64_t i = 0; i < n; ++i)
                        for (std::int64_t j = 0; j < n; ++j)
                            ip += std::conj(a[i] * std::conj(b[j])) * f.at(i, j);
                    const std::int64_t a1 = measurement_index(p1, k1, k, shifts.count());
                    const std::int64_t a2 = measurement_index(p2, k2, k, shifts.count());
                    CHECK(std::abs(ms.values[a1 * d2 + a2] - std::norm(ip)) <
                          1e-12 * ms.values.maxCoeff());
                }
}

TEST_CASE("separable objects factor into 1D measurements") {
    std::mt19937_64 rng(41);
    const std::int64_t n = 10, s = 3, k = 3;
    const Window u = oracle::random_window(rng, n, s);
    const Window v = oracle::random_window(rng, n, s);
    const VectorXcd f1 = oracle::random_signal(rng, n);
    const VectorXcd f2 = oracle::random_signal(rng, n);
    VectorXcd fv(n * n);
    for (std::int64_t i = 0; i < n; ++i)
        for (std::int64_t j = 0; j < n; ++j) fv[i * n + j] = f1[i] * std::conj(f2[j]);
    const ComplexGrid f = make_grid_2d(n, fv);
    const ShiftSet shifts = make_shift_set(n, s, 1, ShiftMode::circulant);
    const MeasurementSet ms = simulate_2d(f, Window2D{u, v}, shifts, k);
    const std::int64_t d2 = ms.dim_count(1);

    const MeasurementSet y1 = simulate_1d(make_grid_1d(f1), u, shifts, k);
    Window vbar = v;
    vbar.coeffs = v.coeffs.conjugate();
    const MeasurementSet y2 = simulate_1d(make_grid_1d(f2.conjugate()), vbar, shifts, k);
    for (Eigen::Index a1 = 0; a1 < y1.values.size(); ++a1)
        for (Eigen::Index a2 = 0; a2 < y2.values.size(); ++a2)
            CHECK(ms.values[a1 * d2 + a2] ==
                  doctest::Approx(y1.values[a1] * y2.values[a2]).epsilon(1e-12));
}

TEST_CASE("published 2D geometry produces the expected count") {
    MeasurementSet ms;
    ms.ndims = 2;
    ms.shifts[0] = make_shift_set(128, 8, 1, ShiftMode::interior);
    ms.shifts[1] = ms.shifts[0];
    ms.max_freq[0] = ms.max_freq[1] = 15;
    CHECK(ms.shifts[0].count() == 121);
    CHECK(ms.expected_size() == 3748096); // (121*16)^2
}
