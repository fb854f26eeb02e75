#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "core/forward.hpp"
#include "core/solver2d.hpp"
#include "oracles.hpp"

using namespace ptycho;

namespace {

// vec of the lifted 2D frame matrix B = a b^* under row-major vectorization
VectorXcd vec_frame(const Window2D& w, const ShiftSet& shifts, std::int64_t max_freq,
                    std::int64_t alpha1, std::int64_t alpha2) {
    const std::int64_t n = w.u.ambient_n;
    const std::int64_t kk = max_freq + 1;
    const VectorXcd a = frame_vector(w.u, alpha1 % kk, shifts.offsets[alpha1 / kk]);
    const VectorXcd b =
        frame_vector(w.v, (n - alpha2 % kk) % n, shifts.offsets[alpha2 / kk]);
    VectorXcd out(n * n);
    for (std::int64_t i = 0; i < n; ++i)
        for (std::int64_t j = 0; j < n; ++j) out[i * n + j] = a[i] * std::conj(b[j]);
    return out;
}

} // namespace

TEST_CASE("hilbert-schmidt inner product equals the vec inner product") {
    std::mt19937_64 rng(1);
    Eigen::MatrixXcd x(4, 4), y(4, 4);
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) {
            x(i, j) = cdouble(oracle::uniform(rng) - 0.5, oracle::uniform(rng) - 0.5);
            y(i, j) = cdouble(oracle::uniform(rng) - 0.5, oracle::uniform(rng) - 0.5);
        }
    cdouble hs(0, 0);
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) hs += std::conj(x(i, j)) * y(i, j);
    VectorXcd vx(16), vy(16);
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) {
            vx[i * 4 + j] = x(i, j); // row-major vectorization
            vy[i * 4 + j] = y(i, j);
        }
    CHECK(std::abs(hs - vx.dot(vy)) < 1e-15);
}

TEST_CASE("factor grams against the brute-force 2D gram") {
    std::mt19937_64 rng(5);
    const std::int64_t n = 6, s = 2, k = 1;
    const Window u = oracle::random_window(rng, n, s);
    const Window v = oracle::random_window(rng, n, s);
    const Window2D w{u, v};
    const ShiftSet shifts = make_shift_set(n, s, 1, ShiftMode::circulant);
    const FactorGrams fg = build_gram_2d(w, shifts, k);
    const Eigen::MatrixXd gu = fg.u.matrix();
    const Eigen::MatrixXd gv = fg.v.matrix();
    const std::int64_t d = fg.u.size();
    double scale = 0.0;
    for (std::int64_t a = 0; a < d; ++a) scale = std::max(scale, gu(a, a) * gv(a, a));
    for (std::int64_t a1 = 0; a1 < d; ++a1)
        for (std::int64_t a2 = 0; a2 < d; ++a2) {
            const VectorXcd va = vec_frame(w, shifts, k, a1, a2);
            for (std::int64_t b1 = 0; b1 < d; ++b1)
                for (std::int64_t b2 = 0; b2 < d; ++b2) {
                    const VectorXcd vb = vec_frame(w, shifts, k, b1, b2);
                    const double ref = static_cast<double>(oracle::gram_entry_ld(va, vb));
                    CHECK(std::abs(gu(a1, b1) * gv(a2, b2) - ref) < 1e-12 * scale);
                }
        }
}

TEST_CASE("equal factors give equal gram matrices") {
    const Window u = gaussian_window(12, 4, 0.95);
    const ShiftSet shifts = make_shift_set(12, 4, 1, ShiftMode::interior);
    const FactorGrams fg = build_gram_2d(Window2D{u, u}, shifts, 5);
    CHECK((fg.u.matrix() - fg.v.matrix()).norm() == 0.0);
    const double diag = std::pow(u.coeffs.squaredNorm(), 2);
    CHECK(fg.u.matrix()(0, 0) * fg.v.matrix()(0, 0) ==
          doctest::Approx(diag * diag).epsilon(1e-12));
}

TEST_CASE("factor-wise tight solve matches the materialized system") {
    std::mt19937_64 rng(9);
    const std::int64_t n = 8, s = 2, k = 2;
    const Window w1 = exponential_window(n, s, 4.0);
    const Window2D w{w1, w1};
    const ShiftSet shifts = make_shift_set(n, s, 1, ShiftMode::circulant);
    const ComplexGrid f = make_grid_2d(n, oracle::random_signal(rng, n * n));
    const MeasurementSet ms = simulate_2d(f, w, shifts, k);
    const FactorGrams fg = build_gram_2d(w, shifts, k);

    const TightSolve2D fast = solve_tight_2d(fg, ms);

    // dense lifted solve of the same spectrally truncated Kronecker system
    const std::int64_t d = fg.u.size();
    MatrixXld big(d * d, d * d);
    for (std::int64_t a1 = 0; a1 < d; ++a1)
        for (std::int64_t a2 = 0; a2 < d; ++a2)
            for (std::int64_t b1 = 0; b1 < d; ++b1)
                for (std::int64_t b2 = 0; b2 < d; ++b2)
                    big(a1 * d + a2, b1 * d + b2) = fg.u.G(a1, b1) * fg.v.G(a2, b2);
    const SpectralSolver<long double> dense(big);
    const VectorXld y = ms.values.cast<long double>();
    const VectorXld c = dense.solve(y);
    double worst = 0.0;
    for (std::int64_t i = 0; i < d * d; ++i)
        worst = std::max(worst, std::abs(fast.coefficients(i / d, i % d) -
                                         static_cast<double>(c[i])));
    CHECK(worst <= 1e-10 * std::max(1.0, static_cast<double>(c.norm())));

    const MeasurementSet zeroes{2, {shifts, shifts}, {k, k},
                                VectorXd::Zero(d * d), ""};
    CHECK(solve_tight_2d(fg, zeroes).coefficients.norm() == 0.0);
}

TEST_CASE("separable data solves factor-wise") {
    std::mt19937_64 rng(13);
    const std::int64_t n = 8, s = 3, k = 2;
    const Window w1 = gaussian_window(n, s, 0.95);
    const ShiftSet shifts = make_shift_set(n, s, 1, ShiftMode::interior);
    const FactorGrams fg = build_gram_2d(Window2D{w1, w1}, shifts, k);
    const std::int64_t d = fg.u.size();
    VectorXd y1(d), y2(d);
    for (std::int64_t i = 0; i < d; ++i) {
        y1[i] = oracle::uniform(rng);
        y2[i] = oracle::uniform(rng);
    }
    MeasurementSet ms;
    ms.ndims = 2;
    ms.shifts[0] = ms.shifts[1] = shifts;
    ms.max_freq[0] = ms.max_freq[1] = k;
    ms.values.resize(d * d);
    for (std::int64_t a = 0; a < d; ++a)
        for (std::int64_t b = 0; b < d; ++b) ms.values[a * d + b] = y1[a] * y2[b];
    const TightSolve2D ts = solve_tight_2d(fg, ms);
    const VectorXld c1 = fg.u.solver.solve(y1.cast<long double>());
    const VectorXld c2 = fg.v.solver.solve(y2.cast<long double>());
    for (std::int64_t a = 0; a < d; ++a)
        for (std::int64_t b = 0; b < d; ++b)
            CHECK(ts.coefficients(a, b) ==
                  doctest::Approx(static_cast<double>(c1[a] * c2[b]))
                      .epsilon(1e-9));
}

TEST_CASE("2D expansion of a basis coefficient is rank one") {
    std::mt19937_64 rng(17);
    const std::int64_t n = 6, s = 2, k = 1;
    const Window u = oracle::random_window(rng, n, s);
    const Window v = oracle::random_window(rng, n, s);
    const Window2D w{u, v};
    const ShiftSet shifts = make_shift_set(n, s, 1, ShiftMode::circulant);
    const std::int64_t d = shifts.count() * (k + 1);
    Eigen::MatrixXd c = Eigen::MatrixXd::Zero(d, d);
    const std::int64_t pick1 = 3, pick2 = 7;
    c(pick1, pick2) = 1.0;
    const LiftedSolution z = expand_to_band_2d(c, w, shifts, k);
    const VectorXcd vb = vec_frame(w, shifts, k, pick1, pick2);
    const Eigen::MatrixXcd expected = vb * vb.adjoint();
    double worst = 0.0;
    for (std::int64_t i = 0; i < z.Z.dim; ++i)
        for (std::int64_t p = z.Z.row_ptr[i]; p < z.Z.row_ptr[i + 1]; ++p)
            worst = std::max(worst, std::abs(z.Z.val[p] - expected(i, z.Z.col[p])));
    CHECK(worst < 1e-12 * expected.norm());
    const double trace = oracle::band_to_dense(z.Z).trace().real();
    CHECK(trace == doctest::Approx(u.coeffs.squaredNorm() * v.coeffs.squaredNorm())
                       .epsilon(1e-12));
}

TEST_CASE("2D expansion stays Hermitian with bounded fill") {
    std::mt19937_64 rng(19);
    const std::int64_t n = 16, s = 4, k = 3;
    const Window w1 = gaussian_window(n, s, 0.99);
    const Window2D w{w1, w1};
    const ShiftSet shifts = make_shift_set(n, s, 1, ShiftMode::circulant);
    const std::int64_t d = shifts.count() * (k + 1);
    Eigen::MatrixXd c(d, d);
    for (std::int64_t i = 0; i < d; ++i)
        for (std::int64_t j = 0; j < d; ++j) c(i, j) = oracle::uniform(rng) - 0.5;
    const LiftedSolution z = expand_to_band_2d(c, w, shifts, k);
    CHECK(z.Z.nnz() <= n * n * (2 * s - 1) * (2 * s - 1));
    for (std::int64_t i = 0; i < z.Z.dim; ++i)
        for (std::int64_t p = z.Z.row_ptr[i]; p < z.Z.row_ptr[i + 1]; ++p) {
            const cdouble mirrored = z.Z.get(z.Z.col[p], i);
            CHECK(z.Z.val[p].real() == mirrored.real());
            CHECK(z.Z.val[p].imag() == -mirrored.imag());
        }
}

TEST_CASE("2D pattern solve equals the generic masked least squares") {
    std::mt19937_64 rng(23);
    const std::int64_t n = 6, s = 2, k = 1;
    const Window w1 = gaussian_window(n, s, 0.95);
    const Window2D w{w1, w1};
    const ShiftSet shifts = make_shift_set(n, s, 2, ShiftMode::interior);
    const ComplexGrid f = make_grid_2d(n, oracle::random_signal(rng, n * n));
    const MeasurementSet ms = simulate_2d(f, w, shifts, k);
    const LiftedSolution fast = solve_pattern_2d(w, shifts, k, ms);

    // generic route: assemble the full measurement matrix over the product
    // mask, solve the normal equations through the same spectral cutoff
    const BandMask mask = make_band_mask(shifts);
    const std::int64_t m1 = mask.count();
    const std::int64_t d = shifts.count() * (k + 1);
    Eigen::MatrixXcd a(d * d, m1 * m1);
    for (std::int64_t a1 = 0; a1 < d; ++a1)
        for (std::int64_t a2 = 0; a2 < d; ++a2) {
            const VectorXcd vb = vec_frame(w, shifts, k, a1, a2);
            for (std::int64_t p = 0; p < m1; ++p)
                for (std::int64_t q = 0; q < m1; ++q) {
                    const std::int64_t i =
                        mask.pairs[p].first * n + mask.pairs[q].first;
                    const std::int64_t j =
                        mask.pairs[p].second * n + mask.pairs[q].second;
                    a(a1 * d + a2, p * m1 + q) = std::conj(vb[i] * std::conj(vb[j]));
                }
        }
    const Eigen::MatrixXcd h = a.adjoint() * a;
    const VectorXcd rhs = a.adjoint() * ms.values.cast<cdouble>();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> eig(h);
    const VectorXd ev = eig.eigenvalues().cwiseMax(0.0);
    const double cutoff = kSpectralCutoff * ev.maxCoeff();
    VectorXcd t = eig.eigenvectors().adjoint() * rhs;
    for (std::int64_t i = 0; i < t.size(); ++i)
        t[i] = ev[i] > cutoff ? t[i] / ev[i] : cdouble(0, 0);
    const VectorXcd zref = eig.eigenvectors() * t;

    double worst = 0.0;
    for (std::int64_t p = 0; p < m1; ++p)
        for (std::int64_t q = 0; q < m1; ++q) {
            const std::int64_t i = mask.pairs[p].first * n + mask.pairs[q].first;
            const std::int64_t j = mask.pairs[p].second * n + mask.pairs[q].second;
            const std::int64_t pt = mask.find(mask.pairs[p].second, mask.pairs[p].first);
            const std::int64_t qt = mask.find(mask.pairs[q].second, mask.pairs[q].first);
            cdouble sym =
                0.5 * (zref[p * m1 + q] + std::conj(zref[pt * m1 + qt]));
            if (i == j) sym = cdouble(std::max(sym.real(), 0.0), 0.0);
            worst = std::max(worst, std::abs(fast.Z.get(i, j) - sym));
        }
    CHECK(worst < 1e-10 * fast.Z.val.norm());
}

TEST_CASE("end-to-end 2D reconstruction in the exact regime") {
    std::mt19937_64 rng(29);
    const std::int64_t n = 16, s = 4, k = 2 * s - 2;
    const Window w1 = exponential_window(n, s, 4.0);
    const Window2D w{w1, w1};
    const ShiftSet shifts = make_shift_set(n, s, 1, ShiftMode::circulant);
    for (int trial = 0; trial < 2; ++trial) {
        const ComplexGrid f = make_grid_2d(n, oracle::random_signal(rng, n * n));
        const MeasurementSet ms = simulate_2d(f, w, shifts, k);
        const ReconstructionResult res = reconstruct_2d(ms, w);
        CHECK(res.sync.components == 1);
        CHECK(res.estimate.ndims == 2);
        CHECK(res.estimate.extent == n);
        const double err =
            oracle::phase_aligned_distance(f.values, res.estimate.values) / f.values.norm();
        CHECK(err < 1e-6);
    }
}

TEST_CASE("stride equal to the support breaks recovery visibly") {
    std::mt19937_64 rng(31);
    const std::int64_t n = 16, s = 4, k = 2 * s - 2;
    const Window w1 = gaussian_window(n, s, 0.99);
    const Window2D w{w1, w1};
    const ShiftSet shifts = make_shift_set(n, s, s, ShiftMode::interior);
    const ComplexGrid f = make_grid_2d(n, oracle::random_signal(rng, n * n));
    const MeasurementSet ms = simulate_2d(f, w, shifts, k);
    const ReconstructionResult res = reconstruct_2d(ms, w);
    CHECK(res.sync.components > 1);
    CHECK(res.warnings.size() >= 1);
}

TEST_CASE("end-to-end global phase invariance of the error") {
    std::mt19937_64 rng(37);
    const std::int64_t n = 8, s = 2, k = 2;
    const Window w1 = exponential_window(n, s, 4.0);
    const Window2D w{w1, w1};
    const ShiftSet shifts = make_shift_set(n, s, 1, ShiftMode::circulant);
    const ComplexGrid f = make_grid_2d(n, oracle::random_signal(rng, n * n));
    ComplexGrid g = f;
    g.values *= cdouble(std::cos(0.9), std::sin(0.9));
    const ReconstructionResult a = reconstruct_2d(simulate_2d(f, w, shifts, k), w);
    const ReconstructionResult b = reconstruct_2d(simulate_2d(g, w, shifts, k), w);
    const double ea =
        oracle::phase_aligned_distance(f.values, a.estimate.values) / f.values.norm();
    const double eb =
        oracle::phase_aligned_distance(g.values, b.estimate.values) / g.values.norm();
    CHECK(ea == doctest::Approx(eb).epsilon(1e-6));
}
