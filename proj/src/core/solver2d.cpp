#include "core/solver2d.hpp"

#include <chrono>
#include <cmath>
#include <numbers>

#include "core/sync.hpp"

namespace ptycho {

namespace {

using cld = std::complex<long double>;

void check_geometry_2d(const Window2D& w, const ShiftSet& shifts, std::int64_t max_freq) {
    if (w.u.ambient_n != w.v.ambient_n || w.u.support != w.v.support)
        throw Error(ErrorKind::invalid_argument, "2D window factors must share N and s");
    if (w.u.ambient_n != shifts.ambient_n || w.u.support != shifts.support)
        throw Error(ErrorKind::invalid_argument, "window and shifts disagree on the geometry");
    if (max_freq < 0 || max_freq > w.u.ambient_n - 1)
        throw Error(ErrorKind::invalid_argument, "max frequency must lie in [0, N-1]");
}

// start position of row i inside the lexicographically sorted mask pairs
std::vector<std::int64_t> mask_row_starts(const BandMask& mask) {
    std::vector<std::int64_t> start(mask.dim + 1, 0);
    for (const auto& [i, j] : mask.pairs) ++start[i + 1];
    for (std::int64_t i = 0; i < mask.dim; ++i) start[i + 1] += start[i];
    return start;
}

// e^{sign * 2 pi i k d / N} tables with exact conjugate symmetry in d
MatrixXcld factor_twiddles(std::int64_t n, std::int64_t s, std::int64_t max_freq, int sign) {
    MatrixXcld t(max_freq + 1, s);
    const long double two_pi = 2.0L * std::numbers::pi_v<long double>;
    for (std::int64_t k = 0; k <= max_freq; ++k)
        for (std::int64_t d = 0; d < s; ++d) {
            const long double phase = (sign >= 0 ? 1.0L : -1.0L) * two_pi *
                                      static_cast<long double>(k) * static_cast<long double>(d) /
                                      static_cast<long double>(n);
            t(k, d) = cld(std::cos(phase), std::sin(phase));
        }
    return t;
}

VectorXcld coeffs_ld(const Window& w) {
    VectorXcld c(w.support);
    for (std::int64_t i = 0; i < w.support; ++i)
        c[i] = cld(w.coeffs[i].real(), w.coeffs[i].imag());
    return c;
}

} // namespace

FactorGrams build_gram_2d(const Window2D& w, const ShiftSet& shifts, std::int64_t max_freq) {
    check_geometry_2d(w, shifts, max_freq);
    FactorGrams fg;
    fg.u = build_gram(w.u, shifts, max_freq, +1);
    fg.v = build_gram(w.v, shifts, max_freq, -1);
    return fg;
}

TightSolve2D solve_tight_2d(const FactorGrams& grams, const MeasurementSet& ms) {
    if (ms.ndims != 2)
        throw Error(ErrorKind::invalid_argument, "solve_tight_2d expects 2D measurements");
    const std::int64_t d1 = grams.u.size();
    const std::int64_t d2 = grams.v.size();
    if (ms.values.size() != d1 * d2)
        throw Error(ErrorKind::invalid_argument, "measurement count does not match the Gram factors");

    MatrixXld y(d1, d2);
    for (std::int64_t a = 0; a < d1; ++a)
        for (std::int64_t b = 0; b < d2; ++b)
            y(a, b) = static_cast<long double>(ms.values[a * d2 + b]);

    MatrixXld c(d1, d2);
    for (std::int64_t b = 0; b < d2; ++b) c.col(b) = grams.u.solver.solve(y.col(b));
    for (std::int64_t a = 0; a < d1; ++a)
        c.row(a) = grams.v.solver.solve(c.row(a).transpose()).transpose();

    TightSolve2D out;
    out.coefficients = c.cast<double>();
    out.diagnostics.dimension = d1 * d2;
    out.diagnostics.rank = grams.u.solver.rank() * grams.v.solver.rank();
    out.diagnostics.cutoff = std::max(grams.u.solver.cutoff(), grams.v.solver.cutoff());
    const long double ynorm = y.norm();
    if (ynorm > 0.0L) {
        const MatrixXld r = grams.u.G * c * grams.v.G - y;
        out.diagnostics.residual = static_cast<double>(r.norm() / ynorm);
    }
    return out;
}

LiftedSolution expand_to_band_2d(const Eigen::MatrixXd& coefficients, const Window2D& w,
                                 const ShiftSet& shifts, std::int64_t max_freq) {
    check_geometry_2d(w, shifts, max_freq);
    const std::int64_t n = w.u.ambient_n;
    const std::int64_t s = w.u.support;
    const std::int64_t kk = max_freq + 1;
    const std::int64_t d1 = shifts.count() * kk;
    const std::int64_t d2 = d1;
    if (coefficients.rows() != d1 || coefficients.cols() != d2)
        throw Error(ErrorKind::invalid_argument, "coefficient matrix does not match the geometry");

    const BandMask mask = make_band_mask(shifts);
    const std::int64_t m = mask.count();
    const MatrixXcld twu = factor_twiddles(n, s, max_freq, +1);
    const MatrixXcld twv = factor_twiddles(n, s, max_freq, -1);
    const VectorXcld ul = coeffs_ld(w.u);
    const VectorXcld vl = coeffs_ld(w.v);

    // block positions per shift, shared by both dimensions
    std::vector<std::vector<std::int64_t>> block_pos(shifts.count());
    for (std::int64_t p = 0; p < shifts.count(); ++p) {
        const std::int64_t l = shifts.offsets[p];
        block_pos[p].resize(s * s);
        for (std::int64_t a = 0; a < s; ++a)
            for (std::int64_t b = 0; b < s; ++b)
                block_pos[p][a * s + b] = mask.find((l + a) % n, (l + b) % n);
    }

    MatrixXcld zp = MatrixXcld::Zero(m, m);
    VectorXcld e(m);
    MatrixXcld kernel(s, s);
    for (std::int64_t p1 = 0; p1 < shifts.count(); ++p1) {
        for (std::int64_t k1 = 0; k1 < kk; ++k1) {
            const std::int64_t a1 = p1 * kk + k1;
            // stage 1: e = sum_{a2} C[a1,a2] conj(b_{a2} b_{a2}*) restricted to the
            // mask — the row-major vec of B = a b* is a (x) conj(b)
            e.setZero();
            for (std::int64_t p2 = 0; p2 < shifts.count(); ++p2) {
                kernel.setZero();
                for (std::int64_t k2 = 0; k2 < kk; ++k2) {
                    const long double c = static_cast<long double>(coefficients(a1, p2 * kk + k2));
                    if (c == 0.0L) continue;
                    for (std::int64_t a = 0; a < s; ++a)
                        for (std::int64_t b = 0; b < s; ++b) {
                            const std::int64_t d = a - b;
                            const cld tt = d >= 0 ? std::conj(twv(k2, d)) : twv(k2, -d);
                            kernel(a, b) += c * tt;
                        }
                }
                const auto& pos = block_pos[p2];
                for (std::int64_t a = 0; a < s; ++a)
                    for (std::int64_t b = 0; b < s; ++b)
                        e[pos[a * s + b]] += kernel(a, b) * (std::conj(vl[a]) * vl[b]);
            }
            // stage 2: Z'[m1,:] += (a_{a1} a_{a1}*)[m1] * e
            const auto& pos = block_pos[p1];
            for (std::int64_t a = 0; a < s; ++a)
                for (std::int64_t b = 0; b < s; ++b) {
                    const std::int64_t d = a - b;
                    const cld tt = d >= 0 ? twu(k1, d) : std::conj(twu(k1, -d));
                    const cld fac = (ul[a] * std::conj(ul[b])) * tt;
                    zp.row(pos[a * s + b]) += fac * e.transpose();
                }
        }
    }

    // assemble CSR over vec indices; mask rows are contiguous and sorted
    const std::vector<std::int64_t> row_start = mask_row_starts(mask);
    BandMatrix band;
    band.dim = n * n;
    band.row_ptr.assign(band.dim + 1, 0);
    std::int64_t nnz = 0;
    for (std::int64_t i1 = 0; i1 < n; ++i1) {
        const std::int64_t r1 = row_start[i1 + 1] - row_start[i1];
        for (std::int64_t i2 = 0; i2 < n; ++i2) {
            const std::int64_t r2 = row_start[i2 + 1] - row_start[i2];
            nnz += r1 * r2;
            band.row_ptr[i1 * n + i2 + 1] = nnz;
        }
    }
    band.col.resize(nnz);
    band.val.resize(nnz);
    std::int64_t q = 0;
    for (std::int64_t i1 = 0; i1 < n; ++i1)
        for (std::int64_t i2 = 0; i2 < n; ++i2)
            for (std::int64_t p1 = row_start[i1]; p1 < row_start[i1 + 1]; ++p1)
                for (std::int64_t p2 = row_start[i2]; p2 < row_start[i2 + 1]; ++p2) {
                    const std::int64_t j1 = mask.pairs[p1].second;
                    const std::int64_t j2 = mask.pairs[p2].second;
                    const cld z = zp(p1, p2);
                    band.col[q] = j1 * n + j2;
                    if (i1 == j1 && i2 == j2)
                        band.val[q] = cdouble(std::max(static_cast<double>(z.real()), 0.0), 0.0);
                    else
                        band.val[q] =
                            cdouble(static_cast<double>(z.real()), static_cast<double>(z.imag()));
                    ++q;
                }

    LiftedSolution out;
    out.Z = std::move(band);
    out.diagnostics.dimension = d1 * d2;
    return out;
}

LiftedSolution solve_pattern_2d(const Window2D& w, const ShiftSet& shifts,
                                std::int64_t max_freq, const MeasurementSet& ms) {
    check_geometry_2d(w, shifts, max_freq);
    if (ms.ndims != 2)
        throw Error(ErrorKind::invalid_argument, "solve_pattern_2d expects 2D measurements");
    const std::int64_t n = w.u.ambient_n;
    const std::int64_t s = w.u.support;
    const std::int64_t kk = max_freq + 1;
    const std::int64_t d1 = shifts.count() * kk;
    const std::int64_t d2 = d1;
    if (ms.values.size() != d1 * d2)
        throw Error(ErrorKind::invalid_argument, "measurement count does not match the geometry");

    const BandMask mask = make_band_mask(shifts);
    const std::int64_t m = mask.count();

    // sparse rows of the per-factor measurement matrices; the lifted frame
    // matrix factors as (a a*) (x) conj(b b*), so
    //   P_u[a,(i,j)] = conj(u(a)) u(b) e^{-2 pi i k (a-b)/N}  on the shift block
    //   P_v[a,(i,j)] = v(a) conj(v(b)) e^{-2 pi i k (a-b)/N}
    const double two_pi = 2.0 * std::numbers::pi;
    std::vector<std::vector<std::int64_t>> block_pos(shifts.count());
    for (std::int64_t p = 0; p < shifts.count(); ++p) {
        const std::int64_t l = shifts.offsets[p];
        block_pos[p].resize(s * s);
        for (std::int64_t a = 0; a < s; ++a)
            for (std::int64_t b = 0; b < s; ++b)
                block_pos[p][a * s + b] = mask.find((l + a) % n, (l + b) % n);
    }
    Eigen::MatrixXcd pu_rows(d1, s * s), pv_rows(d2, s * s);
    for (std::int64_t p = 0; p < shifts.count(); ++p)
        for (std::int64_t k = 0; k < kk; ++k) {
            const std::int64_t alpha = p * kk + k;
            for (std::int64_t a = 0; a < s; ++a)
                for (std::int64_t b = 0; b < s; ++b) {
                    const double phase = two_pi * static_cast<double>(k) *
                                         static_cast<double>(b - a) / static_cast<double>(n);
                    const cdouble e(std::cos(phase), std::sin(phase));
                    pu_rows(alpha, a * s + b) = std::conj(w.u.coeffs[a]) * w.u.coeffs[b] * e;
                    pv_rows(alpha, a * s + b) = w.v.coeffs[a] * std::conj(w.v.coeffs[b]) * e;
                }
        }

    auto normal_matrix = [&](const Eigen::MatrixXcd& rows) {
        Eigen::MatrixXcd h = Eigen::MatrixXcd::Zero(m, m);
        for (std::int64_t p = 0; p < shifts.count(); ++p) {
            const auto& pos = block_pos[p];
            for (std::int64_t k = 0; k < kk; ++k) {
                const std::int64_t alpha = p * kk + k;
                for (std::int64_t i = 0; i < s * s; ++i) {
                    const cdouble ci = std::conj(rows(alpha, i));
                    for (std::int64_t j = 0; j < s * s; ++j)
                        h(pos[i], pos[j]) += ci * rows(alpha, j);
                }
            }
        }
        return h;
    };
    const Eigen::MatrixXcd hu = normal_matrix(pu_rows);
    const Eigen::MatrixXcd hvc = normal_matrix(pv_rows).conjugate();

    Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>> y(
        ms.values.data(), d1, d2);

    // R = P_u^H Y conj(P_v)
    Eigen::MatrixXcd t = Eigen::MatrixXcd::Zero(m, d2);
    for (std::int64_t p = 0; p < shifts.count(); ++p) {
        const auto& pos = block_pos[p];
        for (std::int64_t k = 0; k < kk; ++k) {
            const std::int64_t alpha = p * kk + k;
            for (std::int64_t i = 0; i < s * s; ++i)
                t.row(pos[i]) += std::conj(pu_rows(alpha, i)) * y.row(alpha);
        }
    }
    Eigen::MatrixXcd r = Eigen::MatrixXcd::Zero(m, m);
    for (std::int64_t p = 0; p < shifts.count(); ++p) {
        const auto& pos = block_pos[p];
        for (std::int64_t k = 0; k < kk; ++k) {
            const std::int64_t alpha = p * kk + k;
            for (std::int64_t i = 0; i < s * s; ++i)
                r.col(pos[i]) += std::conj(pv_rows(alpha, i)) * t.col(alpha);
        }
    }

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> eu(hu), ev(hvc);
    if (eu.info() != Eigen::Success || ev.info() != Eigen::Success)
        throw Error(ErrorKind::numeric, "eigendecomposition of the pattern normal equations failed");
    const VectorXd wu = eu.eigenvalues().cwiseMax(0.0);
    const VectorXd wv = ev.eigenvalues().cwiseMax(0.0);
    const double cutoff = kSpectralCutoff * wu.maxCoeff() * wv.maxCoeff();

    Eigen::MatrixXcd ww = eu.eigenvectors().adjoint() * r * ev.eigenvectors();
    std::int64_t rank = 0;
    for (std::int64_t p = 0; p < m; ++p)
        for (std::int64_t q2 = 0; q2 < m; ++q2) {
            const double lam = wu[p] * wv[q2];
            if (lam > cutoff) {
                ww(p, q2) /= lam;
                ++rank;
            } else {
                ww(p, q2) = cdouble(0.0, 0.0);
            }
        }
    Eigen::MatrixXcd zp = eu.eigenvectors() * ww * ev.eigenvectors().adjoint();

    // Hermitian update and clamping at the product level
    std::vector<std::int64_t> transpose_pos(m);
    for (std::int64_t p = 0; p < m; ++p)
        transpose_pos[p] = mask.find(mask.pairs[p].second, mask.pairs[p].first);
    Eigen::MatrixXcd zs(m, m);
    for (std::int64_t p = 0; p < m; ++p)
        for (std::int64_t q2 = 0; q2 < m; ++q2)
            zs(p, q2) = 0.5 * (zp(p, q2) + std::conj(zp(transpose_pos[p], transpose_pos[q2])));

    const std::vector<std::int64_t> row_start = mask_row_starts(mask);
    BandMatrix band;
    band.dim = n * n;
    band.row_ptr.assign(band.dim + 1, 0);
    std::int64_t nnz = 0;
    for (std::int64_t i1 = 0; i1 < n; ++i1)
        for (std::int64_t i2 = 0; i2 < n; ++i2) {
            nnz += (row_start[i1 + 1] - row_start[i1]) * (row_start[i2 + 1] - row_start[i2]);
            band.row_ptr[i1 * n + i2 + 1] = nnz;
        }
    band.col.resize(nnz);
    band.val.resize(nnz);
    std::int64_t q = 0;
    for (std::int64_t i1 = 0; i1 < n; ++i1)
        for (std::int64_t i2 = 0; i2 < n; ++i2)
            for (std::int64_t p1 = row_start[i1]; p1 < row_start[i1 + 1]; ++p1)
                for (std::int64_t p2 = row_start[i2]; p2 < row_start[i2 + 1]; ++p2) {
                    const std::int64_t j1 = mask.pairs[p1].second;
                    const std::int64_t j2 = mask.pairs[p2].second;
                    band.col[q] = j1 * n + j2;
                    const cdouble z = zs(p1, p2);
                    band.val[q] = (i1 == j1 && i2 == j2)
                                      ? cdouble(std::max(z.real(), 0.0), 0.0)
                                      : z;
                    ++q;
                }

    LiftedSolution out;
    out.Z = std::move(band);
    out.diagnostics.dimension = m * m;
    out.diagnostics.rank = rank;
    out.diagnostics.cutoff = cutoff;
    const double ynorm = y.norm();
    if (ynorm > 0.0) {
        // forward apply of the un-symmetrized solution
        Eigen::MatrixXcd t2 = Eigen::MatrixXcd::Zero(d1, m);
        for (std::int64_t p = 0; p < shifts.count(); ++p) {
            const auto& pos = block_pos[p];
            for (std::int64_t k = 0; k < kk; ++k) {
                const std::int64_t alpha = p * kk + k;
                for (std::int64_t i = 0; i < s * s; ++i)
                    t2.row(alpha) += pu_rows(alpha, i) * zp.row(pos[i]);
            }
        }
        Eigen::MatrixXcd yhat = Eigen::MatrixXcd::Zero(d1, d2);
        for (std::int64_t p = 0; p < shifts.count(); ++p) {
            const auto& pos = block_pos[p];
            for (std::int64_t k = 0; k < kk; ++k) {
                const std::int64_t alpha = p * kk + k;
                for (std::int64_t i = 0; i < s * s; ++i)
                    yhat.col(alpha) += pv_rows(alpha, i) * t2.col(pos[i]);
            }
        }
        out.diagnostics.residual = (yhat - y.cast<cdouble>()).norm() / ynorm;
    }
    return out;
}

ReconstructionResult reconstruct_2d(const MeasurementSet& ms, const Window2D& w,
                                    const ReconstructOptions& options) {
    if (ms.ndims != 2)
        throw Error(ErrorKind::invalid_argument, "reconstruct_2d expects 2D measurements");
    const ShiftSet& shifts = ms.shifts[0];
    const std::int64_t max_freq = ms.max_freq[0];
    const std::int64_t n = shifts.ambient_n;

    const auto t0 = std::chrono::steady_clock::now();
    LiftedSolution lifted;
    if (options.projector == Projector::tight) {
        FactorGrams grams = build_gram_2d(w, shifts, max_freq);
        TightSolve2D ts = solve_tight_2d(grams, ms);
        lifted = expand_to_band_2d(ts.coefficients, w, shifts, max_freq);
        lifted.diagnostics = ts.diagnostics;
    } else {
        lifted = solve_pattern_2d(w, shifts, max_freq, ms);
    }
    const auto t1 = std::chrono::steady_clock::now();

    const bool stabilized = options.degree_norm == DegreeNorm::on ||
                            (options.degree_norm == DegreeNorm::automatic &&
                             !shifts.full_circulant());
    SyncResult sync = synchronize(lifted.Z, stabilized, options.band_threshold,
                                  options.sync_tol, options.sync_max_iter);
    const auto t2 = std::chrono::steady_clock::now();

    ReconstructionResult res;
    res.estimate = make_grid_2d(n, std::move(sync.estimate));
    res.solve = lifted.diagnostics;
    res.sync = sync.diagnostics;
    res.solve_seconds = std::chrono::duration<double>(t1 - t0).count();
    res.sync_seconds = std::chrono::duration<double>(t2 - t1).count();
    res.warnings = std::move(sync.warnings);
    return res;
}

} // namespace ptycho
