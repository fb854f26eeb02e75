#include "core/solver1d.hpp"

#include <chrono>
#include <cmath>
#include <numbers>

#include "core/sync.hpp"

namespace ptycho {

namespace {

using cld = std::complex<long double>;

// <v_a, v_b> depends on the shifts only through (l_b - l_a) mod N, so the
// Gram reduces to a table over the overlapping relative shifts.
struct OverlapTable {
    std::vector<int> slot;   // N entries, -1 when windows never overlap
    std::vector<MatrixXcld> inner; // per slot: (K+1) x (K+1) inner products

    const cld* lookup(std::int64_t delta) const {
        return slot[delta] < 0 ? nullptr : inner[slot[delta]].data();
    }
};

OverlapTable build_overlap_table(const Window& w, std::int64_t max_freq, int freq_sign) {
    const std::int64_t n = w.ambient_n;
    const std::int64_t s = w.support;
    const std::int64_t kk = max_freq + 1;
    const long double two_pi = 2.0L * std::numbers::pi_v<long double>;
    const long double sign = freq_sign >= 0 ? 1.0L : -1.0L;

    VectorXcld wl(s);
    for (std::int64_t i = 0; i < s; ++i)
        wl[i] = cld(w.coeffs[i].real(), w.coeffs[i].imag());

    OverlapTable table;
    table.slot.assign(n, -1);
    for (std::int64_t delta = 0; delta < n; ++delta) {
        // windows at 0 and delta share support only for |delta mod N| < s
        if (delta >= s && delta <= n - s) continue;
        MatrixXcld inner = MatrixXcld::Zero(kk, kk);
        for (std::int64_t m = 0; m < s; ++m) {
            const std::int64_t mb = ((m - delta) % n + n) % n;
            if (mb >= s) continue;
            const cld base = std::conj(wl[m]) * wl[mb];
            for (std::int64_t ka = 0; ka < kk; ++ka)
                for (std::int64_t kb = 0; kb < kk; ++kb) {
                    const long double phase = sign * two_pi *
                                              static_cast<long double>(kb * mb - ka * m) /
                                              static_cast<long double>(n);
                    inner(ka, kb) += base * cld(std::cos(phase), std::sin(phase));
                }
        }
        table.slot[delta] = static_cast<int>(table.inner.size());
        table.inner.push_back(std::move(inner));
    }
    return table;
}

// e^{2 pi i k d / N} with exact conjugate symmetry in d.
MatrixXcld expansion_twiddles(std::int64_t n, std::int64_t s, std::int64_t max_freq) {
    const std::int64_t kk = max_freq + 1;
    MatrixXcld t(kk, s);
    const long double two_pi = 2.0L * std::numbers::pi_v<long double>;
    for (std::int64_t k = 0; k < kk; ++k)
        for (std::int64_t d = 0; d < s; ++d) {
            const long double phase = two_pi * static_cast<long double>(k) *
                                      static_cast<long double>(d) / static_cast<long double>(n);
            t(k, d) = cld(std::cos(phase), std::sin(phase));
        }
    return t;
}

void check_geometry(const Window& w, const ShiftSet& shifts, std::int64_t max_freq) {
    if (w.ambient_n != shifts.ambient_n)
        throw Error(ErrorKind::invalid_argument, "window and shifts disagree on N");
    if (w.support != shifts.support)
        throw Error(ErrorKind::invalid_argument, "window and shifts disagree on the support");
    if (max_freq < 0 || max_freq > w.ambient_n - 1)
        throw Error(ErrorKind::invalid_argument, "max frequency must lie in [0, N-1]");
}

} // namespace

GramSystem build_gram(const Window& w, const ShiftSet& shifts, std::int64_t max_freq,
                      int freq_sign) {
    check_geometry(w, shifts, max_freq);
    const std::int64_t n = w.ambient_n;
    const std::int64_t kk = max_freq + 1;
    const std::int64_t count = shifts.count();
    const OverlapTable table = build_overlap_table(w, max_freq, freq_sign);

    GramSystem gram;
    gram.shift_count = count;
    gram.max_freq = max_freq;
    gram.freq_sign = freq_sign;
    gram.G = MatrixXld::Zero(count * kk, count * kk);
    for (std::int64_t pa = 0; pa < count; ++pa)
        for (std::int64_t pb = 0; pb < count; ++pb) {
            const std::int64_t delta =
                ((shifts.offsets[pb] - shifts.offsets[pa]) % n + n) % n;
            if (table.slot[delta] < 0) continue;
            const MatrixXcld& inner = table.inner[table.slot[delta]];
            for (std::int64_t ka = 0; ka < kk; ++ka)
                for (std::int64_t kb = 0; kb < kk; ++kb)
                    gram.G(pa * kk + ka, pb * kk + kb) = std::norm(inner(ka, kb));
        }
    gram.solver = SpectralSolver<long double>(gram.G);
    return gram;
}

TightSolve solve_tight(const GramSystem& gram, const VectorXd& y) {
    if (y.size() != gram.size())
        throw Error(ErrorKind::invalid_argument, "measurement vector does not match the Gram system");
    const VectorXld yl = y.cast<long double>();
    const VectorXld c = gram.solver.solve(yl);
    TightSolve out;
    out.coefficients = c.cast<double>();
    out.diagnostics.dimension = gram.size();
    out.diagnostics.rank = gram.solver.rank();
    out.diagnostics.cutoff = gram.solver.cutoff();
    const long double ynorm = yl.norm();
    out.diagnostics.residual =
        ynorm > 0.0L ? static_cast<double>((gram.G * c - yl).norm() / ynorm) : 0.0;
    return out;
}

LiftedSolution expand_to_band(const VectorXd& coefficients, const Window& w,
                              const ShiftSet& shifts, std::int64_t max_freq) {
    check_geometry(w, shifts, max_freq);
    const std::int64_t n = w.ambient_n;
    const std::int64_t s = w.support;
    const std::int64_t kk = max_freq + 1;
    if (coefficients.size() != shifts.count() * kk)
        throw Error(ErrorKind::invalid_argument, "coefficient vector does not match the geometry");

    const BandMask mask = make_band_mask(shifts);
    const MatrixXcld tw = expansion_twiddles(n, s, max_freq);
    VectorXcld wl(s);
    for (std::int64_t i = 0; i < s; ++i)
        wl[i] = cld(w.coeffs[i].real(), w.coeffs[i].imag());

    VectorXcld acc = VectorXcld::Zero(mask.count());
    MatrixXcld block(s, s);
    for (std::int64_t pos = 0; pos < shifts.count(); ++pos) {
        const std::int64_t l = shifts.offsets[pos];
        block.setZero();
        for (std::int64_t k = 0; k < kk; ++k) {
            const long double c = static_cast<long double>(coefficients[pos * kk + k]);
            if (c == 0.0L) continue;
            for (std::int64_t a = 0; a < s; ++a)
                for (std::int64_t b = 0; b < s; ++b) {
                    const std::int64_t d = a - b;
                    const cld e = d >= 0 ? tw(k, d) : std::conj(tw(k, -d));
                    block(a, b) += c * e;
                }
        }
        for (std::int64_t a = 0; a < s; ++a)
            for (std::int64_t b = 0; b < s; ++b) {
                const std::int64_t p = mask.find((l + a) % n, (l + b) % n);
                // the pair product is formed first so that (a,b) and (b,a)
                // round to exact conjugates
                acc[p] += block(a, b) * (wl[a] * std::conj(wl[b]));
            }
    }

    VectorXcd values(mask.count());
    for (std::int64_t p = 0; p < mask.count(); ++p) {
        const auto& [i, j] = mask.pairs[p];
        if (i == j)
            values[p] = cdouble(std::max(static_cast<double>(acc[p].real()), 0.0), 0.0);
        else
            values[p] = cdouble(static_cast<double>(acc[p].real()),
                                static_cast<double>(acc[p].imag()));
    }
    LiftedSolution out;
    out.Z = band_from_mask(mask, values);
    out.diagnostics.dimension = shifts.count() * kk;
    return out;
}

LiftedSolution solve_pattern(const Window& w, const ShiftSet& shifts, std::int64_t max_freq,
                             const VectorXd& y) {
    check_geometry(w, shifts, max_freq);
    const std::int64_t n = w.ambient_n;
    const std::int64_t s = w.support;
    const std::int64_t kk = max_freq + 1;
    const std::int64_t d = shifts.count() * kk;
    if (y.size() != d)
        throw Error(ErrorKind::invalid_argument, "measurement vector does not match the geometry");

    const BandMask mask = make_band_mask(shifts);
    const std::int64_t m = mask.count();
    const MatrixXcld tw = expansion_twiddles(n, s, max_freq);
    VectorXcld wl(s);
    for (std::int64_t i = 0; i < s; ++i)
        wl[i] = cld(w.coeffs[i].real(), w.coeffs[i].imag());

    // row of the measurement matrix for one (l,k): P[m(a,b)] = conj(w(a)) w(b) e^{2 pi i k (b-a)/N}
    MatrixXcld h = MatrixXcld::Zero(m, m);
    VectorXcld rhs = VectorXcld::Zero(m);
    std::vector<std::int64_t> pos(s * s);
    VectorXcld row(s * s);
    for (std::int64_t p = 0; p < shifts.count(); ++p) {
        const std::int64_t l = shifts.offsets[p];
        for (std::int64_t a = 0; a < s; ++a)
            for (std::int64_t b = 0; b < s; ++b)
                pos[a * s + b] = mask.find((l + a) % n, (l + b) % n);
        for (std::int64_t k = 0; k < kk; ++k) {
            for (std::int64_t a = 0; a < s; ++a)
                for (std::int64_t b = 0; b < s; ++b) {
                    const std::int64_t e = b - a;
                    const cld tws = e >= 0 ? tw(k, e) : std::conj(tw(k, -e));
                    row[a * s + b] = std::conj(wl[a]) * wl[b] * tws;
                }
            const long double yv = static_cast<long double>(y[p * kk + k]);
            for (std::int64_t i = 0; i < s * s; ++i) {
                const cld ci = std::conj(row[i]);
                rhs[pos[i]] += ci * yv;
                for (std::int64_t j = 0; j < s * s; ++j)
                    h(pos[i], pos[j]) += ci * row[j];
            }
        }
    }

    SpectralSolver<cld> solver(h);
    VectorXcld z = solver.solve(rhs);

    // Hermitian update Z <- (Z + Z*)/2 on the stored pattern, then clamp.
    VectorXcd values(m);
    for (std::int64_t p = 0; p < m; ++p) {
        const auto& [i, j] = mask.pairs[p];
        const std::int64_t pt = mask.find(j, i);
        const cld sym = (z[p] + std::conj(z[pt])) * 0.5L;
        if (i == j)
            values[p] = cdouble(std::max(static_cast<double>(sym.real()), 0.0), 0.0);
        else
            values[p] = cdouble(static_cast<double>(sym.real()), static_cast<double>(sym.imag()));
    }

    LiftedSolution out;
    out.Z = band_from_mask(mask, values);
    out.diagnostics.dimension = m;
    out.diagnostics.rank = solver.rank();
    out.diagnostics.cutoff = solver.cutoff();
    // residual of the un-symmetrized least-squares solution
    long double rnorm = 0.0L, ynorm = 0.0L;
    for (std::int64_t p = 0; p < shifts.count(); ++p) {
        const std::int64_t l = shifts.offsets[p];
        for (std::int64_t a = 0; a < s; ++a)
            for (std::int64_t b = 0; b < s; ++b)
                pos[a * s + b] = mask.find((l + a) % n, (l + b) % n);
        for (std::int64_t k = 0; k < kk; ++k) {
            cld acc(0.0L, 0.0L);
            for (std::int64_t a = 0; a < s; ++a)
                for (std::int64_t b = 0; b < s; ++b) {
                    const std::int64_t e = b - a;
                    const cld tws = e >= 0 ? tw(k, e) : std::conj(tw(k, -e));
                    acc += std::conj(wl[a]) * wl[b] * tws * z[pos[a * s + b]];
                }
            const long double yv = static_cast<long double>(y[p * kk + k]);
            rnorm += std::norm(acc - yv);
            ynorm += yv * yv;
        }
    }
    out.diagnostics.residual =
        ynorm > 0.0L ? static_cast<double>(std::sqrt(rnorm / ynorm)) : 0.0;
    return out;
}

VectorXd remeasure(const LiftedSolution& z, const Window& w, const ShiftSet& shifts,
                   std::int64_t max_freq) {
    check_geometry(w, shifts, max_freq);
    const std::int64_t n = w.ambient_n;
    const std::int64_t s = w.support;
    const std::int64_t kk = max_freq + 1;
    VectorXd out = VectorXd::Zero(shifts.count() * kk);
    const double two_pi = 2.0 * std::numbers::pi;
    for (std::int64_t p = 0; p < shifts.count(); ++p) {
        const std::int64_t l = shifts.offsets[p];
        for (std::int64_t k = 0; k < kk; ++k) {
            cdouble acc(0.0, 0.0);
            for (std::int64_t a = 0; a < s; ++a)
                for (std::int64_t b = 0; b < s; ++b) {
                    const cdouble zij = z.Z.get((l + a) % n, (l + b) % n);
                    if (zij == cdouble(0.0, 0.0)) continue;
                    // conj(B_ij) Z_ij with B = v v*
                    const double phase = two_pi * static_cast<double>(k) *
                                         static_cast<double>(b - a) / static_cast<double>(n);
                    acc += std::conj(w.coeffs[a]) * w.coeffs[b] *
                           cdouble(std::cos(phase), std::sin(phase)) * zij;
                }
            out[p * kk + k] = acc.real();
        }
    }
    return out;
}

ReconstructionResult reconstruct_1d(const MeasurementSet& ms, const Window& w,
                                    const ReconstructOptions& options) {
    if (ms.ndims != 1)
        throw Error(ErrorKind::invalid_argument, "reconstruct_1d expects 1D measurements");
    const ShiftSet& shifts = ms.shifts[0];
    const std::int64_t max_freq = ms.max_freq[0];

    const auto t0 = std::chrono::steady_clock::now();
    LiftedSolution lifted;
    if (options.projector == Projector::tight) {
        GramSystem gram = build_gram(w, shifts, max_freq);
        TightSolve ts = solve_tight(gram, ms.values);
        lifted = expand_to_band(ts.coefficients, w, shifts, max_freq);
        lifted.diagnostics = ts.diagnostics;
    } else {
        lifted = solve_pattern(w, shifts, max_freq, ms.values);
    }
    const auto t1 = std::chrono::steady_clock::now();

    const bool stabilized = options.degree_norm == DegreeNorm::on ||
                            (options.degree_norm == DegreeNorm::automatic &&
                             !shifts.full_circulant());
    SyncResult sync = synchronize(lifted.Z, stabilized, options.band_threshold,
                                  options.sync_tol, options.sync_max_iter);
    const auto t2 = std::chrono::steady_clock::now();

    ReconstructionResult res;
    res.estimate = make_grid_1d(std::move(sync.estimate));
    res.solve = lifted.diagnostics;
    res.sync = sync.diagnostics;
    res.solve_seconds = std::chrono::duration<double>(t1 - t0).count();
    res.sync_seconds = std::chrono::duration<double>(t2 - t1).count();
    res.warnings = std::move(sync.warnings);
    return res;
}

} // namespace ptycho
