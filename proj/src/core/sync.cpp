#include "core/sync.hpp"

#include <cmath>

namespace ptycho {

NormalizedBand normalize_band(const BandMatrix& z, double tau) {
    const std::int64_t n = z.dim;
    NormalizedBand nb;
    nb.clamped_diagonal = z.diagonal().cwiseMax(0.0);
    const double maxdiag = nb.clamped_diagonal.maxCoeff();
    if (!(maxdiag > 0.0)) throw Error(ErrorKind::numeric, "no signal energy");
    const double threshold = tau * maxdiag;

    nb.active.assign(n, 0);
    for (std::int64_t i = 0; i < n; ++i)
        if (nb.clamped_diagonal[i] > threshold) {
            nb.active[i] = 1;
            ++nb.active_count;
        }

    nb.zt.dim = n;
    nb.zt.row_ptr.assign(n + 1, 0);
    std::vector<std::int64_t> cols;
    std::vector<cdouble> vals;
    cols.reserve(z.nnz());
    vals.reserve(z.nnz());
    nb.degree = VectorXd::Zero(n);
    for (std::int64_t i = 0; i < n; ++i) {
        if (nb.active[i]) {
            for (std::int64_t p = z.row_ptr[i]; p < z.row_ptr[i + 1]; ++p) {
                const std::int64_t j = z.col[p];
                if (!nb.active[j]) continue;
                const double mag = std::abs(z.val[p]);
                if (mag <= threshold) continue;
                cols.push_back(j);
                vals.push_back(z.val[p] / mag);
            }
        }
        nb.zt.row_ptr[i + 1] = static_cast<std::int64_t>(cols.size());
        nb.degree[i] = static_cast<double>(nb.zt.row_ptr[i + 1] - nb.zt.row_ptr[i]);
    }
    nb.zt.col = std::move(cols);
    nb.zt.val = Eigen::Map<VectorXcd>(vals.data(), static_cast<Eigen::Index>(vals.size()));
    return nb;
}

Connectivity connectivity(const NormalizedBand& nb) {
    const std::int64_t n = nb.zt.dim;
    Connectivity c;
    c.labels.assign(n, -1);
    std::vector<std::int64_t> stack;
    for (std::int64_t seed = 0; seed < n; ++seed) {
        if (!nb.active[seed] || c.labels[seed] >= 0) continue;
        c.labels[seed] = c.count;
        stack.push_back(seed);
        while (!stack.empty()) {
            const std::int64_t i = stack.back();
            stack.pop_back();
            for (std::int64_t p = nb.zt.row_ptr[i]; p < nb.zt.row_ptr[i + 1]; ++p) {
                const std::int64_t j = nb.zt.col[p];
                if (i == j || c.labels[j] >= 0) continue;
                c.labels[j] = c.count;
                stack.push_back(j);
            }
        }
        ++c.count;
    }
    return c;
}

EigenvectorResult top_eigenvector(const NormalizedBand& nb, bool stabilized, double tol,
                                  std::int64_t max_iter) {
    if (nb.active_count == 0) throw Error(ErrorKind::numeric, "no active indices");
    const std::int64_t n = nb.zt.dim;
    const Connectivity comp = connectivity(nb);

    // scaled matrix values: M = D^{-1/2} Z~ D^{-1/2} when stabilized
    VectorXd dinv_sqrt = VectorXd::Ones(n);
    if (stabilized)
        for (std::int64_t i = 0; i < n; ++i)
            if (nb.degree[i] > 0) dinv_sqrt[i] = 1.0 / std::sqrt(nb.degree[i]);
    VectorXcd mval(nb.zt.nnz());
    for (std::int64_t i = 0; i < n; ++i)
        for (std::int64_t p = nb.zt.row_ptr[i]; p < nb.zt.row_ptr[i + 1]; ++p)
            mval[p] = stabilized ? nb.zt.val[p] * dinv_sqrt[i] * dinv_sqrt[nb.zt.col[p]]
                                 : nb.zt.val[p];

    EigenvectorResult res;
    res.vector = VectorXcd::Zero(n);
    res.diagnostics.components = comp.count;

    std::vector<std::vector<std::int64_t>> members(comp.count);
    for (std::int64_t i = 0; i < n; ++i)
        if (comp.labels[i] >= 0) members[comp.labels[i]].push_back(i);

    for (std::int64_t ci = 0; ci < comp.count; ++ci) {
        const auto& idx = members[ci];
        const std::int64_t nc = static_cast<std::int64_t>(idx.size());
        std::vector<std::int64_t> local(n, -1);
        for (std::int64_t q = 0; q < nc; ++q) local[idx[q]] = q;

        // Gershgorin bound: the shifted matrix M + rho I is PSD and shares
        // the eigenvector of the largest (not largest-magnitude) eigenvalue.
        double rho = 0.0;
        for (std::int64_t q = 0; q < nc; ++q) {
            const std::int64_t i = idx[q];
            double row = 0.0;
            for (std::int64_t p = nb.zt.row_ptr[i]; p < nb.zt.row_ptr[i + 1]; ++p)
                row += std::abs(mval[p]);
            rho = std::max(rho, row);
        }

        VectorXcd x = VectorXcd::Constant(nc, cdouble(1.0 / std::sqrt(static_cast<double>(nc)), 0.0));
        VectorXcd next(nc);
        const bool record = ci == comp.count - 1;
        bool converged = false;
        bool perturbed = false;
        std::int64_t it = 0;
        while (it < max_iter) {
            ++it;
            for (std::int64_t q = 0; q < nc; ++q) {
                const std::int64_t i = idx[q];
                cdouble acc = rho * x[q];
                for (std::int64_t p = nb.zt.row_ptr[i]; p < nb.zt.row_ptr[i + 1]; ++p)
                    acc += mval[p] * x[local[nb.zt.col[p]]];
                next[q] = acc;
            }
            if (record) {
                const double rayleigh = (x.dot(next)).real();
                res.diagnostics.rayleigh.push_back(rayleigh);
            }
            const double nn = next.norm();
            if (!(nn > 0.0)) {
                if (!perturbed) {
                    // deterministic restart when the iterate is annihilated
                    for (std::int64_t q = 0; q < nc; ++q)
                        x[q] = cdouble(1.0 + 0.5 * std::cos(static_cast<double>(q + 1)), 0.0);
                    x /= x.norm();
                    perturbed = true;
                    continue;
                }
                break;
            }
            next /= nn;
            const cdouble overlap = x.dot(next);
            if (std::abs(overlap) > 0.0) next *= std::conj(overlap) / std::abs(overlap);
            const double delta = (next - x).norm();
            x = next;
            if (delta < tol) {
                converged = true;
                break;
            }
        }
        res.diagnostics.iterations += it;
        if (!converged) res.diagnostics.converged = false;
        for (std::int64_t q = 0; q < nc; ++q) res.vector[idx[q]] = x[q];
    }
    return res;
}

VectorXcd assemble_estimate(const NormalizedBand& nb, const VectorXcd& eigvec) {
    const std::int64_t n = nb.zt.dim;
    if (eigvec.size() != n)
        throw Error(ErrorKind::invalid_argument, "eigenvector size does not match the band");
    VectorXcd est(n);
    for (std::int64_t i = 0; i < n; ++i) {
        const double amp = std::sqrt(nb.clamped_diagonal[i]);
        const double mag = std::abs(eigvec[i]);
        est[i] = mag > 0.0 ? amp * (eigvec[i] / mag) : cdouble(amp, 0.0);
    }
    return est;
}

SyncResult synchronize(const BandMatrix& z, bool stabilized, double tau, double tol,
                       std::int64_t max_iter) {
    SyncResult out;
    NormalizedBand nb = normalize_band(z, tau);
    EigenvectorResult eig = top_eigenvector(nb, stabilized, tol, max_iter);
    out.estimate = assemble_estimate(nb, eig.vector);
    out.diagnostics = std::move(eig.diagnostics);
    if (out.diagnostics.components > 1)
        out.warnings.push_back("synchronization graph split into " +
                               std::to_string(out.diagnostics.components) +
                               " components; phases are consistent only within components");
    if (!out.diagnostics.converged)
        out.warnings.push_back("power iteration did not converge; returning best iterate");
    return out;
}

} // namespace ptycho
