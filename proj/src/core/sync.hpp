#pragma once

// Angular synchronization: magnitudes from the diagonal of the lifted
// solution, phases from the leading eigenvector of the entrywise-normalized
// band matrix (optionally degree-normalized), assembled per connected
// component of the synchronization graph.

#include "core/types.hpp"

namespace ptycho {

struct NormalizedBand {
    BandMatrix zt;             // unimodular entries among active nodes
    VectorXd degree;           // retained entries per row (diagonal included)
    std::vector<char> active;  // diagonal above threshold
    VectorXd clamped_diagonal; // max(Re Z[i,i], 0)
    std::int64_t active_count = 0;
};

/// Entries with |Z[i,j]| > tau * max_i Z[i,i] are normalized to modulus one;
/// everything else is dropped. Nodes whose diagonal falls below the threshold
/// are inactive (their phase is unrecoverable).
NormalizedBand normalize_band(const BandMatrix& z, double tau = 1e-12);

struct Connectivity {
    std::int64_t count = 0;
    std::vector<std::int64_t> labels; // -1 for inactive nodes
};

/// Connected components of the graph whose edges are the retained
/// off-diagonal entries among active nodes.
Connectivity connectivity(const NormalizedBand& nb);

struct EigenvectorResult {
    VectorXcd vector; // unit per component, zero on inactive nodes
    SyncDiagnostics diagnostics;
};

/// Leading eigenvector of D^{-1/2} Z~ D^{-1/2} (stabilized) or of Z~ itself,
/// by power iteration on the Gershgorin-shifted matrix. Disconnected graphs
/// are synchronized per component, each with its own global phase.
EigenvectorResult top_eigenvector(const NormalizedBand& nb, bool stabilized,
                                  double tol = 1e-12, std::int64_t max_iter = 5000);

/// estimate[i] = sqrt(max(Re Z[i,i], 0)) * phase(eigvec[i]); inactive nodes
/// get phase 1.
VectorXcd assemble_estimate(const NormalizedBand& nb, const VectorXcd& eigvec);

struct SyncResult {
    VectorXcd estimate;
    SyncDiagnostics diagnostics;
    std::vector<std::string> warnings;
};

/// normalize -> (components) -> top eigenvector -> assemble.
SyncResult synchronize(const BandMatrix& z, bool stabilized, double tau = 1e-12,
                       double tol = 1e-12, std::int64_t max_iter = 5000);

} // namespace ptycho
