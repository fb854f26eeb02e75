#pragma once

// Shared domain types and index contracts for the ptychographic solver:
// sampled objects, shift sets, measurement layouts and sparse lifted
// solutions. All types are immutable value types once constructed.

#include <complex>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

#include <Eigen/Dense>

namespace ptycho {

using cdouble = std::complex<double>;
using Eigen::VectorXcd;
using Eigen::VectorXd;

enum class ErrorKind { invalid_argument, io, numeric };

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
    ErrorKind kind() const { return kind_; }

private:
    ErrorKind kind_;
};

/// Sampled object: a complex vector of length n (1D) or a square n x n
/// image stored row-major (2D). Entries must be finite.
struct ComplexGrid {
    int ndims = 1;          // 1 or 2
    std::int64_t extent = 0; // N; 2D grids hold extent*extent values
    VectorXcd values;

    std::int64_t size() const { return values.size(); }
    cdouble& at(std::int64_t i, std::int64_t j) { return values[i * extent + j]; }
    cdouble at(std::int64_t i, std::int64_t j) const { return values[i * extent + j]; }
};

ComplexGrid make_grid_1d(VectorXcd values);
ComplexGrid make_grid_2d(std::int64_t n, VectorXcd values);

enum class ShiftMode { interior, circulant };

/// The set of window translations used for the scan. Offsets are strictly
/// increasing; in interior mode every offset l satisfies l + s <= N.
struct ShiftSet {
    std::int64_t ambient_n = 0; // N
    std::int64_t support = 0;   // s
    std::int64_t stride = 1;    // kappa
    ShiftMode mode = ShiftMode::interior;
    std::vector<std::int64_t> offsets;

    std::int64_t count() const { return static_cast<std::int64_t>(offsets.size()); }
    bool full_circulant() const {
        return mode == ShiftMode::circulant && stride == 1 && count() == ambient_n;
    }
};

ShiftSet make_shift_set(std::int64_t n, std::int64_t s, std::int64_t stride, ShiftMode mode);

/// Linearization contract: alpha = k + shift_pos*(K+1), zero-based.
std::int64_t measurement_index(std::int64_t shift_pos, std::int64_t k, std::int64_t max_freq,
                               std::int64_t shift_count);

/// Squared-modulus measurements. 1D layouts hold D = card(L)*(K+1) values;
/// 2D layouts hold D1*D2 values indexed alpha = alpha1*D2 + alpha2 where
/// each alpha_i follows the 1D contract for its dimension.
struct MeasurementSet {
    int ndims = 1;
    ShiftSet shifts[2];
    std::int64_t max_freq[2] = {0, 0}; // K per dimension
    VectorXd values;
    std::string simulated_with; // optional descriptor of the probe window

    std::int64_t dim_count(int d) const { return shifts[d].count() * (max_freq[d] + 1); }
    std::int64_t expected_size() const {
        return ndims == 1 ? dim_count(0) : dim_count(0) * dim_count(1);
    }
};

/// Clamp tiny negative intensities to zero; anything below -tol*max is an error.
void validate_intensities(VectorXd& values);

/// Stored index pattern of a sparse Hermitian matrix: the union over shifts
/// of all (i,j) pairs jointly covered by a shifted window. Symmetric and
/// closed under transposition by construction.
struct BandMask {
    std::int64_t dim = 0;
    std::vector<std::pair<std::int64_t, std::int64_t>> pairs; // sorted (i,j)
    std::unordered_map<std::int64_t, std::int64_t> index;     // i*dim+j -> position

    std::int64_t count() const { return static_cast<std::int64_t>(pairs.size()); }
    std::int64_t find(std::int64_t i, std::int64_t j) const {
        auto it = index.find(i * dim + j);
        return it == index.end() ? -1 : it->second;
    }
};

BandMask make_band_mask(const ShiftSet& shifts);

/// Sparse Hermitian matrix in CSR layout. Both (i,j) and (j,i) are stored.
struct BandMatrix {
    std::int64_t dim = 0;
    std::vector<std::int64_t> row_ptr; // size dim+1
    std::vector<std::int64_t> col;
    VectorXcd val;

    std::int64_t nnz() const { return static_cast<std::int64_t>(col.size()); }
    cdouble get(std::int64_t i, std::int64_t j) const;
    VectorXd diagonal() const;
};

BandMatrix band_from_mask(const BandMask& mask, const VectorXcd& values);

struct SolveDiagnostics {
    double residual = 0.0;       // ||A x - y|| / ||y||
    double cutoff = 0.0;         // spectral cutoff actually applied
    std::int64_t rank = 0;       // retained spectral modes
    std::int64_t dimension = 0;  // system size
};

/// Solution of the lifted linear problem restricted to the band pattern.
struct LiftedSolution {
    BandMatrix Z;
    SolveDiagnostics diagnostics;
};

struct SyncDiagnostics {
    std::int64_t components = 0;
    std::int64_t iterations = 0; // total power-iteration count over components
    bool converged = true;
    std::vector<double> rayleigh; // per-iteration Rayleigh quotients, last component
};

/// Final estimate. The phase is determined only up to a global unimodular
/// factor; global_phase_ambiguous records that.
struct ReconstructionResult {
    ComplexGrid estimate;
    bool global_phase_ambiguous = true;
    SolveDiagnostics solve;
    SyncDiagnostics sync;
    double solve_seconds = 0.0;
    double sync_seconds = 0.0;
    std::vector<std::string> warnings;
};

} // namespace ptycho
