#pragma once

// Spectral pseudo-inverse for positive semidefinite systems. The generating
// systems behind the lifted problem are often numerically rank-deficient, so
// the solve truncates eigenmodes below a relative cutoff instead of relying
// on a fixed Tikhonov shift.

#include <cstdint>

#include <Eigen/Dense>

#include "core/types.hpp"

namespace ptycho {

inline constexpr double kSpectralCutoff = 1e-14;

template <typename Scalar>
class SpectralSolver {
public:
    using Mat = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
    using Vec = Eigen::Vector<Scalar, Eigen::Dynamic>;
    using RealVec = Eigen::Vector<long double, Eigen::Dynamic>;

    SpectralSolver() = default;

    explicit SpectralSolver(const Mat& m, double rel_cutoff = kSpectralCutoff) {
        Eigen::SelfAdjointEigenSolver<Mat> eig(m);
        if (eig.info() != Eigen::Success)
            throw Error(ErrorKind::numeric, "eigendecomposition of PSD system failed");
        evals_ = eig.eigenvalues().template cast<long double>().cwiseMax(0.0L);
        evecs_ = eig.eigenvectors();
        const long double max = evals_.size() ? evals_[evals_.size() - 1] : 0.0L;
        cutoff_ = static_cast<long double>(rel_cutoff) * max;
        inv_ = RealVec::Zero(evals_.size());
        rank_ = 0;
        for (Eigen::Index i = 0; i < evals_.size(); ++i) {
            if (evals_[i] > cutoff_ && evals_[i] > 0.0L) {
                inv_[i] = 1.0L / evals_[i];
                ++rank_;
            }
        }
    }

    Vec solve(const Vec& y) const {
        Vec t = evecs_.adjoint() * y;
        for (Eigen::Index i = 0; i < t.size(); ++i) t[i] *= inv_[i];
        return evecs_ * t;
    }

    std::int64_t rank() const { return rank_; }
    double cutoff() const { return static_cast<double>(cutoff_); }
    double eigen_max() const {
        return evals_.size() ? static_cast<double>(evals_[evals_.size() - 1]) : 0.0;
    }
    const RealVec& eigenvalues() const { return evals_; }

private:
    Mat evecs_;
    RealVec evals_;
    RealVec inv_;
    long double cutoff_ = 0.0L;
    std::int64_t rank_ = 0;
};

using MatrixXld = Eigen::Matrix<long double, Eigen::Dynamic, Eigen::Dynamic>;
using VectorXld = Eigen::Vector<long double, Eigen::Dynamic>;
using MatrixXcld = Eigen::Matrix<std::complex<long double>, Eigen::Dynamic, Eigen::Dynamic>;
using VectorXcld = Eigen::Vector<std::complex<long double>, Eigen::Dynamic>;

} // namespace ptycho
