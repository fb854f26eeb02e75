#include "core/types.hpp"

#include <algorithm>
#include <cmath>

namespace ptycho {

namespace {

void check_finite(const VectorXcd& values) {
    for (Eigen::Index i = 0; i < values.size(); ++i) {
        if (!std::isfinite(values[i].real()) || !std::isfinite(values[i].imag()))
            throw Error(ErrorKind::invalid_argument, "grid contains non-finite values");
    }
}

} // namespace

ComplexGrid make_grid_1d(VectorXcd values) {
    if (values.size() == 0) throw Error(ErrorKind::invalid_argument, "empty grid");
    check_finite(values);
    ComplexGrid g;
    g.ndims = 1;
    g.extent = values.size();
    g.values = std::move(values);
    return g;
}

ComplexGrid make_grid_2d(std::int64_t n, VectorXcd values) {
    if (n <= 0 || values.size() != n * n)
        throw Error(ErrorKind::invalid_argument, "2D grid must be square: got " +
                                                     std::to_string(values.size()) +
                                                     " values for extent " + std::to_string(n));
    check_finite(values);
    ComplexGrid g;
    g.ndims = 2;
    g.extent = n;
    g.values = std::move(values);
    return g;
}

ShiftSet make_shift_set(std::int64_t n, std::int64_t s, std::int64_t stride, ShiftMode mode) {
    if (s < 1 || s > n)
        throw Error(ErrorKind::invalid_argument, "window support must satisfy 1 <= s <= N");
    if (stride < 1) throw Error(ErrorKind::invalid_argument, "stride must be >= 1");
    ShiftSet set;
    set.ambient_n = n;
    set.support = s;
    set.stride = stride;
    set.mode = mode;
    for (std::int64_t l = 0; l < n; l += stride) {
        if (mode == ShiftMode::interior && l + s > n) break;
        set.offsets.push_back(l);
    }
    if (set.offsets.empty()) throw Error(ErrorKind::invalid_argument, "no admissible shifts");
    return set;
}

std::int64_t measurement_index(std::int64_t shift_pos, std::int64_t k, std::int64_t max_freq,
                               std::int64_t shift_count) {
    if (k < 0 || k > max_freq) throw Error(ErrorKind::invalid_argument, "frequency index out of range");
    if (shift_pos < 0 || shift_pos >= shift_count)
        throw Error(ErrorKind::invalid_argument, "shift position out of range");
    return k + shift_pos * (max_freq + 1);
}

void validate_intensities(VectorXd& values) {
    double max = 0.0;
    for (Eigen::Index i = 0; i < values.size(); ++i) {
        if (!std::isfinite(values[i]))
            throw Error(ErrorKind::invalid_argument, "not a valid intensity");
        max = std::max(max, values[i]);
    }
    const double tol = 1e-12 * max;
    for (Eigen::Index i = 0; i < values.size(); ++i) {
        if (values[i] < -tol) throw Error(ErrorKind::invalid_argument, "not a valid intensity");
        if (values[i] < 0) values[i] = 0.0;
    }
}

BandMask make_band_mask(const ShiftSet& shifts) {
    const std::int64_t n = shifts.ambient_n;
    const std::int64_t s = shifts.support;
    std::vector<std::pair<std::int64_t, std::int64_t>> pairs;
    pairs.reserve(shifts.count() * s * s);
    for (std::int64_t l : shifts.offsets)
        for (std::int64_t a = 0; a < s; ++a)
            for (std::int64_t b = 0; b < s; ++b)
                pairs.emplace_back((l + a) % n, (l + b) % n);
    std::sort(pairs.begin(), pairs.end());
    pairs.erase(std::unique(pairs.begin(), pairs.end()), pairs.end());
    BandMask mask;
    mask.dim = n;
    mask.pairs = std::move(pairs);
    mask.index.reserve(mask.pairs.size());
    for (std::int64_t p = 0; p < mask.count(); ++p)
        mask.index.emplace(mask.pairs[p].first * n + mask.pairs[p].second, p);
    return mask;
}

cdouble BandMatrix::get(std::int64_t i, std::int64_t j) const {
    for (std::int64_t p = row_ptr[i]; p < row_ptr[i + 1]; ++p)
        if (col[p] == j) return val[p];
    return cdouble(0.0, 0.0);
}

VectorXd BandMatrix::diagonal() const {
    VectorXd d = VectorXd::Zero(dim);
    for (std::int64_t i = 0; i < dim; ++i)
        for (std::int64_t p = row_ptr[i]; p < row_ptr[i + 1]; ++p)
            if (col[p] == i) d[i] = val[p].real();
    return d;
}

BandMatrix band_from_mask(const BandMask& mask, const VectorXcd& values) {
    if (values.size() != mask.count())
        throw Error(ErrorKind::invalid_argument, "band value count does not match mask");
    BandMatrix m;
    m.dim = mask.dim;
    m.row_ptr.assign(mask.dim + 1, 0);
    m.col.resize(mask.pairs.size());
    m.val.resize(values.size());
    // mask pairs are sorted lexicographically, so this is already CSR order
    for (const auto& [i, j] : mask.pairs) ++m.row_ptr[i + 1];
    for (std::int64_t i = 0; i < mask.dim; ++i) m.row_ptr[i + 1] += m.row_ptr[i];
    for (std::int64_t p = 0; p < mask.count(); ++p) {
        m.col[p] = mask.pairs[p].second;
        m.val[p] = values[p];
    }
    return m;
}

} // namespace ptycho
