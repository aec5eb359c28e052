#include "mach/tensor.hpp"

#include "internal.hpp"
#include "mach/errors.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <limits>

namespace mach {

namespace detail {

std::int64_t checked_size(const std::vector<int>& dims) {
    if (dims.empty()) throw ArgumentError("tensor must have at least one mode");
    std::int64_t n = 1;
    for (int d : dims) {
        if (d < 1) throw ArgumentError("every dimension must be >= 1");
        if (n > std::numeric_limits<std::int64_t>::max() / d)
            throw ArgumentError("shape product overflows");
        n *= d;
    }
    return n;
}

std::vector<std::int64_t> strides_of(const std::vector<int>& dims) {
    std::vector<std::int64_t> s(dims.size());
    std::int64_t acc = 1;
    for (std::size_t m = 0; m < dims.size(); ++m) {
        s[m] = acc;
        acc *= dims[m];
    }
    return s;
}

ModeSplit split_at(const std::vector<int>& dims, int mode) {
    if (mode < 0 || mode >= static_cast<int>(dims.size()))
        throw ArgumentError("mode out of range");
    ModeSplit s;
    for (int m = 0; m < mode; ++m) s.inner *= dims[m];
    for (int m = mode + 1; m < static_cast<int>(dims.size()); ++m) s.outer *= dims[m];
    s.len = dims[mode];
    return s;
}

namespace {

void check_finite(const std::vector<double>& v) {
    for (double x : v)
        if (!std::isfinite(x)) throw ArgumentError("tensor values must be finite");
}

}  // namespace
}  // namespace detail

DenseTensor::DenseTensor(std::vector<int> dims)
    : dims_(std::move(dims)), values_(static_cast<std::size_t>(detail::checked_size(dims_)), 0.0) {}

DenseTensor::DenseTensor(std::vector<int> dims, std::vector<double> values)
    : dims_(std::move(dims)), values_(std::move(values)) {
    if (static_cast<std::int64_t>(values_.size()) != detail::checked_size(dims_))
        throw ShapeError("value count does not match shape product");
    detail::check_finite(values_);
}

std::int64_t DenseTensor::flat_index(std::span<const int> index) const {
    if (index.size() != dims_.size()) throw ArgumentError("multi-index order mismatch");
    std::int64_t f = 0, stride = 1;
    for (std::size_t m = 0; m < dims_.size(); ++m) {
        if (index[m] < 0 || index[m] >= dims_[m]) throw ArgumentError("multi-index out of bounds");
        f += index[m] * stride;
        stride *= dims_[m];
    }
    return f;
}

SparseTensor::SparseTensor(std::vector<int> dims, std::vector<SparseEntry> entries)
    : dims_(std::move(dims)), entries_(std::move(entries)) {
    const std::int64_t total = detail::checked_size(dims_);
    for (const auto& e : entries_) {
        if (e.index < 0 || e.index >= total) throw ArgumentError("sparse entry index out of bounds");
        if (!std::isfinite(e.value)) throw ArgumentError("tensor values must be finite");
    }
    std::sort(entries_.begin(), entries_.end(),
              [](const SparseEntry& a, const SparseEntry& b) { return a.index < b.index; });
    // Merge duplicates by summation, then drop exact zeros.
    std::size_t out = 0;
    for (std::size_t i = 0; i < entries_.size();) {
        std::int64_t idx = entries_[i].index;
        double sum = 0.0;
        while (i < entries_.size() && entries_[i].index == idx) sum += entries_[i++].value;
        if (sum != 0.0) entries_[out++] = {idx, sum};
    }
    entries_.resize(out);
}

SparseTensor::SparseTensor(std::vector<int> dims,
                           const std::vector<std::pair<std::vector<int>, double>>& entries)
    : SparseTensor(dims, [&] {
          const auto strides = detail::strides_of(dims);
          std::vector<SparseEntry> flat;
          flat.reserve(entries.size());
          for (const auto& [idx, v] : entries) {
              if (idx.size() != dims.size()) throw ArgumentError("multi-index order mismatch");
              std::int64_t f = 0;
              for (std::size_t m = 0; m < idx.size(); ++m) {
                  if (idx[m] < 0 || idx[m] >= dims[m]) throw ArgumentError("multi-index out of bounds");
                  f += idx[m] * strides[m];
              }
              flat.push_back({f, v});
          }
          return flat;
      }()) {}

std::int64_t SparseTensor::size() const noexcept {
    std::int64_t n = 1;
    for (int d : dims_) n *= d;
    return n;
}

std::vector<int> SparseTensor::multi_index(std::int64_t flat) const {
    std::vector<int> idx(dims_.size());
    for (std::size_t m = 0; m < dims_.size(); ++m) {
        idx[m] = static_cast<int>(flat % dims_[m]);
        flat /= dims_[m];
    }
    return idx;
}

Matrix::Matrix(int rows, int cols) : rows_(rows), cols_(cols) {
    if (rows < 0 || cols < 0) throw ArgumentError("matrix dimensions must be nonnegative");
    values_.assign(static_cast<std::size_t>(rows) * static_cast<std::size_t>(cols), 0.0);
}

Matrix::Matrix(int rows, int cols, std::vector<double> values)
    : rows_(rows), cols_(cols), values_(std::move(values)) {
    if (rows < 0 || cols < 0) throw ArgumentError("matrix dimensions must be nonnegative");
    if (values_.size() != static_cast<std::size_t>(rows) * static_cast<std::size_t>(cols))
        throw ShapeError("value count does not match rows*cols");
}

Matrix Matrix::identity(int n) {
    Matrix m(n, n);
    for (int i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
}

Matrix transpose(const Matrix& m) {
    Matrix t(m.cols(), m.rows());
    for (int c = 0; c < m.cols(); ++c)
        for (int r = 0; r < m.rows(); ++r) t(c, r) = m(r, c);
    return t;
}

double frobenius_norm(const Matrix& m) {
    const double* v = m.data();
    return std::sqrt(detail::pairwise_sum(0, m.size(), [v](std::int64_t i) { return v[i] * v[i]; }));
}

double tensor_norm(const DenseTensor& t) {
    const double* v = t.data();
    return std::sqrt(detail::pairwise_sum(0, t.size(), [v](std::int64_t i) { return v[i] * v[i]; }));
}

double tensor_norm(const SparseTensor& t) {
    const auto& e = t.entries();
    return std::sqrt(detail::pairwise_sum(0, t.nnz(), [&e](std::int64_t i) {
        return e[static_cast<std::size_t>(i)].value * e[static_cast<std::size_t>(i)].value;
    }));
}

double inner_product(const DenseTensor& x, const DenseTensor& y) {
    if (x.dims() != y.dims()) throw ShapeError("inner_product requires identical shapes");
    const double* a = x.data();
    const double* b = y.data();
    return detail::pairwise_sum(0, x.size(), [a, b](std::int64_t i) { return a[i] * b[i]; });
}

Matrix matricize(const DenseTensor& t, int mode) {
    const auto s = detail::split_at(t.dims(), mode);
    const std::int64_t cols = s.inner * s.outer;
    Matrix m(s.len, static_cast<int>(cols));
    const double* src = t.data();
    double* dst = m.data();
    if (s.inner == 1) {
        // First mode: layouts coincide, one flat copy.
        std::memcpy(dst, src, static_cast<std::size_t>(t.size()) * sizeof(double));
        return m;
    }
    for (std::int64_t c = 0; c < s.outer; ++c) {
        const double* slab = src + c * s.inner * s.len;
        for (int r = 0; r < s.len; ++r) {
            const double* row = slab + static_cast<std::int64_t>(r) * s.inner;
            double* out = dst + r + (c * s.inner) * s.len;
            for (std::int64_t a = 0; a < s.inner; ++a) out[a * s.len] = row[a];
        }
    }
    return m;
}

DenseTensor refold(const Matrix& m, int mode, const std::vector<int>& dims) {
    const auto s = detail::split_at(dims, mode);
    if (m.rows() != s.len || static_cast<std::int64_t>(m.cols()) != s.inner * s.outer)
        throw ShapeError("matrix shape does not match refold target dims");
    DenseTensor t(dims);
    const double* src = m.data();
    double* dst = t.data();
    if (s.inner == 1) {
        std::memcpy(dst, src, static_cast<std::size_t>(t.size()) * sizeof(double));
        return t;
    }
    for (std::int64_t c = 0; c < s.outer; ++c) {
        double* slab = dst + c * s.inner * s.len;
        for (int r = 0; r < s.len; ++r) {
            double* row = slab + static_cast<std::int64_t>(r) * s.inner;
            const double* in = src + r + (c * s.inner) * s.len;
            for (std::int64_t a = 0; a < s.inner; ++a) row[a] = in[a * s.len];
        }
    }
    return t;
}

DenseTensor mode_product(const DenseTensor& t, const Matrix& m, int mode) {
    const auto s = detail::split_at(t.dims(), mode);
    if (m.cols() != s.len) throw ShapeError("mode_product inner dimensions disagree");
    std::vector<int> out_dims = t.dims();
    out_dims[static_cast<std::size_t>(mode)] = m.rows();
    DenseTensor out(out_dims);
    const auto em = detail::as_eigen(m);
    // Per outer slab, the tensor is a contiguous (inner x len) column-major
    // block; the product along `mode` is slab * m^T.
    for (std::int64_t c = 0; c < s.outer; ++c) {
        Eigen::Map<const Eigen::MatrixXd> slab(t.data() + c * s.inner * s.len, s.inner, s.len);
        Eigen::Map<Eigen::MatrixXd> dst(out.data() + c * s.inner * m.rows(), s.inner, m.rows());
        dst.noalias() = slab * em.transpose();
    }
    return out;
}

DenseTensor mode_product(const SparseTensor& t, const Matrix& m, int mode) {
    const auto s = detail::split_at(t.dims(), mode);
    if (m.cols() != s.len) throw ShapeError("mode_product inner dimensions disagree");
    std::vector<int> out_dims = t.dims();
    out_dims[static_cast<std::size_t>(mode)] = m.rows();
    DenseTensor out(out_dims);
    const int j = m.rows();
    const double* md = m.data();  // column-major: m(q, r) = md[q + r*j]
    double* od = out.data();
    for (const auto& e : t.entries()) {
        const std::int64_t a = e.index % s.inner;
        const std::int64_t r = (e.index / s.inner) % s.len;
        const std::int64_t c = e.index / (s.inner * s.len);
        const double* mcol = md + r * j;
        double* base = od + a + c * s.inner * j;
        for (int q = 0; q < j; ++q) base[q * s.inner] += mcol[q] * e.value;
    }
    return out;
}

DenseTensor densify(const SparseTensor& s) {
    DenseTensor t(s.dims());
    double* v = t.data();
    for (const auto& e : s.entries()) v[e.index] = e.value;
    return t;
}

SparseTensor sparsify_exact(const DenseTensor& t) {
    std::vector<SparseEntry> entries;
    const double* v = t.data();
    for (std::int64_t i = 0; i < t.size(); ++i)
        if (v[i] != 0.0) entries.push_back({i, v[i]});
    return SparseTensor(t.dims(), std::move(entries));
}

}  // namespace mach
