#pragma once

#include <cstdint>
#include <span>
#include <utility>
#include <vector>

namespace mach {

/// Dense d-mode array. Values are stored flat with the first mode varying
/// fastest, so the mode-0 matricization is a plain reinterpretation of the
/// buffer. All stored scalars are finite; this is checked on construction.
class DenseTensor {
public:
    DenseTensor() = default;

    /// Zero-filled tensor of the given shape.
    explicit DenseTensor(std::vector<int> dims);

    /// Takes ownership of `values`; values.size() must equal the shape product.
    DenseTensor(std::vector<int> dims, std::vector<double> values);

    int order() const noexcept { return static_cast<int>(dims_.size()); }
    const std::vector<int>& dims() const noexcept { return dims_; }
    int dim(int mode) const { return dims_.at(static_cast<std::size_t>(mode)); }
    std::int64_t size() const noexcept { return static_cast<std::int64_t>(values_.size()); }

    const std::vector<double>& values() const noexcept { return values_; }
    const double* data() const noexcept { return values_.data(); }
    double* data() noexcept { return values_.data(); }

    std::int64_t flat_index(std::span<const int> index) const;
    double at(std::span<const int> index) const { return values_[static_cast<std::size_t>(flat_index(index))]; }
    double& at(std::span<const int> index) { return values_[static_cast<std::size_t>(flat_index(index))]; }

private:
    std::vector<int> dims_;
    std::vector<double> values_;
};

/// One nonzero of a SparseTensor, addressed by the flat (first-mode-fastest)
/// index so entries sort and merge with plain integer comparisons.
struct SparseEntry {
    std::int64_t index;
    double value;
};

/// Coordinate-list tensor. Canonical form: entries sorted by flat index,
/// duplicates merged by summation, exact zeros dropped. Construction
/// canonicalizes, so equality of entry lists is equality of tensors.
class SparseTensor {
public:
    SparseTensor() = default;

    /// From (multi-index, value) pairs; indices are 0-based.
    SparseTensor(std::vector<int> dims,
                 const std::vector<std::pair<std::vector<int>, double>>& entries);

    /// From flat-index entries (canonicalized on construction).
    SparseTensor(std::vector<int> dims, std::vector<SparseEntry> entries);

    int order() const noexcept { return static_cast<int>(dims_.size()); }
    const std::vector<int>& dims() const noexcept { return dims_; }
    int dim(int mode) const { return dims_.at(static_cast<std::size_t>(mode)); }
    std::int64_t size() const noexcept;
    std::int64_t nnz() const noexcept { return static_cast<std::int64_t>(entries_.size()); }
    const std::vector<SparseEntry>& entries() const noexcept { return entries_; }

    /// Decode a flat index into a 0-based multi-index.
    std::vector<int> multi_index(std::int64_t flat) const;

private:
    std::vector<int> dims_;
    std::vector<SparseEntry> entries_;
};

/// Dense 2-mode array, column-major (column index varies slowest).
class Matrix {
public:
    Matrix() = default;
    Matrix(int rows, int cols);
    Matrix(int rows, int cols, std::vector<double> values);

    static Matrix identity(int n);

    int rows() const noexcept { return rows_; }
    int cols() const noexcept { return cols_; }
    std::int64_t size() const noexcept { return static_cast<std::int64_t>(values_.size()); }

    double operator()(int r, int c) const {
        return values_[static_cast<std::size_t>(r) + static_cast<std::size_t>(c) * static_cast<std::size_t>(rows_)];
    }
    double& operator()(int r, int c) {
        return values_[static_cast<std::size_t>(r) + static_cast<std::size_t>(c) * static_cast<std::size_t>(rows_)];
    }

    const std::vector<double>& values() const noexcept { return values_; }
    const double* data() const noexcept { return values_.data(); }
    double* data() noexcept { return values_.data(); }

private:
    int rows_ = 0;
    int cols_ = 0;
    std::vector<double> values_;
};

Matrix transpose(const Matrix& m);

/// Frobenius norm (pairwise-summed, order-stable to ~eps*log n).
double frobenius_norm(const Matrix& m);

/// sqrt of the sum of all squared entries.
double tensor_norm(const DenseTensor& t);
double tensor_norm(const SparseTensor& t);

/// Sum over all multi-indices of x*y; dims must match.
double inner_product(const DenseTensor& x, const DenseTensor& y);

/// Mode-k unfolding into an I_k x prod_{j!=k} I_j matrix. The remaining
/// modes index the columns in their original order, earliest fastest.
Matrix matricize(const DenseTensor& t, int mode);

/// Exact inverse of matricize.
DenseTensor refold(const Matrix& m, int mode, const std::vector<int>& dims);

/// Tensor-times-matrix along `mode`; m.cols() must equal dim(mode) and the
/// result replaces that dimension with m.rows(). Defined by the
/// matricize-multiply-refold identity.
DenseTensor mode_product(const DenseTensor& t, const Matrix& m, int mode);

/// Sparse fast path: touches nonzeros only, returns a dense result.
DenseTensor mode_product(const SparseTensor& t, const Matrix& m, int mode);

DenseTensor densify(const SparseTensor& s);

/// Drops exact zeros only; densify(sparsify_exact(t)) == t.
SparseTensor sparsify_exact(const DenseTensor& t);

}  // namespace mach
