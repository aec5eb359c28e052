#pragma once

// Matricization kernels that touch nonzeros only; shared by the sparse
// decomposition path and the bound evaluator.

#include "mach/linalg.hpp"
#include "mach/tensor.hpp"

#include <Eigen/Dense>

#include <cstdint>

namespace mach::detail {

/// X_(m) X_(m)^T assembled from nonzeros bucketed by matricization column.
Eigen::MatrixXd sparse_row_gram(const SparseTensor& t, int mode);

/// X_(m)^T X_(m) assembled from nonzeros bucketed by matricization row.
Eigen::MatrixXd sparse_col_gram(const SparseTensor& t, int mode, std::int64_t cols);

/// X_(m) * v for each column of v.
Eigen::MatrixXd sparse_matricization_times(const SparseTensor& t, int mode,
                                           const Eigen::MatrixXd& v);

/// Leading left singular basis of the mode-m matricization without forming it
/// densely; always works from the shorter side's Gram.
LeftSingularBasis sparse_mode_basis(const SparseTensor& t, int mode, int k);

/// Top-k singular values of the mode-m matricization (shorter-side Gram
/// eigenvalues); returns min(k, shorter side) values, non-increasing.
std::vector<double> sparse_mode_singular_values(const SparseTensor& t, int mode, int k);

}  // namespace mach::detail
