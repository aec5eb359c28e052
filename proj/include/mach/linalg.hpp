#pragma once

#include "mach/tensor.hpp"

#include <vector>

namespace mach {

/// Top-k singular triplets: left is rows x k, right is cols x k, both with
/// orthonormal columns; singular_values are nonnegative and non-increasing.
struct TruncatedSvd {
    Matrix left;
    std::vector<double> singular_values;
    Matrix right;
};

/// Best rank-k factors of m, 1 <= k <= min(rows, cols). Deterministic: fixed
/// iteration schedule and a fixed sign convention (the largest-magnitude entry
/// of each left vector is nonnegative, ties broken by lowest index; the right
/// vector's sign follows). Directions below the numerical noise floor are
/// replaced by deterministic orthonormal completions so the factors stay
/// orthonormal even for rank-deficient input.
TruncatedSvd truncated_svd(const Matrix& m, int k);

/// The left factor of truncated_svd, bit-identical to it.
Matrix leading_left_singular_vectors(const Matrix& m, int k);

/// left * diag(singular_values) * right^T from truncated_svd.
Matrix low_rank_approx(const Matrix& m, int k);

/// Orthonormal left basis for decompositions that may legitimately request
/// more directions than the data supports; the only shape requirement is
/// 1 <= k <= rows. Columns past the numerical rank are deterministic
/// completions with singular value 0.
struct LeftSingularBasis {
    Matrix basis;
    std::vector<double> singular_values;
    int numerical_rank = 0;
    bool completed = false;
};

LeftSingularBasis left_singular_basis(const Matrix& m, int k);

/// Caps the worker threads the dense kernels may use. Values < 1 restore the
/// backend default. Results are identical at any thread count.
void set_thread_count(int n);

}  // namespace mach
