#pragma once

// Path-level entry points of the truncated SVD, shared between linalg.cpp,
// the sparse decomposition kernels (which assemble Gram matrices themselves),
// and the tests (which force one path to cross-check against the other).

#include "mach/linalg.hpp"

#include <Eigen/Dense>

namespace mach::detail {

inline constexpr int kGramPathLimit = 512;   // short side above this -> subspace iteration
inline constexpr int kOversample = 8;        // extra block columns in subspace iteration
inline constexpr int kMaxSubspaceIters = 300;
inline constexpr double kSubspaceTol = 1e-10;       // on successive top-k subspace residuals
inline constexpr double kDeficiencyFloor = 1e-10;   // null-space exemption, relative to sigma_1

// Numerical-rank floor, relative to sigma_1. Working through a Gram matrix
// caps singular-value resolution near sqrt(side * eps) * sigma_1 (~2e-7 at
// side 512), so estimates below this floor are indistinguishable from zero
// and their directions are replaced by deterministic completions.
inline constexpr double kRankFloor = 1e-6;

/// Forced-path variants of truncated_svd, same contract.
TruncatedSvd truncated_svd_gram(const Matrix& m, int k);
TruncatedSvd truncated_svd_subspace(const Matrix& m, int k);

/// Orthonormal top-k eigenvectors of one side's Gram matrix, eigenvalues
/// reported as singular values sqrt(max(0, lambda)), non-increasing.
struct SideBasis {
    Eigen::MatrixXd vectors;
    Eigen::VectorXd sigma;
};

SideBasis gram_side_basis(const Eigen::MatrixXd& gram, int k);

/// Finishes a side basis into a LeftSingularBasis: data-backed columns are
/// sign-canonicalized, directions below the rank floor become deterministic
/// completions with zero singular value.
LeftSingularBasis basis_from_side(SideBasis side, int k);

/// Left basis from a caller-assembled rows-side Gram matrix (gram = X X^T).
/// Eigenvectors of the Gram are the left singular vectors; signs are
/// canonicalized, singular values are sqrt of clamped eigenvalues.
LeftSingularBasis basis_from_row_gram(const Eigen::MatrixXd& gram, int k);

/// Left basis from products w = X V where V holds top right singular vectors
/// (columns may be fewer than k; the remainder is completed). sigma are the
/// corresponding singular values; sigma1 scales the rank floor.
LeftSingularBasis basis_from_products(const Eigen::MatrixXd& w, const Eigen::VectorXd& sigma,
                                      int k, double sigma1);

}  // namespace mach::detail
