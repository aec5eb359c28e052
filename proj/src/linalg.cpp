#include "mach/linalg.hpp"

#include "internal.hpp"
#include "linalg_internal.hpp"
#include "mach/errors.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <vector>

namespace mach {

namespace detail {

double canonical_sign(Eigen::Ref<Eigen::VectorXd> u) {
    int pivot = 0;
    double best = std::abs(u[0]);
    for (int i = 1; i < u.size(); ++i) {
        if (std::abs(u[i]) > best) {
            best = std::abs(u[i]);
            pivot = i;
        }
    }
    if (u[pivot] < 0.0) {
        u = -u;
        return -1.0;
    }
    return 1.0;
}

namespace {

constexpr std::uint64_t kSubspaceSeed = 0x4D414348u;  // start-block stream id
constexpr double kCollapseFloor = 1e-3;  // column absorbed by earlier ones

// Unit vector orthogonal to the first `count` columns of `basis`, built from
// the lowest-index standard basis vector that survives projection.
Eigen::VectorXd completion_column(const Eigen::MatrixXd& basis, int count) {
    const auto n = basis.rows();
    for (Eigen::Index e = 0; e < n; ++e) {
        Eigen::VectorXd v = Eigen::VectorXd::Unit(n, e);
        for (int pass = 0; pass < 2; ++pass)
            v -= basis.leftCols(count) * (basis.leftCols(count).transpose() * v);
        const double nv = v.norm();
        if (nv > 0.5) return v / nv;
    }
    throw ConvergenceError("orthonormal completion found no free direction", count + 1);
}

struct OrthoColumns {
    Eigen::MatrixXd basis;        // n x k orthonormal
    std::vector<double> flips;    // +1/-1 per column when canonicalized, else +1
    std::vector<bool> backed;     // column i came from data, not completion
    int numerical_rank = 0;
    bool completed = false;
};

// Turns the columns of w (possibly fewer than k) into k orthonormal columns.
// Each data column is normalized with a twice-is-enough Gram-Schmidt
// safeguard; columns below the rank floor (|w_i| estimates sigma_i),
// collapsed columns, and the k - w.cols() missing ones become deterministic
// completions.
OrthoColumns orthonormal_columns(const Eigen::MatrixXd& w, int k, double sigma1,
                                 bool canonicalize) {
    OrthoColumns out;
    out.basis.resize(w.rows(), k);
    out.flips.assign(static_cast<std::size_t>(k), 1.0);
    out.backed.assign(static_cast<std::size_t>(k), false);
    const double floor = sigma1 * kRankFloor;
    for (int i = 0; i < k; ++i) {
        bool data_backed = false;
        if (i < w.cols()) {
            Eigen::VectorXd v = w.col(i);
            const double nv = v.norm();
            if (nv > floor) {
                for (int pass = 0; pass < 2; ++pass)
                    if (i > 0)
                        v -= out.basis.leftCols(i) * (out.basis.leftCols(i).transpose() * v);
                const double res = v.norm();
                if (res > kCollapseFloor * nv) {
                    out.basis.col(i) = v / res;
                    data_backed = true;
                }
            }
        }
        if (!data_backed) {
            out.basis.col(i) = completion_column(out.basis, i);
            out.completed = true;
        } else {
            out.backed[static_cast<std::size_t>(i)] = true;
            ++out.numerical_rank;
        }
        if (canonicalize)
            out.flips[static_cast<std::size_t>(i)] = canonical_sign(out.basis.col(i));
    }
    return out;
}

}  // namespace

// Top-k spectral basis of the chosen Gram side via a dense symmetric
// eigendecomposition; k <= side.
SideBasis gram_side_basis(const Eigen::MatrixXd& gram, int k) {
    Eigen::MatrixXd sym = 0.5 * (gram + gram.transpose());
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(sym);
    if (es.info() != Eigen::Success)
        throw ConvergenceError("symmetric eigendecomposition failed", 1);
    const auto n = sym.rows();
    SideBasis out;
    out.vectors.resize(n, k);
    out.sigma.resize(k);
    for (int i = 0; i < k; ++i) {
        out.vectors.col(i) = es.eigenvectors().col(n - 1 - i);
        out.sigma[i] = std::sqrt(std::max(0.0, es.eigenvalues()[n - 1 - i]));
    }
    return out;
}

namespace {

// Blocked subspace iteration on the implicit Gram of the chosen side; never
// forms the side x side matrix. Fixed oversampling, fixed deterministic
// start block, convergence on the residual of the previous top-k Ritz basis
// against the current one.
SideBasis subspace_side_basis(const Eigen::Map<const Eigen::MatrixXd>& a, bool side_is_rows,
                              int k) {
    const Eigen::Index side = side_is_rows ? a.rows() : a.cols();
    const int block = static_cast<int>(std::min<Eigen::Index>(k + kOversample, side));
    const auto apply = [&](const Eigen::MatrixXd& q) -> Eigen::MatrixXd {
        if (side_is_rows) return a * (a.transpose() * q);
        return a.transpose() * (a * q);
    };

    Eigen::MatrixXd q(side, block);
    for (int c = 0; c < block; ++c)
        for (Eigen::Index r = 0; r < side; ++r)
            q(r, c) = 2.0 * counter_uniform01(kSubspaceSeed,
                                              static_cast<std::uint64_t>(c) * side +
                                                  static_cast<std::uint64_t>(r)) -
                      1.0;
    q = Eigen::HouseholderQR<Eigen::MatrixXd>(q).householderQ() *
        Eigen::MatrixXd::Identity(side, block);

    Eigen::MatrixXd prev;  // side x k, previous Ritz basis
    for (int iter = 0; iter < kMaxSubspaceIters; ++iter) {
        Eigen::MatrixXd z = apply(q);
        Eigen::MatrixXd t = q.transpose() * z;
        t = 0.5 * (t + t.transpose()).eval();
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(t);
        if (es.info() != Eigen::Success)
            throw ConvergenceError("subspace Rayleigh-Ritz step failed", 1);
        Eigen::MatrixXd ritz(side, k);
        Eigen::VectorXd theta(k);
        for (int i = 0; i < k; ++i) {
            ritz.col(i) = q * es.eigenvectors().col(block - 1 - i);
            theta[i] = es.eigenvalues()[block - 1 - i];
        }
        // Directions with eigenvalue at rounding level wander freely in the
        // null space and are exempt from the stability requirement; the
        // downstream orthonormalization treats them as completions anyway.
        const double theta_floor = theta[0] * kDeficiencyFloor * kDeficiencyFloor;
        if (prev.size() != 0) {
            bool converged = true;
            for (int i = 0; i < k && converged; ++i) {
                if (theta[i] <= theta_floor) continue;
                Eigen::VectorXd r = prev.col(i) - ritz * (ritz.transpose() * prev.col(i));
                if (r.norm() > kSubspaceTol) converged = false;
            }
            if (converged) {
                SideBasis out;
                out.vectors = std::move(ritz);
                out.sigma.resize(k);
                for (int i = 0; i < k; ++i) out.sigma[i] = std::sqrt(std::max(0.0, theta[i]));
                return out;
            }
        }
        prev = std::move(ritz);
        if (iter + 1 < kMaxSubspaceIters)
            q = Eigen::HouseholderQR<Eigen::MatrixXd>(z).householderQ() *
                Eigen::MatrixXd::Identity(side, block);
    }

    // Name the first direction still moving between sweeps.
    for (int i = 0; i < k; ++i) {
        Eigen::VectorXd r = prev.col(i) - q * (q.transpose() * prev.col(i));
        if (r.norm() > kSubspaceTol)
            throw ConvergenceError("subspace iteration did not converge", i + 1);
    }
    throw ConvergenceError("subspace iteration did not converge", k);
}

TruncatedSvd zero_matrix_svd(int rows, int cols, int k) {
    TruncatedSvd out;
    out.left = Matrix(rows, k);
    out.right = Matrix(cols, k);
    for (int i = 0; i < k; ++i) {
        out.left(i, i) = 1.0;
        out.right(i, i) = 1.0;
    }
    out.singular_values.assign(static_cast<std::size_t>(k), 0.0);
    return out;
}

void check_svd_args(const Matrix& m, int k) {
    if (m.rows() < 1 || m.cols() < 1) throw ArgumentError("matrix must be nonempty");
    if (k < 1 || k > std::min(m.rows(), m.cols()))
        throw ArgumentError("k must satisfy 1 <= k <= min(rows, cols)");
}

// Shared tail: given the short-side basis, derive the other side and assemble
// the triplet with the sign convention anchored on the left vectors.
TruncatedSvd assemble_svd(const Eigen::Map<const Eigen::MatrixXd>& a, bool side_is_rows,
                          SideBasis side, int k) {
    const double sigma1 = side.sigma.size() ? side.sigma[0] : 0.0;
    TruncatedSvd out;
    out.singular_values.assign(side.sigma.data(), side.sigma.data() + k);
    if (side_is_rows) {
        // Eigen side holds the left vectors; canonicalize them, right follows.
        for (int i = 0; i < k; ++i) canonical_sign(side.vectors.col(i));
        Eigen::MatrixXd w = a.transpose() * side.vectors;
        OrthoColumns right = orthonormal_columns(w, k, sigma1, /*canonicalize=*/false);
        out.left = from_eigen(side.vectors);
        out.right = from_eigen(right.basis);
    } else {
        // Eigen side holds the right vectors; left comes from products and
        // carries the sign convention, flips propagate to the right side.
        Eigen::MatrixXd w = a * side.vectors;
        OrthoColumns left = orthonormal_columns(w, k, sigma1, /*canonicalize=*/true);
        for (int i = 0; i < k; ++i) side.vectors.col(i) *= left.flips[static_cast<std::size_t>(i)];
        out.left = from_eigen(left.basis);
        out.right = from_eigen(side.vectors);
    }
    return out;
}

}  // namespace

TruncatedSvd truncated_svd_gram(const Matrix& m, int k) {
    check_svd_args(m, k);
    const auto a = as_eigen(m);
    if (a.norm() == 0.0) return zero_matrix_svd(m.rows(), m.cols(), k);
    const bool side_is_rows = m.rows() <= m.cols();
    Eigen::MatrixXd gram = side_is_rows ? Eigen::MatrixXd(a * a.transpose())
                                        : Eigen::MatrixXd(a.transpose() * a);
    return assemble_svd(a, side_is_rows, gram_side_basis(gram, k), k);
}

TruncatedSvd truncated_svd_subspace(const Matrix& m, int k) {
    check_svd_args(m, k);
    const auto a = as_eigen(m);
    if (a.norm() == 0.0) return zero_matrix_svd(m.rows(), m.cols(), k);
    const bool side_is_rows = m.rows() <= m.cols();
    const int side = std::min(m.rows(), m.cols());
    if (k + kOversample >= side) return truncated_svd_gram(m, k);
    return assemble_svd(a, side_is_rows, subspace_side_basis(a, side_is_rows, k), k);
}

LeftSingularBasis basis_from_side(SideBasis side, int k) {
    LeftSingularBasis out;
    const double sigma1 = side.sigma.size() ? side.sigma[0] : 0.0;
    out.singular_values.assign(static_cast<std::size_t>(k), 0.0);
    while (out.numerical_rank < k && side.sigma[out.numerical_rank] > sigma1 * kRankFloor)
        ++out.numerical_rank;
    for (int i = 0; i < out.numerical_rank; ++i) {
        canonical_sign(side.vectors.col(i));
        out.singular_values[static_cast<std::size_t>(i)] = side.sigma[i];
    }
    for (int i = out.numerical_rank; i < k; ++i)
        side.vectors.col(i) = completion_column(side.vectors, i);
    out.completed = out.numerical_rank < k;
    out.basis = from_eigen(side.vectors);
    return out;
}

LeftSingularBasis basis_from_row_gram(const Eigen::MatrixXd& gram, int k) {
    if (k < 1 || k > gram.rows()) throw ArgumentError("k must satisfy 1 <= k <= rows");
    return basis_from_side(gram_side_basis(gram, k), k);
}

LeftSingularBasis basis_from_products(const Eigen::MatrixXd& w, const Eigen::VectorXd& sigma,
                                      int k, double sigma1) {
    if (k < 1 || k > w.rows()) throw ArgumentError("k must satisfy 1 <= k <= rows");
    OrthoColumns cols = orthonormal_columns(w, k, sigma1, /*canonicalize=*/true);
    LeftSingularBasis out;
    out.basis = from_eigen(cols.basis);
    out.singular_values.assign(static_cast<std::size_t>(k), 0.0);
    for (int i = 0; i < k && i < sigma.size(); ++i)
        if (cols.backed[static_cast<std::size_t>(i)])
            out.singular_values[static_cast<std::size_t>(i)] = sigma[i];
    out.numerical_rank = cols.numerical_rank;
    out.completed = cols.completed;
    return out;
}

}  // namespace detail

TruncatedSvd truncated_svd(const Matrix& m, int k) {
    detail::check_svd_args(m, k);
    if (std::min(m.rows(), m.cols()) <= detail::kGramPathLimit)
        return detail::truncated_svd_gram(m, k);
    return detail::truncated_svd_subspace(m, k);
}

Matrix leading_left_singular_vectors(const Matrix& m, int k) {
    return truncated_svd(m, k).left;
}

Matrix low_rank_approx(const Matrix& m, int k) {
    TruncatedSvd svd = truncated_svd(m, k);
    const auto u = detail::as_eigen(svd.left);
    const auto v = detail::as_eigen(svd.right);
    Eigen::VectorXd s = Eigen::Map<const Eigen::VectorXd>(svd.singular_values.data(), k);
    return detail::from_eigen(u * s.asDiagonal() * v.transpose());
}

LeftSingularBasis left_singular_basis(const Matrix& m, int k) {
    if (m.rows() < 1 || m.cols() < 1) throw ArgumentError("matrix must be nonempty");
    if (k < 1 || k > m.rows()) throw ArgumentError("k must satisfy 1 <= k <= rows");
    const auto a = detail::as_eigen(m);

    if (a.norm() == 0.0) {
        LeftSingularBasis out;
        out.basis = Matrix(m.rows(), k);
        for (int i = 0; i < k; ++i) out.basis(i, i) = 1.0;
        out.singular_values.assign(static_cast<std::size_t>(k), 0.0);
        out.numerical_rank = 0;
        out.completed = true;
        return out;
    }

    // Work from whichever side is cheaper: the rows-side Gram directly yields
    // the left vectors; otherwise the columns side plus products. Requests for
    // more directions than the columns side can supply (k > cols) take every
    // data direction and let the products path complete the rest.
    if (m.rows() <= m.cols() && k <= m.cols()) {
        if (m.rows() <= detail::kGramPathLimit || k + detail::kOversample >= m.rows())
            return detail::basis_from_row_gram(a * a.transpose(), k);
        return detail::basis_from_side(detail::subspace_side_basis(a, /*side_is_rows=*/true, k),
                                       k);
    }

    const int kc = std::min(k, m.cols());
    detail::SideBasis side;
    if (m.cols() <= detail::kGramPathLimit || kc + detail::kOversample >= m.cols())
        side = detail::gram_side_basis(a.transpose() * a, kc);
    else
        side = detail::subspace_side_basis(a, /*side_is_rows=*/false, kc);
    Eigen::MatrixXd w = a * side.vectors;
    return detail::basis_from_products(w, side.sigma, k, side.sigma[0]);
}

void set_thread_count(int n) { Eigen::setNbThreads(n < 1 ? 0 : n); }

}  // namespace mach
