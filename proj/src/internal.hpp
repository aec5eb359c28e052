#pragma once

// Shared implementation helpers; not installed.

#include "mach/errors.hpp"
#include "mach/tensor.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

namespace mach::detail {

/// Product of dims with validation (d >= 1, every I_j >= 1, no int64 overflow).
std::int64_t checked_size(const std::vector<int>& dims);

/// Strides for a first-mode-fastest layout.
std::vector<std::int64_t> strides_of(const std::vector<int>& dims);

/// Factorization of the flat layout around one mode: flat = a + r*inner +
/// c*inner*len with a < inner, r < len, c < outer.
struct ModeSplit {
    std::int64_t inner = 1;
    std::int64_t outer = 1;
    int len = 0;
};

ModeSplit split_at(const std::vector<int>& dims, int mode);

/// Pairwise (cascade) summation of f(0..n-1). Error grows like eps*log2(n)
/// instead of eps*n, so sums agree across element reorderings to ~1e-15
/// relative even for multi-million-element tensors.
template <typename F>
double pairwise_sum(std::int64_t lo, std::int64_t hi, F&& f) {
    const std::int64_t n = hi - lo;
    if (n <= 64) {
        double s = 0.0;
        for (std::int64_t i = lo; i < hi; ++i) s += f(i);
        return s;
    }
    const std::int64_t mid = lo + n / 2;
    return pairwise_sum(lo, mid, f) + pairwise_sum(mid, hi, f);
}

inline Eigen::Map<const Eigen::MatrixXd> as_eigen(const Matrix& m) {
    return {m.data(), m.rows(), m.cols()};
}

inline Eigen::Map<Eigen::MatrixXd> as_eigen(Matrix& m) {
    return {m.data(), m.rows(), m.cols()};
}

inline Matrix from_eigen(const Eigen::MatrixXd& e) {
    Matrix m(static_cast<int>(e.rows()), static_cast<int>(e.cols()));
    Eigen::Map<Eigen::MatrixXd>(m.data(), e.rows(), e.cols()) = e;
    return m;
}

/// Sign convention for singular vectors: the entry of largest magnitude is
/// made nonnegative, ties broken by lowest index. Returns -1.0 if flipped.
double canonical_sign(Eigen::Ref<Eigen::VectorXd> u);

/// Counter-based uniform stream in [0, 1): a pure function of (seed, counter),
/// so draws are identical no matter the traversal order or thread count.
inline std::uint64_t counter_hash64(std::uint64_t seed, std::uint64_t counter) {
    std::uint64_t z = seed + (counter + 1) * 0x9E3779B97F4A7C15ULL;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

inline double counter_uniform01(std::uint64_t seed, std::uint64_t counter) {
    return static_cast<double>(counter_hash64(seed, counter) >> 11) * 0x1.0p-53;
}

}  // namespace mach::detail
