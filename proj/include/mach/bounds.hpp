#pragma once

#include "mach/tensor.hpp"

#include <cstdint>
#include <vector>

namespace mach {

/// Spectral and Frobenius deviation bounds for a rank-k slice of an n x n
/// entrywise-sampled matrix with entries bounded by b.
struct AchlioptasBounds {
    double two_norm = 0.0;
    double frobenius = 0.0;
};

/// (4 b sqrt(n / p), 4 b sqrt(n k / p)). Requires b >= 0, n >= 1, k >= 1,
/// 0 < p <= 1.
AchlioptasBounds achlioptas_bounds(double b, std::int64_t n, std::int64_t k, double p);

/// Smallest admissible sampling probability for the reconstruction guarantee:
/// max_j (8 sum_{k != j} ln I_k)^4 / prod_{k != j} I_k, natural logarithms.
/// Values above 1 signal that no admissible p exists for these dimensions.
/// Requires order >= 2 and every dimension >= 2.
double min_sampling_probability(const std::vector<int>& dims);

/// Per-mode ingredients of the reconstruction bound.
struct BoundModeReport {
    int rank = 0;
    double x_residual = 0.0;      // |X_(i) - X_(i),r_i|, original tensor
    double xhat_residual = 0.0;   // same residual on the sparsified tensor
    double x_lowrank_norm = 0.0;  // |X_(i),r_i|
    double t_i = 0.0;
};

/// Evaluation of the reconstruction-error bound t = min_i t_i together with
/// its applicability conditions. The bound is always computed; the flags say
/// whether its guarantee regime actually applies.
struct BoundReport {
    double b = 0.0;      // max |entry| of the original tensor
    double p = 0.0;
    double p_min = 0.0;
    double t = 0.0;
    double success_probability = 0.0;
    bool dims_large_enough = false;  // every I_n >= 76
    bool dims_balanced = false;      // every I_n^2 <= prod_j I_j
    bool p_above_min = false;        // p >= p_min
    bool conditions_met = false;     // all of the above
    std::vector<BoundModeReport> per_mode;
};

/// Shape-only evaluation: fills p, p_min, success_probability, and the
/// condition flags from the dimensions alone, leaving b, t, and per_mode
/// empty. Requires order >= 2, every dimension >= 2, and p in (0, 1].
BoundReport theorem1_conditions(const std::vector<int>& dims, double p);

/// Evaluates, per mode i,
///   t_i = |X_(i) - X_(i),r_i|
///       + 4 b sqrt(r_i / p * prod_{k != i} I_k)
///       + 4 sqrt(|X_(i),r_i| b) * (r_i / p * prod_{k != i} I_k)^{1/4}
///       + sum_{j != i} |Xhat_(j) - Xhat_(j),r_j|
/// and t = min_i t_i. Purely diagnostic: no truncation is performed. x and
/// xhat must share dims; ranks must be valid for them.
BoundReport theorem1_bound(const DenseTensor& x, const SparseTensor& xhat,
                           const std::vector<int>& ranks, double p);

}  // namespace mach
