#pragma once

#include "mach/tensor.hpp"

#include <string>
#include <vector>

namespace mach {

/// Tucker decomposition result: a small core coupling one orthonormal factor
/// per mode. fit is measured against the tensor the decomposition was given
/// (the sparsified one when called through the sparsified pipelines);
/// sweep_fits holds the fit after initialization and after each sweep.
struct TuckerModel {
    DenseTensor core;
    std::vector<Matrix> factors;
    std::vector<int> ranks;
    int iterations = 0;
    double fit = 0.0;
    std::vector<double> sweep_fits;
    std::vector<std::string> warnings;
};

/// Alternating-sweep settings. Initialization is HOSVD, so runs are seed-free
/// and deterministic. A sweep whose fit improves by less than fit_tolerance
/// ends the iteration.
struct HooiConfig {
    int max_iterations = 50;
    double fit_tolerance = 1e-4;
};

/// Closed-form Tucker: per-mode leading left singular vectors of the
/// matricizations, core by projection. Requires 1 <= ranks[m] <= dim(m).
TuckerModel hosvd(const DenseTensor& t, const std::vector<int>& ranks);

/// Sparse input variant; dense enough inputs (density >= 0.25) are routed
/// through the dense path so that an everything-kept sparsification
/// reproduces the dense result bit for bit.
TuckerModel hosvd(const SparseTensor& t, const std::vector<int>& ranks);

/// Alternating least squares: HOSVD init, then per-mode updates from the
/// tensor projected along all other modes.
TuckerModel hooi(const DenseTensor& t, const std::vector<int>& ranks, const HooiConfig& cfg);
TuckerModel hooi(const SparseTensor& t, const std::vector<int>& ranks, const HooiConfig& cfg);

/// t x_1 A1^T x_2 ... x_d Ad^T; factor m must have dim(m) rows.
DenseTensor core_tensor(const DenseTensor& t, const std::vector<Matrix>& factors);

/// core x_1 A1 x_2 ... x_d Ad, back to the original shape.
DenseTensor reconstruct(const TuckerModel& model);

/// 1 - |t - reconstruct(model)| / |t|, the fit of the model against an
/// arbitrary reference tensor (not necessarily the one it was fitted on).
/// The reference must have nonzero norm.
double accuracy(const DenseTensor& t, const TuckerModel& model);

}  // namespace mach
