#include "mach/tucker.hpp"

#include "internal.hpp"
#include "mach/errors.hpp"
#include "mach/linalg.hpp"
#include "sparse_kernels.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <utility>
#include <vector>

namespace mach {

namespace {

void check_ranks(const std::vector<int>& dims, const std::vector<int>& ranks) {
    if (ranks.size() != dims.size())
        throw ArgumentError("ranks must name one rank per mode");
    for (std::size_t m = 0; m < dims.size(); ++m)
        if (ranks[m] < 1 || ranks[m] > dims[m])
            throw ArgumentError("rank for mode " + std::to_string(m + 1) +
                                " must be in [1, " + std::to_string(dims[m]) + "]");
}

void check_hooi_config(const HooiConfig& cfg) {
    if (cfg.max_iterations < 1) throw ArgumentError("max_iterations must be >= 1");
    if (!(cfg.fit_tolerance >= 0.0)) throw ArgumentError("fit_tolerance must be >= 0");
}

std::string completion_warning(int mode, int numerical_rank, int requested) {
    return "mode " + std::to_string(mode + 1) + " matricization has numerical rank " +
           std::to_string(numerical_rank) + " below requested rank " +
           std::to_string(requested) + "; remaining directions were basis-completed";
}

double residual_norm(const DenseTensor& t, const DenseTensor& rec) {
    const double* a = t.data();
    const double* b = rec.data();
    return std::sqrt(detail::pairwise_sum(
        0, t.size(), [a, b](std::int64_t i) { return (a[i] - b[i]) * (a[i] - b[i]); }));
}

// Fit = accuracy against the decomposed tensor. The residual is accumulated
// entrywise against the reconstruction; the norm-difference shortcut
// |t|^2 - |core|^2 would bury near-exact models under sqrt(eps) cancellation
// noise instead of grading them 1.0.
double model_fit(const DenseTensor& t, double norm_t, const TuckerModel& model) {
    if (norm_t == 0.0) return 1.0;
    return 1.0 - residual_norm(t, reconstruct(model)) / norm_t;
}

double model_fit(const SparseTensor& t, double norm_t, const TuckerModel& model) {
    if (norm_t == 0.0) return 1.0;
    DenseTensor diff = reconstruct(model);
    double* b = diff.data();
    for (const auto& e : t.entries()) b[e.index] -= e.value;
    const double err = std::sqrt(
        detail::pairwise_sum(0, diff.size(), [b](std::int64_t i) { return b[i] * b[i]; }));
    return 1.0 - err / norm_t;
}

// Density at which a sparse input stops paying for sparse kernels; also the
// switch that lets a keep-everything sparsification reproduce the dense
// pipeline bit for bit.
constexpr double kDensifyThreshold = 0.25;

DenseTensor sparse_core(const SparseTensor& t, const std::vector<Matrix>& factors) {
    DenseTensor y = mode_product(t, transpose(factors[0]), 0);
    for (int m = 1; m < t.order(); ++m) y = mode_product(y, transpose(factors[m]), m);
    return y;
}

// Shared HOOI loop; Project(e, i) must return the input tensor projected by
// the transposed factors of every mode except i, and CoreOf(factors) the full
// projection.
template <typename Tensor, typename Project, typename CoreOf>
TuckerModel hooi_loop(const Tensor& t, const std::vector<int>& ranks, const HooiConfig& cfg,
                      TuckerModel init, Project&& project, CoreOf&& core_of) {
    const double norm_t = tensor_norm(t);
    TuckerModel model = std::move(init);
    model.sweep_fits.assign(1, model.fit);
    model.iterations = 0;
    double prev_fit = model.fit;
    for (int sweep = 1; sweep <= cfg.max_iterations; ++sweep) {
        std::vector<std::string> warnings;
        for (int i = 0; i < t.order(); ++i) {
            DenseTensor y = project(model.factors, i);
            LeftSingularBasis basis = left_singular_basis(matricize(y, i), ranks[i]);
            if (basis.completed)
                warnings.push_back(completion_warning(i, basis.numerical_rank, ranks[i]));
            model.factors[static_cast<std::size_t>(i)] = std::move(basis.basis);
        }
        model.core = core_of(model.factors);
        model.fit = model_fit(t, norm_t, model);
        model.sweep_fits.push_back(model.fit);
        model.iterations = sweep;
        model.warnings = std::move(warnings);
        if (model.fit - prev_fit < cfg.fit_tolerance) break;
        prev_fit = model.fit;
    }
    return model;
}

// Projection of a dense tensor by all transposed factors except mode i.
DenseTensor project_except(const DenseTensor& t, const std::vector<Matrix>& factors, int skip) {
    DenseTensor y;
    bool first = true;
    for (int m = 0; m < t.order(); ++m) {
        if (m == skip) continue;
        y = mode_product(first ? t : y, transpose(factors[static_cast<std::size_t>(m)]), m);
        first = false;
    }
    return first ? t : y;
}

DenseTensor project_except(const SparseTensor& t, const std::vector<Matrix>& factors, int skip) {
    const int d = t.order();
    int first_mode = skip == 0 ? 1 : 0;
    if (d == 1) return densify(t);
    DenseTensor y = mode_product(t, transpose(factors[static_cast<std::size_t>(first_mode)]),
                                 first_mode);
    for (int m = first_mode + 1; m < d; ++m) {
        if (m == skip) continue;
        y = mode_product(y, transpose(factors[static_cast<std::size_t>(m)]), m);
    }
    return y;
}

}  // namespace

TuckerModel hosvd(const DenseTensor& t, const std::vector<int>& ranks) {
    check_ranks(t.dims(), ranks);
    TuckerModel model;
    model.ranks = ranks;
    model.factors.reserve(ranks.size());
    for (int m = 0; m < t.order(); ++m) {
        LeftSingularBasis basis = left_singular_basis(matricize(t, m), ranks[m]);
        if (basis.completed)
            model.warnings.push_back(completion_warning(m, basis.numerical_rank, ranks[m]));
        model.factors.push_back(std::move(basis.basis));
    }
    model.core = core_tensor(t, model.factors);
    model.fit = model_fit(t, tensor_norm(t), model);
    model.sweep_fits.assign(1, model.fit);
    return model;
}

TuckerModel hosvd(const SparseTensor& t, const std::vector<int>& ranks) {
    check_ranks(t.dims(), ranks);
    if (static_cast<double>(t.nnz()) >= kDensifyThreshold * static_cast<double>(t.size()))
        return hosvd(densify(t), ranks);
    TuckerModel model;
    model.ranks = ranks;
    model.factors.reserve(ranks.size());
    for (int m = 0; m < t.order(); ++m) {
        LeftSingularBasis basis = detail::sparse_mode_basis(t, m, ranks[m]);
        if (basis.completed)
            model.warnings.push_back(completion_warning(m, basis.numerical_rank, ranks[m]));
        model.factors.push_back(std::move(basis.basis));
    }
    model.core = sparse_core(t, model.factors);
    model.fit = model_fit(t, tensor_norm(t), model);
    model.sweep_fits.assign(1, model.fit);
    return model;
}

TuckerModel hooi(const DenseTensor& t, const std::vector<int>& ranks, const HooiConfig& cfg) {
    check_ranks(t.dims(), ranks);
    check_hooi_config(cfg);
    return hooi_loop(
        t, ranks, cfg, hosvd(t, ranks),
        [&](const std::vector<Matrix>& factors, int skip) {
            return project_except(t, factors, skip);
        },
        [&](const std::vector<Matrix>& factors) { return core_tensor(t, factors); });
}

TuckerModel hooi(const SparseTensor& t, const std::vector<int>& ranks, const HooiConfig& cfg) {
    check_ranks(t.dims(), ranks);
    check_hooi_config(cfg);
    if (static_cast<double>(t.nnz()) >= kDensifyThreshold * static_cast<double>(t.size()))
        return hooi(densify(t), ranks, cfg);
    return hooi_loop(
        t, ranks, cfg, hosvd(t, ranks),
        [&](const std::vector<Matrix>& factors, int skip) {
            return project_except(t, factors, skip);
        },
        [&](const std::vector<Matrix>& factors) { return sparse_core(t, factors); });
}

DenseTensor core_tensor(const DenseTensor& t, const std::vector<Matrix>& factors) {
    if (static_cast<int>(factors.size()) != t.order())
        throw ArgumentError("one factor per mode required");
    DenseTensor y = t;
    for (int m = 0; m < t.order(); ++m)
        y = mode_product(y, transpose(factors[static_cast<std::size_t>(m)]), m);
    return y;
}

DenseTensor reconstruct(const TuckerModel& model) {
    DenseTensor y = model.core;
    for (int m = 0; m < model.core.order(); ++m)
        y = mode_product(y, model.factors[static_cast<std::size_t>(m)], m);
    return y;
}

double accuracy(const DenseTensor& t, const TuckerModel& model) {
    const double norm_t = tensor_norm(t);
    if (norm_t == 0.0) throw ArgumentError("accuracy needs a reference tensor with nonzero norm");
    DenseTensor rec = reconstruct(model);
    if (rec.dims() != t.dims()) throw ShapeError("model reconstructs to a different shape");
    return 1.0 - residual_norm(t, rec) / norm_t;
}

}  // namespace mach
