#include "mach/metrics.hpp"

#include "internal.hpp"
#include "mach/errors.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

namespace mach {
namespace {

// Two leading components of a mode count as tied when their core slice
// norms differ by no more than this, relative to the larger one.
constexpr double kTieGap = 1e-6;

void check_same_shape(const TuckerModel& exact, const TuckerModel& approx) {
    if (exact.factors.size() != approx.factors.size())
        throw ShapeError("models have orders " + std::to_string(exact.factors.size()) +
                         " and " + std::to_string(approx.factors.size()));
    for (std::size_t m = 0; m < exact.factors.size(); ++m)
        if (exact.factors[m].rows() != approx.factors[m].rows())
            throw ShapeError("mode " + std::to_string(m + 1) + " has " +
                             std::to_string(exact.factors[m].rows()) + " rows in one model and " +
                             std::to_string(approx.factors[m].rows()) + " in the other");
}

std::span<const double> factor_column(const Matrix& f, int component) {
    return {f.data() + static_cast<std::size_t>(component - 1) * static_cast<std::size_t>(f.rows()),
            static_cast<std::size_t>(f.rows())};
}

// Norms of the core's slices along one mode, in component order. For a
// closed-form decomposition these are the mode's leading singular values.
std::vector<double> core_slice_norms(const DenseTensor& core, int mode) {
    const std::vector<std::int64_t> strides = detail::strides_of(core.dims());
    const std::int64_t stride = strides[static_cast<std::size_t>(mode)];
    const std::int64_t len = core.dim(mode);
    std::vector<double> sq(static_cast<std::size_t>(len), 0.0);
    const double* v = core.data();
    for (std::int64_t i = 0; i < core.size(); ++i)
        sq[static_cast<std::size_t>((i / stride) % len)] += v[i] * v[i];
    for (double& s : sq) s = std::sqrt(s);
    return sq;
}

bool top_two_tied(std::vector<double> norms) {
    if (norms.size() < 2) return false;
    std::sort(norms.begin(), norms.end(), std::greater<>());
    return norms[0] - norms[1] <= kTieGap * norms[0];
}

// Sine of the largest principal angle between the spans of the leading r
// columns of a and b, as the spectral norm of a - b (b^T a).
double subspace_sin(const Matrix& a, const Matrix& b, int r) {
    const auto ae = detail::as_eigen(a).leftCols(r);
    const auto be = detail::as_eigen(b).leftCols(r);
    const Eigen::MatrixXd residual = ae - be * (be.transpose() * ae);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(residual.transpose() * residual,
                                                       Eigen::EigenvaluesOnly);
    return std::sqrt(std::max(0.0, eig.eigenvalues().maxCoeff()));
}

}  // namespace

double pearson(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size())
        throw ShapeError("correlation inputs have lengths " + std::to_string(x.size()) +
                         " and " + std::to_string(y.size()));
    const std::int64_t n = static_cast<std::int64_t>(x.size());
    if (n < 2) throw ArgumentError("correlation needs at least 2 samples");
    const bool x_const = std::all_of(x.begin(), x.end(), [&](double v) { return v == x[0]; });
    const bool y_const = std::all_of(y.begin(), y.end(), [&](double v) { return v == y[0]; });
    if (x_const || y_const)
        throw ArgumentError("correlation is undefined for a zero-variance input");
    const double mx = detail::pairwise_sum(0, n, [&](std::int64_t i) { return x[static_cast<std::size_t>(i)]; }) / static_cast<double>(n);
    const double my = detail::pairwise_sum(0, n, [&](std::int64_t i) { return y[static_cast<std::size_t>(i)]; }) / static_cast<double>(n);
    const double sxx = detail::pairwise_sum(0, n, [&](std::int64_t i) {
        const double d = x[static_cast<std::size_t>(i)] - mx;
        return d * d;
    });
    const double syy = detail::pairwise_sum(0, n, [&](std::int64_t i) {
        const double d = y[static_cast<std::size_t>(i)] - my;
        return d * d;
    });
    const double sxy = detail::pairwise_sum(0, n, [&](std::int64_t i) {
        return (x[static_cast<std::size_t>(i)] - mx) * (y[static_cast<std::size_t>(i)] - my);
    });
    if (sxx == 0.0 || syy == 0.0)
        throw ArgumentError("correlation is undefined for a zero-variance input");
    return sxy / std::sqrt(sxx * syy);
}

double pc_correlation(const TuckerModel& exact, const TuckerModel& approx, int mode,
                      int component, bool* flipped) {
    check_same_shape(exact, approx);
    const int d = static_cast<int>(exact.factors.size());
    if (mode < 0 || mode >= d)
        throw ArgumentError("mode " + std::to_string(mode + 1) + " out of range for order " +
                            std::to_string(d));
    const int limit = std::min(exact.ranks[static_cast<std::size_t>(mode)],
                               approx.ranks[static_cast<std::size_t>(mode)]);
    if (component < 1 || component > limit)
        throw ArgumentError("component " + std::to_string(component) + " out of range; mode " +
                            std::to_string(mode + 1) + " has at most " + std::to_string(limit) +
                            " shared components");
    const std::span<const double> a = factor_column(exact.factors[static_cast<std::size_t>(mode)], component);
    const std::span<const double> b = factor_column(approx.factors[static_cast<std::size_t>(mode)], component);
    const double dot = detail::pairwise_sum(0, static_cast<std::int64_t>(a.size()),
                                            [&](std::int64_t i) { return a[static_cast<std::size_t>(i)] * b[static_cast<std::size_t>(i)]; });
    const bool flip = dot < 0.0;
    if (flipped) *flipped = flip;
    if (!flip) return pearson(a, b);
    std::vector<double> aligned(b.begin(), b.end());
    for (double& v : aligned) v = -v;
    return pearson(a, aligned);
}

ComparisonReport compare(const TuckerModel& exact, const TuckerModel& approx,
                         const DenseTensor& reference) {
    check_same_shape(exact, approx);
    if (reference.order() != static_cast<int>(exact.factors.size()))
        throw ShapeError("reference has order " + std::to_string(reference.order()) +
                         ", models have order " + std::to_string(exact.factors.size()));
    for (int m = 0; m < reference.order(); ++m)
        if (reference.dim(m) != exact.factors[static_cast<std::size_t>(m)].rows())
            throw ShapeError("mode " + std::to_string(m + 1) + " has " +
                             std::to_string(reference.dim(m)) + " entries in the reference and " +
                             std::to_string(exact.factors[static_cast<std::size_t>(m)].rows()) +
                             " in the models");
    const int d = reference.order();
    ComparisonReport rep;
    rep.per_mode_rho.resize(static_cast<std::size_t>(d));
    rep.flipped.assign(static_cast<std::size_t>(d), false);
    rep.tied.assign(static_cast<std::size_t>(d), false);
    rep.tie_subspace_sin.assign(static_cast<std::size_t>(d), 0.0);
    for (int m = 0; m < d; ++m) {
        bool flip = false;
        rep.per_mode_rho[static_cast<std::size_t>(m)] = pc_correlation(exact, approx, m, 1, &flip);
        rep.flipped[static_cast<std::size_t>(m)] = flip;
        if (top_two_tied(core_slice_norms(exact.core, m)) ||
            top_two_tied(core_slice_norms(approx.core, m))) {
            rep.tied[static_cast<std::size_t>(m)] = true;
            const int r = std::min(exact.ranks[static_cast<std::size_t>(m)],
                                   approx.ranks[static_cast<std::size_t>(m)]);
            rep.tie_subspace_sin[static_cast<std::size_t>(m)] =
                subspace_sin(exact.factors[static_cast<std::size_t>(m)],
                             approx.factors[static_cast<std::size_t>(m)], r);
        }
    }
    rep.accuracy_exact = accuracy(reference, exact);
    rep.accuracy_mach = accuracy(reference, approx);
    rep.core_interaction = {exact.core.data()[0], approx.core.data()[0]};
    return rep;
}

}  // namespace mach
