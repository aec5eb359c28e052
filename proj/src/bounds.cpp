#include "mach/bounds.hpp"

#include "internal.hpp"
#include "mach/errors.hpp"
#include "sparse_kernels.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

namespace mach {

namespace {

// max_j (8 sum_{k != j} ln I_k)^4 / prod_{k != j} I_k without argument
// validation, shared with the bound report (which accepts any tensor dims).
double min_probability_core(const std::vector<int>& dims) {
    double worst = 0.0;
    for (std::size_t j = 0; j < dims.size(); ++j) {
        double log_sum = 0.0;
        double prod = 1.0;
        for (std::size_t k = 0; k < dims.size(); ++k) {
            if (k == j) continue;
            log_sum += std::log(static_cast<double>(dims[k]));
            prod *= static_cast<double>(dims[k]);
        }
        const double base = 8.0 * log_sum;
        worst = std::max(worst, base * base * base * base / prod);
    }
    return worst;
}

// Full sigma^2 spectrum (non-increasing) of the mode-m matricization of a
// dense tensor, from the shorter side's Gram. Diagnostic-grade: the complete
// spectrum lets residuals be tail sums, which stay exact where the
// norm-difference route would cancel.
std::vector<double> dense_mode_spectrum(const DenseTensor& x, int mode) {
    const Matrix m = matricize(x, mode);
    const auto a = detail::as_eigen(m);
    Eigen::MatrixXd gram = m.rows() <= m.cols() ? Eigen::MatrixXd(a * a.transpose())
                                                : Eigen::MatrixXd(a.transpose() * a);
    gram = 0.5 * (gram + gram.transpose()).eval();
    const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(gram, Eigen::EigenvaluesOnly);
    if (es.info() != Eigen::Success)
        throw ConvergenceError("symmetric eigendecomposition failed", 1);
    const auto n = es.eigenvalues().size();
    std::vector<double> sigma2(static_cast<std::size_t>(n));
    for (Eigen::Index i = 0; i < n; ++i)
        sigma2[static_cast<std::size_t>(i)] = std::max(0.0, es.eigenvalues()[n - 1 - i]);
    return sigma2;
}

std::vector<double> sparse_mode_spectrum(const SparseTensor& t, int mode) {
    const auto s = detail::split_at(t.dims(), mode);
    const std::int64_t side = std::min<std::int64_t>(s.len, s.inner * s.outer);
    const std::vector<double> sigma =
        detail::sparse_mode_singular_values(t, mode, static_cast<int>(side));
    std::vector<double> sigma2(sigma.size());
    for (std::size_t i = 0; i < sigma.size(); ++i) sigma2[i] = sigma[i] * sigma[i];
    return sigma2;
}

struct SplitNorms {
    double lowrank = 0.0;   // |X_(i),r|
    double residual = 0.0;  // |X_(i) - X_(i),r|
};

// Head/tail Frobenius norms of a non-increasing sigma^2 spectrum split at
// rank r; both sums run smallest-first.
SplitNorms split_spectrum(const std::vector<double>& sigma2, int r) {
    const int n = static_cast<int>(sigma2.size());
    const int head = std::min(r, n);
    SplitNorms out;
    double acc = 0.0;
    for (int l = n - 1; l >= head; --l) acc += sigma2[static_cast<std::size_t>(l)];
    out.residual = std::sqrt(acc);
    acc = 0.0;
    for (int l = head - 1; l >= 0; --l) acc += sigma2[static_cast<std::size_t>(l)];
    out.lowrank = std::sqrt(acc);
    return out;
}

// Everything in a BoundReport that depends on shape and p alone.
BoundReport conditions_core(const std::vector<int>& dims, double p) {
    BoundReport rep;
    rep.p = p;
    rep.p_min = min_probability_core(dims);
    rep.success_probability = 1.0;
    const int d = static_cast<int>(dims.size());
    for (int i = 0; i < d; ++i) {
        double log_sum = 0.0;
        for (int k = 0; k < d; ++k)
            if (k != i) log_sum += std::log(static_cast<double>(dims[static_cast<std::size_t>(k)]));
        rep.success_probability *= 1.0 - std::exp(-19.0 * log_sum);
    }
    double total = 1.0;
    for (int n : dims) total *= static_cast<double>(n);
    rep.dims_large_enough = true;
    rep.dims_balanced = true;
    for (int n : dims) {
        if (n < 76) rep.dims_large_enough = false;
        if (static_cast<double>(n) * static_cast<double>(n) > total) rep.dims_balanced = false;
    }
    rep.p_above_min = p >= rep.p_min;
    rep.conditions_met = rep.dims_large_enough && rep.dims_balanced && rep.p_above_min;
    return rep;
}

void check_bound_args(const DenseTensor& x, const SparseTensor& xhat,
                      const std::vector<int>& ranks, double p) {
    if (x.dims() != xhat.dims()) throw ShapeError("x and xhat must share dims");
    if (ranks.size() != x.dims().size())
        throw ArgumentError("ranks must name one rank per mode");
    for (std::size_t m = 0; m < ranks.size(); ++m)
        if (ranks[m] < 1 || ranks[m] > x.dims()[m])
            throw ArgumentError("rank for mode " + std::to_string(m + 1) + " must be in [1, " +
                                std::to_string(x.dims()[m]) + "]");
    if (!(p > 0.0 && p <= 1.0)) throw ArgumentError("p must be in (0, 1]");
}

}  // namespace

AchlioptasBounds achlioptas_bounds(double b, std::int64_t n, std::int64_t k, double p) {
    if (!(b >= 0.0)) throw ArgumentError("b must be >= 0");
    if (n < 1) throw ArgumentError("n must be >= 1");
    if (k < 1) throw ArgumentError("k must be >= 1");
    if (!(p > 0.0 && p <= 1.0)) throw ArgumentError("p must be in (0, 1]");
    const double nd = static_cast<double>(n);
    const double kd = static_cast<double>(k);
    return {4.0 * b * std::sqrt(nd / p), 4.0 * b * std::sqrt(nd * kd / p)};
}

double min_sampling_probability(const std::vector<int>& dims) {
    if (dims.size() < 2) throw ArgumentError("at least two modes required");
    for (int d : dims)
        if (d < 2) throw ArgumentError("every dimension must be >= 2");
    return min_probability_core(dims);
}

BoundReport theorem1_conditions(const std::vector<int>& dims, double p) {
    if (dims.size() < 2) throw ArgumentError("at least two modes required");
    for (int d : dims)
        if (d < 2) throw ArgumentError("every dimension must be >= 2");
    if (!(p > 0.0 && p <= 1.0)) throw ArgumentError("p must be in (0, 1]");
    return conditions_core(dims, p);
}

BoundReport theorem1_bound(const DenseTensor& x, const SparseTensor& xhat,
                           const std::vector<int>& ranks, double p) {
    check_bound_args(x, xhat, ranks, p);
    const int d = x.order();
    BoundReport rep = conditions_core(x.dims(), p);
    for (std::int64_t i = 0; i < x.size(); ++i) rep.b = std::max(rep.b, std::abs(x.data()[i]));

    rep.per_mode.resize(static_cast<std::size_t>(d));
    for (int i = 0; i < d; ++i) {
        BoundModeReport& mode = rep.per_mode[static_cast<std::size_t>(i)];
        mode.rank = ranks[static_cast<std::size_t>(i)];
        const SplitNorms xs = split_spectrum(dense_mode_spectrum(x, i), mode.rank);
        mode.x_residual = xs.residual;
        mode.x_lowrank_norm = xs.lowrank;
        mode.xhat_residual = split_spectrum(sparse_mode_spectrum(xhat, i), mode.rank).residual;
    }

    for (int i = 0; i < d; ++i) {
        BoundModeReport& mode = rep.per_mode[static_cast<std::size_t>(i)];
        double others = 1.0;
        double cross = 0.0;
        for (int j = 0; j < d; ++j) {
            if (j == i) continue;
            others *= static_cast<double>(x.dims()[static_cast<std::size_t>(j)]);
            cross += rep.per_mode[static_cast<std::size_t>(j)].xhat_residual;
        }
        const double ratio = static_cast<double>(mode.rank) / p * others;
        mode.t_i = mode.x_residual + 4.0 * rep.b * std::sqrt(ratio) +
                   4.0 * std::sqrt(mode.x_lowrank_norm * rep.b) * std::pow(ratio, 0.25) + cross;
        rep.t = i == 0 ? mode.t_i : std::min(rep.t, mode.t_i);
    }
    return rep;
}

}  // namespace mach
