#include "sparse_kernels.hpp"

#include "internal.hpp"
#include "linalg_internal.hpp"

#include <algorithm>
#include <vector>

namespace mach::detail {

namespace {

struct Triple {
    std::int64_t major;
    std::int64_t minor;
    double value;
};

// Nonzeros as (major, minor, value) of the mode-m matricization; major is the
// bucketing key. by_column buckets on the column index, otherwise on the row.
std::vector<Triple> matricization_triples(const SparseTensor& t, int mode, bool by_column) {
    const auto s = split_at(t.dims(), mode);
    std::vector<Triple> triples;
    triples.reserve(t.entries().size());
    for (const auto& e : t.entries()) {
        const std::int64_t a = e.index % s.inner;
        const std::int64_t rest = e.index / s.inner;
        const std::int64_t row = rest % s.len;
        const std::int64_t col = a + (rest / s.len) * s.inner;
        if (by_column)
            triples.push_back({col, row, e.value});
        else
            triples.push_back({row, col, e.value});
    }
    std::sort(triples.begin(), triples.end(), [](const Triple& x, const Triple& y) {
        return x.major != y.major ? x.major < y.major : x.minor < y.minor;
    });
    return triples;
}

// Accumulates sum over buckets of the outer products of each bucket's minor
// pattern; result is symmetric n x n.
Eigen::MatrixXd bucket_gram(const std::vector<Triple>& triples, std::int64_t n) {
    Eigen::MatrixXd g = Eigen::MatrixXd::Zero(n, n);
    std::size_t i = 0;
    while (i < triples.size()) {
        std::size_t j = i;
        while (j < triples.size() && triples[j].major == triples[i].major) ++j;
        for (std::size_t x = i; x < j; ++x)
            for (std::size_t y = i; y <= x; ++y)
                g(triples[y].minor, triples[x].minor) += triples[y].value * triples[x].value;
        i = j;
    }
    g.triangularView<Eigen::StrictlyLower>() = g.transpose();
    return g;
}

}  // namespace

Eigen::MatrixXd sparse_row_gram(const SparseTensor& t, int mode) {
    const auto s = split_at(t.dims(), mode);
    return bucket_gram(matricization_triples(t, mode, /*by_column=*/true), s.len);
}

Eigen::MatrixXd sparse_col_gram(const SparseTensor& t, int mode, std::int64_t cols) {
    return bucket_gram(matricization_triples(t, mode, /*by_column=*/false), cols);
}

Eigen::MatrixXd sparse_matricization_times(const SparseTensor& t, int mode,
                                           const Eigen::MatrixXd& v) {
    const auto s = split_at(t.dims(), mode);
    Eigen::MatrixXd w = Eigen::MatrixXd::Zero(s.len, v.cols());
    for (const auto& e : t.entries()) {
        const std::int64_t a = e.index % s.inner;
        const std::int64_t rest = e.index / s.inner;
        const std::int64_t col = a + (rest / s.len) * s.inner;
        w.row(rest % s.len) += e.value * v.row(col);
    }
    return w;
}

LeftSingularBasis sparse_mode_basis(const SparseTensor& t, int mode, int k) {
    const auto s = split_at(t.dims(), mode);
    const std::int64_t cols = s.inner * s.outer;
    if (s.len <= cols) return basis_from_row_gram(sparse_row_gram(t, mode), k);
    const int kc = static_cast<int>(std::min<std::int64_t>(k, cols));
    SideBasis side = gram_side_basis(sparse_col_gram(t, mode, cols), kc);
    Eigen::MatrixXd w = sparse_matricization_times(t, mode, side.vectors);
    return basis_from_products(w, side.sigma, k, side.sigma[0]);
}

std::vector<double> sparse_mode_singular_values(const SparseTensor& t, int mode, int k) {
    const auto s = split_at(t.dims(), mode);
    const std::int64_t cols = s.inner * s.outer;
    const std::int64_t side = std::min<std::int64_t>(s.len, cols);
    const int kc = static_cast<int>(std::min<std::int64_t>(k, side));
    Eigen::MatrixXd gram =
        s.len <= cols ? sparse_row_gram(t, mode) : sparse_col_gram(t, mode, cols);
    SideBasis basis = gram_side_basis(gram, kc);
    return std::vector<double>(basis.sigma.data(), basis.sigma.data() + kc);
}

}  // namespace mach::detail
