#include "mach/tensor.hpp"

#include "mach/errors.hpp"
#include "oracles.hpp"

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

using namespace mach;

namespace {

bool bitwise_equal(const DenseTensor& a, const DenseTensor& b) {
    return a.dims() == b.dims() && a.values() == b.values();
}

double max_abs_diff(const DenseTensor& a, const DenseTensor& b) {
    REQUIRE(a.dims() == b.dims());
    double m = 0.0;
    for (std::int64_t i = 0; i < a.size(); ++i)
        m = std::max(m, std::abs(a.values()[static_cast<std::size_t>(i)] -
                                 b.values()[static_cast<std::size_t>(i)]));
    return m;
}

double max_abs_diff(const Matrix& a, const Matrix& b) {
    REQUIRE(a.rows() == b.rows());
    REQUIRE(a.cols() == b.cols());
    double m = 0.0;
    for (std::int64_t i = 0; i < a.size(); ++i)
        m = std::max(m, std::abs(a.data()[i] - b.data()[i]));
    return m;
}

}  // namespace

TEST_CASE("tensor_norm basics") {
    CHECK(tensor_norm(DenseTensor({3, 2, 5})) == 0.0);

    DenseTensor ones({2, 3, 4}, std::vector<double>(24, 1.0));
    CHECK(tensor_norm(ones) == doctest::Approx(std::sqrt(24.0)).epsilon(1e-15));

    DenseTensor t({2, 3});
    t.at(std::vector<int>{0, 1}) = 3.0;
    t.at(std::vector<int>{1, 2}) = 4.0;
    CHECK(tensor_norm(t) == doctest::Approx(5.0).epsilon(1e-15));

    SparseTensor s({2, 3}, std::vector<std::pair<std::vector<int>, double>>{
                               {{0, 1}, 3.0}, {{1, 2}, 4.0}});
    CHECK(tensor_norm(s) == doctest::Approx(5.0).epsilon(1e-15));
}

TEST_CASE("inner_product basics and oracle agreement") {
    DenseTensor ones({2, 2, 2}, std::vector<double>(8, 1.0));
    CHECK(inner_product(ones, ones) == doctest::Approx(8.0).epsilon(1e-15));
    CHECK(inner_product(ones, DenseTensor({2, 2, 2})) == 0.0);

    auto x = oracles::random_tensor({5, 6, 7}, 11);
    const double ip = inner_product(x, x);
    const double nrm = tensor_norm(x);
    CHECK(std::abs(ip - nrm * nrm) <= 1e-12 * ip);
    CHECK(std::abs(ip - oracles::oracle_inner_product(x, x)) <= 1e-12 * std::abs(ip));

    auto y = oracles::random_tensor({5, 6, 7}, 12);
    CHECK(inner_product(x, y) == inner_product(y, x));

    CHECK_THROWS_AS(inner_product(x, DenseTensor({5, 6, 8})), ShapeError);
}

TEST_CASE("inner_product is bilinear") {
    auto x = oracles::random_tensor({4, 3, 2}, 21);
    auto y = oracles::random_tensor({4, 3, 2}, 22);
    auto z = oracles::random_tensor({4, 3, 2}, 23);
    const double alpha = 0.37;

    std::vector<double> combo(static_cast<std::size_t>(x.size()));
    for (std::size_t i = 0; i < combo.size(); ++i)
        combo[i] = alpha * x.values()[i] + y.values()[i];
    DenseTensor lin({4, 3, 2}, combo);

    const double lhs = inner_product(lin, z);
    const double rhs = alpha * inner_product(x, z) + inner_product(y, z);
    CHECK(std::abs(lhs - rhs) <= 1e-12 * (1.0 + std::abs(lhs)));
}

TEST_CASE("matricize matches the index-formula oracle") {
    SUBCASE("d=2 mode 0 is the matrix itself") {
        DenseTensor t({2, 2}, {1.0, 2.0, 3.0, 4.0});
        Matrix m = matricize(t, 0);
        CHECK(m.rows() == 2);
        CHECK(m.cols() == 2);
        CHECK(m(0, 0) == 1.0);
        CHECK(m(1, 0) == 2.0);
        CHECK(m(0, 1) == 3.0);
        CHECK(m(1, 1) == 4.0);
    }
    SUBCASE("(2,3,4) all modes, brute-force formula") {
        auto t = oracles::random_tensor({2, 3, 4}, 31);
        for (int mode = 0; mode < 3; ++mode) {
            Matrix got = matricize(t, mode);
            Matrix want = oracles::oracle_matricize(t, mode);
            CHECK(got.rows() == want.rows());
            CHECK(got.cols() == want.cols());
            CHECK(max_abs_diff(got, want) == 0.0);
        }
    }
    SUBCASE("4-mode shape") {
        auto t = oracles::random_tensor({3, 2, 4, 2}, 32);
        for (int mode = 0; mode < 4; ++mode)
            CHECK(max_abs_diff(matricize(t, mode), oracles::oracle_matricize(t, mode)) == 0.0);
    }
    SUBCASE("mode out of range") {
        auto t = oracles::random_tensor({2, 2}, 33);
        CHECK_THROWS_AS(matricize(t, 2), ArgumentError);
        CHECK_THROWS_AS(matricize(t, -1), ArgumentError);
    }
}

TEST_CASE("refold inverts matricize bitwise") {
    for (const auto& dims :
         std::vector<std::vector<int>>{{7}, {3, 5}, {3, 4, 5}, {2, 3, 2, 4}}) {
        auto t = oracles::random_tensor(dims, 41 + dims.size());
        for (int mode = 0; mode < static_cast<int>(dims.size()); ++mode) {
            DenseTensor back = refold(matricize(t, mode), mode, dims);
            CHECK(bitwise_equal(back, t));
        }
    }

    SUBCASE("matricize(refold(M)) == M") {
        Matrix m = oracles::random_matrix(4, 15, 42);
        DenseTensor t = refold(m, 1, {3, 4, 5});
        CHECK(max_abs_diff(matricize(t, 1), m) == 0.0);
    }
    SUBCASE("zero matrix refolds to zero tensor") {
        DenseTensor z = refold(Matrix(3, 20), 0, {3, 4, 5});
        CHECK(tensor_norm(z) == 0.0);
    }
    SUBCASE("d=1 vector roundtrip") {
        DenseTensor v({4}, {1.0, -2.0, 3.0, -4.0});
        CHECK(bitwise_equal(refold(matricize(v, 0), 0, {4}), v));
    }
    SUBCASE("shape mismatch") {
        CHECK_THROWS_AS(refold(Matrix(3, 21), 0, {3, 4, 5}), ShapeError);
    }
}

TEST_CASE("tensor_norm is matricization-invariant") {
    auto t = oracles::random_tensor({6, 5, 4, 3}, 51);
    const double n = tensor_norm(t);
    for (int mode = 0; mode < 4; ++mode) {
        const double fn = frobenius_norm(matricize(t, mode));
        CHECK(std::abs(fn - n) <= 1e-12 * n);
    }
}

TEST_CASE("mode_product agrees with the elementwise oracle") {
    auto t = oracles::random_tensor({3, 4, 5}, 61);
    for (int mode = 0; mode < 3; ++mode) {
        Matrix m = oracles::random_matrix(6, t.dim(mode), 62 + static_cast<unsigned>(mode));
        DenseTensor got = mode_product(t, m, mode);
        DenseTensor want = oracles::oracle_mode_product(t, m, mode);
        CHECK(got.dims() == want.dims());
        CHECK(max_abs_diff(got, want) <= 1e-13 * tensor_norm(want));
    }
}

TEST_CASE("mode_product with identity is exact") {
    auto t = oracles::random_tensor({3, 4, 5}, 71);
    for (int mode = 0; mode < 3; ++mode)
        CHECK(bitwise_equal(mode_product(t, Matrix::identity(t.dim(mode)), mode), t));
}

TEST_CASE("mode products commute across distinct modes") {
    auto t = oracles::random_tensor({3, 4, 5}, 81);
    Matrix a = oracles::random_matrix(2, 3, 82);
    Matrix b = oracles::random_matrix(6, 4, 83);
    DenseTensor ab = mode_product(mode_product(t, a, 0), b, 1);
    DenseTensor ba = mode_product(mode_product(t, b, 1), a, 0);
    CHECK(max_abs_diff(ab, ba) <= 1e-12 * tensor_norm(ab));
}

TEST_CASE("repeated products along one mode compose") {
    auto t = oracles::random_tensor({3, 4, 5}, 91);
    Matrix a = oracles::random_matrix(6, 4, 92);
    Matrix b = oracles::random_matrix(2, 6, 93);
    DenseTensor two_step = mode_product(mode_product(t, a, 1), b, 1);

    Matrix ba(2, 4);
    for (int r = 0; r < 2; ++r)
        for (int c = 0; c < 4; ++c) {
            double s = 0.0;
            for (int k = 0; k < 6; ++k) s += b(r, k) * a(k, c);
            ba(r, c) = s;
        }
    DenseTensor one_step = mode_product(t, ba, 1);
    CHECK(max_abs_diff(two_step, one_step) <= 1e-12 * tensor_norm(one_step));
}

TEST_CASE("square orthogonal mode product preserves norm") {
    auto t = oracles::random_tensor({4, 5, 6}, 101);
    const double n = tensor_norm(t);
    for (int mode = 0; mode < 3; ++mode) {
        Matrix u = oracles::random_orthogonal(t.dim(mode), 102 + static_cast<unsigned>(mode));
        CHECK(std::abs(tensor_norm(mode_product(t, u, mode)) - n) <= 1e-12 * n);
    }
}

TEST_CASE("mode_product shape errors") {
    auto t = oracles::random_tensor({3, 4, 5}, 111);
    CHECK_THROWS_AS(mode_product(t, oracles::random_matrix(2, 5, 112), 0), ShapeError);
    CHECK_THROWS_AS(mode_product(t, oracles::random_matrix(2, 3, 113), 3), ArgumentError);
}

TEST_CASE("sparse mode_product matches the dense path") {
    std::mt19937_64 rng(121);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    std::normal_distribution<double> gauss(0.0, 1.0);
    std::vector<std::pair<std::vector<int>, double>> entries;
    for (int i = 0; i < 5; ++i)
        for (int j = 0; j < 6; ++j)
            for (int k = 0; k < 7; ++k)
                if (unif(rng) < 0.15) entries.push_back({{i, j, k}, gauss(rng)});
    SparseTensor s({5, 6, 7}, entries);
    DenseTensor d = densify(s);
    for (int mode = 0; mode < 3; ++mode) {
        Matrix m = oracles::random_matrix(3, d.dim(mode), 122 + static_cast<unsigned>(mode));
        DenseTensor sparse_out = mode_product(s, m, mode);
        DenseTensor dense_out = mode_product(d, m, mode);
        CHECK(max_abs_diff(sparse_out, dense_out) <= 1e-12 * (1.0 + tensor_norm(dense_out)));
    }
}

TEST_CASE("sparse/dense conversions roundtrip") {
    SUBCASE("random 10% dense tensor roundtrips bitwise") {
        std::mt19937_64 rng(131);
        std::uniform_real_distribution<double> unif(0.0, 1.0);
        std::normal_distribution<double> gauss(0.0, 1.0);
        std::vector<double> v(3 * 4 * 5, 0.0);
        for (auto& x : v)
            if (unif(rng) < 0.10) x = gauss(rng);
        DenseTensor t({3, 4, 5}, v);
        CHECK(bitwise_equal(densify(sparsify_exact(t)), t));
    }
    SUBCASE("all-zeros dense gives nnz 0") {
        CHECK(sparsify_exact(DenseTensor({2, 3, 4})).nnz() == 0);
    }
    SUBCASE("dense roundtrip of a sparse tensor") {
        SparseTensor s({4, 4}, std::vector<std::pair<std::vector<int>, double>>{
                                   {{1, 2}, 2.5}, {{0, 0}, -1.0}});
        SparseTensor back = sparsify_exact(densify(s));
        REQUIRE(back.nnz() == 2);
        CHECK(back.entries()[0].index == s.entries()[0].index);
        CHECK(back.entries()[0].value == s.entries()[0].value);
        CHECK(back.entries()[1].index == s.entries()[1].index);
        CHECK(back.entries()[1].value == s.entries()[1].value);
    }
}

TEST_CASE("SparseTensor canonicalization") {
    SparseTensor s({3, 3}, std::vector<std::pair<std::vector<int>, double>>{
                               {{2, 2}, 1.0},
                               {{0, 1}, 2.0},
                               {{0, 1}, 3.0},   // duplicate: merged by summation
                               {{1, 1}, 4.0},
                               {{2, 0}, -4.0},
                               {{2, 0}, 4.0},   // cancels to zero: dropped
                           });
    REQUIRE(s.nnz() == 3);
    CHECK(s.entries()[0].index == 3);  // (0,1)
    CHECK(s.entries()[0].value == 5.0);
    CHECK(s.entries()[1].index == 4);  // (1,1)
    CHECK(s.entries()[2].index == 8);  // (2,2)

    auto idx = s.multi_index(s.entries()[0].index);
    CHECK(idx == std::vector<int>{0, 1});

    CHECK_THROWS_AS(SparseTensor({2, 2}, std::vector<std::pair<std::vector<int>, double>>{
                                             {{2, 0}, 1.0}}),
                    ArgumentError);
}

TEST_CASE("construction validation") {
    CHECK_THROWS_AS(DenseTensor(std::vector<int>{}), ArgumentError);
    CHECK_THROWS_AS(DenseTensor({3, 0, 2}), ArgumentError);
    CHECK_THROWS_AS(DenseTensor({2, 2}, std::vector<double>(3, 0.0)), ShapeError);
    CHECK_THROWS_AS(DenseTensor({2}, {1.0, std::nan("")}), ArgumentError);
    CHECK_THROWS_AS(DenseTensor({1 << 30, 1 << 30, 1 << 30, 1 << 30}), ArgumentError);
    CHECK_THROWS_AS(Matrix(2, 2, std::vector<double>(3, 0.0)), ShapeError);

    auto t = oracles::random_tensor({2, 3}, 141);
    CHECK_THROWS_AS(t.flat_index(std::vector<int>{0, 3}), ArgumentError);
    CHECK_THROWS_AS(t.flat_index(std::vector<int>{0}), ArgumentError);
}

TEST_CASE("flat_index walks first mode fastest") {
    DenseTensor t({2, 3, 2});
    CHECK(t.flat_index(std::vector<int>{0, 0, 0}) == 0);
    CHECK(t.flat_index(std::vector<int>{1, 0, 0}) == 1);
    CHECK(t.flat_index(std::vector<int>{0, 1, 0}) == 2);
    CHECK(t.flat_index(std::vector<int>{0, 0, 1}) == 6);
    CHECK(t.flat_index(std::vector<int>{1, 2, 1}) == 11);
}

TEST_CASE("transpose and identity") {
    Matrix m = oracles::random_matrix(3, 5, 151);
    Matrix mt = transpose(m);
    REQUIRE(mt.rows() == 5);
    REQUIRE(mt.cols() == 3);
    for (int r = 0; r < 3; ++r)
        for (int c = 0; c < 5; ++c) CHECK(mt(c, r) == m(r, c));

    Matrix eye = Matrix::identity(3);
    CHECK(eye(0, 0) == 1.0);
    CHECK(eye(1, 0) == 0.0);
    CHECK(frobenius_norm(eye) == doctest::Approx(std::sqrt(3.0)).epsilon(1e-15));
}

TEST_CASE("norm is stable under element reordering") {
    // Same multiset of values in two different layouts; pairwise summation
    // keeps the norms equal to far better than 1e-12 relative.
    auto t = oracles::random_tensor({40, 30, 20}, 161);
    std::vector<double> shuffled = t.values();
    std::mt19937_64 rng(162);
    std::shuffle(shuffled.begin(), shuffled.end(), rng);
    DenseTensor u({40, 30, 20}, std::move(shuffled));
    CHECK(std::abs(tensor_norm(t) - tensor_norm(u)) <= 1e-12 * tensor_norm(t));
}
