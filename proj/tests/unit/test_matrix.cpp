#include <doctest.h>

#include <cmath>
#include <random>
#include <string>

#include "rinmf/matrix.hpp"
#include "helpers.hpp"

using namespace rinmf;
using test_helpers::random_matrix;
using test_helpers::ulp_distance;

TEST_CASE("matmul identity") {
    const Matrix m{{1.0, 2.5}, {0.25, 4.0}, {9.0, 0.5}};
    CHECK(matmul(Matrix::identity(3), m) == m);
    CHECK(matmul(m, Matrix::identity(2)) == m);
}

TEST_CASE("matmul hand product") {
    const Matrix a{{1, 2}, {3, 4}};
    const Matrix b{{1}, {1}};
    const Matrix got = matmul(a, b);
    REQUIRE(got.rows() == 2);
    REQUIRE(got.cols() == 1);
    CHECK(got(0, 0) == 3.0);
    CHECK(got(1, 0) == 7.0);
}

TEST_CASE("matmul shape error names both shapes") {
    const Matrix a(2, 3);
    const Matrix b(2, 2);
    try {
        matmul(a, b);
        FAIL("expected shape_error");
    } catch (const shape_error& e) {
        const std::string msg = e.what();
        CHECK(msg.find("2x3") != std::string::npos);
        CHECK(msg.find("2x2") != std::string::npos);
    }
}

TEST_CASE("matmul agrees with an independent oracle on random instances") {
    std::mt19937_64 rng(42);
    for (int trial = 0; trial < 20; ++trial) {
        const Matrix a = random_matrix(5, 5, rng, -2.0, 2.0);
        const Matrix b = random_matrix(5, 5, rng, -2.0, 2.0);
        const Matrix got = matmul(a, b);
        // dot-product accumulation order, unlike the implementation's
        for (std::size_t i = 0; i < 5; ++i) {
            for (std::size_t j = 0; j < 5; ++j) {
                double want = 0.0;
                for (std::size_t l = 0; l < 5; ++l) want += a(i, l) * b(l, j);
                CHECK(test_helpers::rel_err(got(i, j), want) <= 1e-12);
            }
        }
    }
}

TEST_CASE("transposed-product kernels match transpose-then-multiply") {
    std::mt19937_64 rng(7);
    const Matrix a = random_matrix(4, 3, rng);
    const Matrix b = random_matrix(4, 5, rng);
    CHECK(matmul_at_b(a, b) == matmul(transpose(a), b));
    const Matrix c = random_matrix(6, 3, rng);
    const Matrix d = random_matrix(2, 3, rng);
    CHECK(matmul_a_bt(c, d) == matmul(c, transpose(d)));
}

TEST_CASE("frobenius norm") {
    CHECK(frobenius_norm(Matrix(3, 4)) == 0.0);
    CHECK(frobenius_norm(Matrix{{3, 4}}) == 5.0);
    CHECK(frobenius_norm(Matrix::identity(2)) == doctest::Approx(std::sqrt(2.0)).epsilon(1e-15));
}

TEST_CASE("frobenius properties") {
    std::mt19937_64 rng(3);
    const Matrix a = random_matrix(4, 6, rng, -1.0, 3.0);
    CHECK(frobenius_distance(a, a) == 0.0);
    CHECK(frobenius_norm(matmul(a, Matrix::identity(6))) == frobenius_norm(a));
}

TEST_CASE("matrix construction validates") {
    CHECK_THROWS_AS(Matrix(2, 2, {1.0, 2.0, 3.0}), shape_error);
    CHECK_THROWS_AS(Matrix(1, 2, {1.0, std::nan("")}), domain_error);
    CHECK_THROWS_AS((Matrix{{1.0, 2.0}, {3.0}}), shape_error);
}

TEST_CASE("scale_column_pair") {
    SUBCASE("s = 1 leaves inputs unchanged") {
        Matrix f{{2}, {1}};
        Matrix g{{1}};
        const Matrix f0 = f, g0 = g;
        scale_column_pair(f, g, 0, 1.0);
        CHECK(f == f0);
        CHECK(g == g0);
    }
    SUBCASE("s = 2 rescales the pair") {
        Matrix f{{2}, {1}};
        Matrix g{{1}};
        scale_column_pair(f, g, 0, 2.0);
        CHECK(f(0, 0) == 1.0);
        CHECK(f(1, 0) == 0.5);
        CHECK(g(0, 0) == 2.0);
    }
    SUBCASE("column out of range") {
        Matrix f(2, 1), g(2, 1);
        CHECK_THROWS_AS(scale_column_pair(f, g, 1, 2.0), shape_error);
    }
    SUBCASE("non-positive scale") {
        Matrix f(2, 1), g(2, 1);
        CHECK_THROWS_AS(scale_column_pair(f, g, 0, 0.0), domain_error);
        CHECK_THROWS_AS(scale_column_pair(f, g, 0, -1.5), domain_error);
    }
}

TEST_CASE("scale_column_pair preserves the product within 4 ulp") {
    std::mt19937_64 rng(11);
    for (int trial = 0; trial < 10; ++trial) {
        Matrix f = random_matrix(5, 3, rng, 0.1, 2.0);
        Matrix g = random_matrix(4, 3, rng, 0.1, 2.0);
        const Matrix before = matmul_a_bt(f, g);
        scale_column_pair(f, g, 1, 3.7);
        const Matrix after = matmul_a_bt(f, g);
        for (std::size_t i = 0; i < before.size(); ++i) {
            CHECK(ulp_distance(before.data()[i], after.data()[i]) <= 4);
        }
    }
}
