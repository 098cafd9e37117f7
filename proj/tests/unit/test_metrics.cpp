#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include "rinmf/errors.hpp"
#include "rinmf/grouping.hpp"
#include "rinmf/metrics.hpp"
#include "helpers.hpp"

using namespace rinmf;
using test_helpers::random_matrix;

TEST_CASE("representation_error") {
    SUBCASE("exact factorization -> 0") {
        const Matrix f{{1, 0}, {0, 2}};
        const Matrix g{{3, 0}, {0, 5}};
        CHECK(representation_error(matmul_a_bt(f, g), f, g) == 0.0);
    }
    SUBCASE("vanishing F -> ~100") {
        const Matrix x{{1, 2}, {3, 4}};
        const Matrix f{{1e-12}, {1e-12}};
        const Matrix g{{1e-12}, {1e-12}};
        CHECK(representation_error(x, f, g) == doctest::Approx(100.0).epsilon(1e-9));
    }
    SUBCASE("X=[[2]], FG^T=[[1]] -> 50") {
        CHECK(representation_error(Matrix{{2}}, Matrix{{1}}, Matrix{{1}}) == 50.0);
    }
    SUBCASE("zero X is a domain error") {
        CHECK_THROWS_AS(representation_error(Matrix(2, 2), Matrix(2, 1), Matrix(2, 1)),
                        domain_error);
    }
}

TEST_CASE("representation_error is invariant to diagonal rescaling") {
    std::mt19937_64 rng(21);
    const Matrix x = random_matrix(6, 5, rng, 0.0, 3.0);
    Matrix f = random_matrix(6, 3, rng, 0.1, 1.0);
    Matrix g = random_matrix(5, 3, rng, 0.1, 1.0);
    const double base = representation_error(x, f, g);
    const double scales[] = {0.25, 3.0, 17.5};
    for (std::size_t j = 0; j < 3; ++j) scale_column_pair(f, g, j, scales[j]);
    CHECK(std::abs(representation_error(x, f, g) - base) <= 1e-10);
}

TEST_CASE("description_error") {
    const Matrix ideal{{1, 0}, {1, 0}, {0, 1}, {0, 1}};
    SUBCASE("identical -> 0") {
        CHECK(description_error(ideal, ideal) == 0.0);
    }
    SUBCASE("single flipped cell out of 4 ones -> 50") {
        Matrix f_c = ideal;
        f_c(0, 0) = 0.0;
        CHECK(description_error(f_c, ideal) == 50.0);
    }
    SUBCASE("complement of a t-ones matrix -> 100*sqrt((t+z)/t)") {
        Matrix comp(4, 2);
        for (std::size_t i = 0; i < 4; ++i)
            for (std::size_t j = 0; j < 2; ++j) comp(i, j) = 1.0 - ideal(i, j);
        // every one of the 8 cells disagrees; t = 4 ones
        CHECK(description_error(comp, ideal) ==
              doctest::Approx(100.0 * std::sqrt(8.0 / 4.0)).epsilon(1e-15));
    }
    SUBCASE("all-zero ideal is a domain error") {
        CHECK_THROWS_AS(description_error(Matrix(2, 2), Matrix(2, 2)), domain_error);
    }
}

TEST_CASE("correspondence") {
    CHECK(correspondence({0, 1, 5}, {0, 1, 5}) == 1.0);
    CHECK(correspondence({0, 1}, {2, 3}) == 0.0);
    CHECK(correspondence({0, 1}, {1, 2}) == doctest::Approx(1.0 / 3.0).epsilon(1e-15));
    CHECK(correspondence({}, {}) == 1.0);
    CHECK(correspondence({}, {0}) == 0.0);
    // symmetry
    CHECK(correspondence({0, 1}, {1, 2}) == correspondence({1, 2}, {0, 1}));
}

TEST_CASE("avg_corr_difference") {
    const std::vector<double> a{0.8, 0.4};
    const std::vector<double> b{0.2, 0.6};
    CHECK(avg_corr_difference(a, a) == 0.0);
    CHECK(avg_corr_difference(std::vector<double>{1, 1, 1}, std::vector<double>{0, 0, 0}) == 1.0);
    CHECK(avg_corr_difference(a, b) == doctest::Approx(0.2).epsilon(1e-15));
    CHECK_THROWS_AS(avg_corr_difference(a, std::vector<double>{0.5}), shape_error);
}

TEST_CASE("hoyer_sparseness") {
    CHECK(hoyer_sparseness(std::vector<double>{0, 3, 0}) == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(hoyer_sparseness(std::vector<double>{2, 2, 2, 2}) == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(hoyer_sparseness(std::vector<double>{1, 1, 0, 0}) ==
          doctest::Approx(2.0 - std::sqrt(2.0)).epsilon(1e-15));
    CHECK_THROWS_AS(hoyer_sparseness(std::vector<double>{0, 0}), domain_error);
    CHECK_THROWS_AS(hoyer_sparseness(std::vector<double>{5}), domain_error);
}

TEST_CASE("hoyer_sparseness is scale invariant") {
    const std::vector<double> v{0.2, 0.0, 1.4, 0.7};
    std::vector<double> scaled;
    for (double x : v) scaled.push_back(137.0 * x);
    CHECK(hoyer_sparseness(v) == doctest::Approx(hoyer_sparseness(scaled)).epsilon(1e-14));
}

TEST_CASE("mean_row_sparseness counts zero rows as 1") {
    const Matrix m{{1, 0}, {0, 0}};
    // rows: one-hot -> 1, zero -> 1
    CHECK(mean_row_sparseness(m) == doctest::Approx(1.0).epsilon(1e-15));
    const Matrix half{{1, 1}, {1, 0}};
    CHECK(mean_row_sparseness(half) == doctest::Approx(0.5).epsilon(1e-15));
}

TEST_CASE("hungarian_max_assignment") {
    SUBCASE("identity-dominant scores") {
        const Matrix score{{5, 1, 1}, {1, 5, 1}, {1, 1, 5}};
        CHECK(hungarian_max_assignment(score) == std::vector<std::size_t>{0, 1, 2});
    }
    SUBCASE("anti-diagonal optimum") {
        const Matrix score{{0, 1}, {1, 0}};
        CHECK(hungarian_max_assignment(score) == std::vector<std::size_t>{1, 0});
    }
    SUBCASE("greedy is suboptimal here") {
        // greedy would pick (0,0)=10 then be stuck with (1,1)=0 for total 10;
        // the optimum is (0,1)+(1,0) = 9+9 = 18
        const Matrix score{{10, 9}, {9, 0}};
        CHECK(hungarian_max_assignment(score) == std::vector<std::size_t>{1, 0});
    }
    SUBCASE("brute force agreement on random 4x4") {
        std::mt19937_64 rng(14);
        for (int trial = 0; trial < 10; ++trial) {
            const Matrix score = random_matrix(4, 4, rng);
            const auto got = hungarian_max_assignment(score);
            double got_total = 0.0;
            for (std::size_t i = 0; i < 4; ++i) got_total += score(i, got[i]);
            std::vector<std::size_t> perm{0, 1, 2, 3};
            double best = -1.0;
            do {
                double total = 0.0;
                for (std::size_t i = 0; i < 4; ++i) total += score(i, perm[i]);
                if (total > best) best = total;
            } while (std::next_permutation(perm.begin(), perm.end()));
            CHECK(got_total == doctest::Approx(best).epsilon(1e-12));
        }
    }
}

TEST_CASE("evaluate_model composes the metrics") {
    // ideal recovery: F equals the ideal matrix, X = F G^T exactly
    const Matrix ideal =
        build_ideal(std::vector<std::vector<std::size_t>>{{0, 1}, {2, 3}}, 4);
    const Matrix g{{2, 0}, {0, 3}, {1, 1}};
    const Matrix x = matmul_a_bt(ideal, g);
    const EvalReport rep = evaluate_model(x, ideal, g, 17, ideal, {{0, 1}, {2, 3}});
    CHECK(rep.re == 0.0);
    CHECK(rep.de == 0.0);
    CHECK(rep.corr == std::vector<double>{1.0, 1.0});
    CHECK(rep.mean_corr == 1.0);
    CHECK(rep.iterations == 17);
    REQUIRE(rep.sparseness_rows.size() == 4);
    for (double s : rep.sparseness_rows) CHECK(s == doctest::Approx(1.0).epsilon(1e-15));
}

TEST_CASE("evaluate_model hungarian pairing fixes permuted factors") {
    // learned F reproduces the ideal clusters but with swapped columns
    using Clusters = std::vector<std::vector<std::size_t>>;
    const Matrix ideal = build_ideal(Clusters{{0, 1}, {2, 3}}, 4);
    const Matrix swapped = build_ideal(Clusters{{2, 3}, {0, 1}}, 4);
    const Matrix g{{1, 1}, {1, 1}};
    const Matrix x{{1, 1}, {1, 1}, {1, 1}, {1, 1}};
    const EvalReport by_index =
        evaluate_model(x, swapped, g, 1, ideal, {{0, 1}, {2, 3}}, false);
    CHECK(by_index.mean_corr == 0.0);
    const EvalReport matched =
        evaluate_model(x, swapped, g, 1, ideal, {{0, 1}, {2, 3}}, true);
    CHECK(matched.mean_corr == 1.0);
}
