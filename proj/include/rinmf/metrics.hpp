#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "rinmf/matrix.hpp"

namespace rinmf {

// 100 * ||X - F G^T||_F / ||X||_F
double representation_error(const Matrix& x, const Matrix& f, const Matrix& g);

// 100 * ||F_c - ideal||_F / ||ideal||_F with F_c already binarized
double description_error(const Matrix& f_c, const Matrix& ideal);

// Jaccard of two entity sets; both empty counts as 1.
double correspondence(const std::vector<std::size_t>& learned,
                      const std::vector<std::size_t>& ideal);

// mean of corr_a[i] - corr_b[i], factors paired by index
double avg_corr_difference(std::span<const double> corr_a,
                           std::span<const double> corr_b);

// (sqrt(n) - ||v||_1/||v||_2) / (sqrt(n) - 1); needs n >= 2 and v != 0
double hoyer_sparseness(std::span<const double> v);

// mean hoyer_sparseness over the rows of a matrix; an all-zero row counts
// as 1 (maximally sparse), so ideal matrices with uncovered entities work
double mean_row_sparseness(const Matrix& m);

// Max-sum assignment of rows to columns of a square score matrix.
// Returns the column picked for each row. Used by the optional
// Hungarian factor-pairing mode.
std::vector<std::size_t> hungarian_max_assignment(const Matrix& score);

struct EvalReport {
    double re = 0.0;                      // percent
    double de = 0.0;                      // percent
    std::vector<double> corr;             // per factor, in [0,1]
    double mean_corr = 0.0;
    std::size_t iterations = 0;
    std::vector<double> sparseness_rows;  // per row of F; empty when k < 2
};

// Full per-run evaluation. Correspondence pairs learned factor i with ideal
// cluster i; with hungarian_pairing the learned factors are first re-indexed
// by the max-correspondence assignment. All-zero rows of F contribute
// sparseness 1 (a degenerate row is maximally sparse).
EvalReport evaluate_model(const Matrix& x, const Matrix& f, const Matrix& g,
                          std::size_t iterations, const Matrix& ideal,
                          const std::vector<std::vector<std::size_t>>& ideal_clusters,
                          bool hungarian_pairing = false);

} // namespace rinmf
