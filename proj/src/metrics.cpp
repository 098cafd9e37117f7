#include "rinmf/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "rinmf/grouping.hpp"
#include "rinmf/rules.hpp"

namespace rinmf {

double representation_error(const Matrix& x, const Matrix& f, const Matrix& g) {
    const double xnorm = frobenius_norm(x);
    if (xnorm == 0.0) throw domain_error("representation_error: X has zero norm");
    return 100.0 * frobenius_distance(x, matmul_a_bt(f, g)) / xnorm;
}

double description_error(const Matrix& f_c, const Matrix& ideal) {
    const double inorm = frobenius_norm(ideal);
    if (inorm == 0.0) throw domain_error("description_error: ideal matrix has zero norm");
    return 100.0 * frobenius_distance(f_c, ideal) / inorm;
}

double correspondence(const std::vector<std::size_t>& learned,
                      const std::vector<std::size_t>& ideal) {
    return jaccard(learned, ideal);
}

double avg_corr_difference(std::span<const double> corr_a,
                           std::span<const double> corr_b) {
    if (corr_a.size() != corr_b.size() || corr_a.empty()) {
        throw shape_error("avg_corr_difference: lengths " +
                          std::to_string(corr_a.size()) + " and " +
                          std::to_string(corr_b.size()));
    }
    double acc = 0.0;
    for (std::size_t i = 0; i < corr_a.size(); ++i) acc += corr_a[i] - corr_b[i];
    return acc / static_cast<double>(corr_a.size());
}

double hoyer_sparseness(std::span<const double> v) {
    if (v.size() < 2) throw domain_error("hoyer_sparseness: need at least 2 entries");
    double l1 = 0.0, l2sq = 0.0;
    for (double x : v) {
        l1 += std::abs(x);
        l2sq += x * x;
    }
    if (l2sq == 0.0) throw domain_error("hoyer_sparseness: zero vector");
    const double sqrt_n = std::sqrt(static_cast<double>(v.size()));
    return (sqrt_n - l1 / std::sqrt(l2sq)) / (sqrt_n - 1.0);
}

double mean_row_sparseness(const Matrix& m) {
    if (m.rows() == 0) throw domain_error("mean_row_sparseness: empty matrix");
    double acc = 0.0;
    for (std::size_t i = 0; i < m.rows(); ++i) {
        const auto row = m.row(i);
        bool zero = true;
        for (double v : row) {
            if (v != 0.0) { zero = false; break; }
        }
        acc += zero ? 1.0 : hoyer_sparseness(row);
    }
    return acc / static_cast<double>(m.rows());
}

std::vector<std::size_t> hungarian_max_assignment(const Matrix& score) {
    if (score.rows() != score.cols() || score.rows() == 0) {
        throw shape_error("hungarian_max_assignment: square matrix required, got " +
                          score.shape());
    }
    const std::size_t n = score.rows();
    // minimization form on negated scores, potentials method (1-indexed)
    const double INF = std::numeric_limits<double>::infinity();
    std::vector<double> u(n + 1, 0.0), v(n + 1, 0.0);
    std::vector<std::size_t> match(n + 1, 0); // column -> row
    auto cost = [&](std::size_t i, std::size_t j) { return -score(i - 1, j - 1); };
    for (std::size_t i = 1; i <= n; ++i) {
        std::vector<double> minv(n + 1, INF);
        std::vector<char> used(n + 1, 0);
        std::vector<std::size_t> way(n + 1, 0);
        std::size_t j0 = 0;
        match[0] = i;
        do {
            used[j0] = 1;
            const std::size_t i0 = match[j0];
            double delta = INF;
            std::size_t j1 = 0;
            for (std::size_t j = 1; j <= n; ++j) {
                if (used[j]) continue;
                const double cur = cost(i0, j) - u[i0] - v[j];
                if (cur < minv[j]) {
                    minv[j] = cur;
                    way[j] = j0;
                }
                if (minv[j] < delta) {
                    delta = minv[j];
                    j1 = j;
                }
            }
            for (std::size_t j = 0; j <= n; ++j) {
                if (used[j]) {
                    u[match[j]] += delta;
                    v[j] -= delta;
                } else {
                    minv[j] -= delta;
                }
            }
            j0 = j1;
        } while (match[j0] != 0);
        do {
            const std::size_t j1 = way[j0];
            match[j0] = match[j1];
            j0 = j1;
        } while (j0 != 0);
    }
    std::vector<std::size_t> row_to_col(n, 0);
    for (std::size_t j = 1; j <= n; ++j) row_to_col[match[j] - 1] = j - 1;
    return row_to_col;
}

EvalReport evaluate_model(const Matrix& x, const Matrix& f, const Matrix& g,
                          std::size_t iterations, const Matrix& ideal,
                          const std::vector<std::vector<std::size_t>>& ideal_clusters,
                          bool hungarian_pairing) {
    if (ideal_clusters.size() != f.cols()) {
        throw shape_error("evaluate_model: " + std::to_string(ideal_clusters.size()) +
                          " ideal clusters for k=" + std::to_string(f.cols()));
    }
    const ClusterAssignment ca = cluster_assignment(f);

    EvalReport rep;
    rep.iterations = iterations;
    rep.re = representation_error(x, f, g);
    rep.de = description_error(ca.binary, ideal);

    const std::size_t k = f.cols();
    std::vector<std::size_t> pairing(k);
    for (std::size_t i = 0; i < k; ++i) pairing[i] = i;
    if (hungarian_pairing) {
        Matrix score(k, k);
        for (std::size_t i = 0; i < k; ++i) {
            for (std::size_t j = 0; j < k; ++j) {
                score(i, j) = correspondence(ca.factor_entities[i], ideal_clusters[j]);
            }
        }
        pairing = hungarian_max_assignment(score);
    }
    rep.corr.resize(k);
    double acc = 0.0;
    for (std::size_t i = 0; i < k; ++i) {
        rep.corr[i] = correspondence(ca.factor_entities[i], ideal_clusters[pairing[i]]);
        acc += rep.corr[i];
    }
    rep.mean_corr = acc / static_cast<double>(k);

    if (k >= 2) {
        rep.sparseness_rows.resize(f.rows());
        for (std::size_t i = 0; i < f.rows(); ++i) {
            const auto row = f.row(i);
            bool zero = true;
            for (double v : row) {
                if (v != 0.0) { zero = false; break; }
            }
            rep.sparseness_rows[i] = zero ? 1.0 : hoyer_sparseness(row);
        }
    }
    return rep;
}

} // namespace rinmf
