#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "rinmf/matrix.hpp"
#include "rinmf/rules.hpp"

namespace rinmf {

// Assignment of every rule to exactly one factor. C_z is the union of the
// supports of the rules assigned to factor z.
struct RuleGrouping {
    std::size_t k = 0;
    std::vector<std::size_t> assignment;            // rule index -> factor index
    std::vector<std::vector<std::size_t>> clusters; // per factor, sorted entities
    std::vector<double> objective_trace;            // k-means only, per iteration
};

// Recomputes clusters from an assignment (computeFinalFactorSupports).
RuleGrouping grouping_from_assignment(const RuleSet& rs, std::size_t k,
                                      std::vector<std::size_t> assignment);

enum class KMeansMetric { euclidean, jaccard };

// Lloyd k-means over the binary support-indicator vectors of the rules.
// k-means++ seeding from `seed`, lowest-index tie-breaks, empty centroids
// reseeded at the point farthest from its own centroid. Deterministic.
RuleGrouping kmeans_rules(const RuleSet& rs, std::size_t k,
                          std::size_t max_iters = 100, std::uint64_t seed = 0,
                          KMeansMetric metric = KMeansMetric::euclidean);

// Splits rules by label, runs kmeans_rules within each class with the class's
// own k, and concatenates factor indices in per_class_k order.
RuleGrouping kmeans_rules_supervised(
    const RuleSet& rs,
    const std::vector<std::pair<std::string, std::size_t>>& per_class_k,
    std::size_t max_iters = 100, std::uint64_t seed = 0,
    KMeansMetric metric = KMeansMetric::euclidean);

// Rule-factor assignment: seeds one centroid rule per class (best quality,
// support size when quality is absent) on the cluster structure induced by
// f_init, fills remaining factors with the rule least similar to current
// centroids, then attaches every leftover rule to its closest centroid.
// class_count = 0 selects the unsupervised branch (a single global seed).
RuleGrouping rfa_assign(const RuleSet& rs, const Matrix& f_init, std::size_t k,
                        std::size_t class_count);

// m x k binary matrix, [e][z] = 1 iff entity e is in cluster z.
Matrix build_ideal(const std::vector<std::vector<std::size_t>>& clusters,
                   std::size_t m);
Matrix build_ideal(const RuleGrouping& g, std::size_t m);

// k x |R| matrix of intersection counts, [i][j] = |C_i ∩ supp(r_j)|.
Matrix build_a(const std::vector<std::vector<std::size_t>>& clusters,
               const RuleSet& rs);
Matrix build_a(const RuleGrouping& g, const RuleSet& rs);

// Clusters induced by a learned factor matrix: entity i belongs to factor j
// iff f[i,j] / max_l f[i,l] >= 0.5. An all-zero row belongs nowhere.
struct ClusterAssignment {
    std::vector<std::vector<std::size_t>> entity_factors;  // per entity
    std::vector<std::vector<std::size_t>> factor_entities; // per factor
    Matrix binary;                                         // F_c, m x k
};
ClusterAssignment cluster_assignment(const Matrix& f);

} // namespace rinmf
