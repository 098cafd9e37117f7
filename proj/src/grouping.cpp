#include "rinmf/grouping.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <unordered_map>

#include "rinmf/rand.hpp"

namespace rinmf {

namespace {

std::vector<double> indicator(const Rule& r, std::size_t m) {
    std::vector<double> v(m, 0.0);
    for (std::size_t e : r.support) v[e] = 1.0;
    return v;
}

double sq_euclidean(const std::vector<double>& a, const std::vector<double>& b) {
    double acc = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double d = a[i] - b[i];
        acc += d * d;
    }
    return acc;
}

// generalized Jaccard distance for non-negative vectors; matches set Jaccard
// on binary inputs
double jaccard_dist(const std::vector<double>& a, const std::vector<double>& b) {
    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        num += std::min(a[i], b[i]);
        den += std::max(a[i], b[i]);
    }
    if (den == 0.0) return 0.0;
    return 1.0 - num / den;
}

double point_dist(const std::vector<double>& a, const std::vector<double>& b,
                  KMeansMetric metric) {
    return metric == KMeansMetric::euclidean ? sq_euclidean(a, b)
                                             : jaccard_dist(a, b);
}

// Lloyd iterations over arbitrary points; returns per-point assignment.
std::vector<std::size_t> lloyd(const std::vector<std::vector<double>>& points,
                               std::size_t k, std::size_t max_iters,
                               std::mt19937_64& rng, KMeansMetric metric,
                               std::vector<double>& trace) {
    const std::size_t n = points.size();
    const std::size_t dim = points.front().size();

    // k-means++ seeding
    std::vector<std::vector<double>> centroids;
    centroids.reserve(k);
    std::vector<char> chosen(n, 0);
    {
        const std::size_t first = uniform_below(rng, n);
        centroids.push_back(points[first]);
        chosen[first] = 1;
    }
    std::vector<double> d2(n);
    while (centroids.size() < k) {
        double total = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            double best = std::numeric_limits<double>::infinity();
            for (const auto& c : centroids) best = std::min(best, point_dist(points[i], c, metric));
            d2[i] = best;
            total += best;
        }
        std::size_t pick = n;
        if (total > 0.0) {
            const double u = uniform01(rng) * total;
            double cum = 0.0;
            for (std::size_t i = 0; i < n; ++i) {
                cum += d2[i];
                if (u < cum) { pick = i; break; }
            }
            if (pick == n) pick = n - 1; // rounding spill
        } else {
            // all remaining points coincide with a centroid
            for (std::size_t i = 0; i < n; ++i) {
                if (!chosen[i]) { pick = i; break; }
            }
            if (pick == n) pick = 0;
        }
        chosen[pick] = 1;
        centroids.push_back(points[pick]);
    }

    std::vector<std::size_t> assign(n, 0);
    std::vector<std::size_t> prev(n, k); // k = "unset"
    trace.clear();
    for (std::size_t iter = 0; iter < max_iters; ++iter) {
        // assignment step, lowest index wins ties
        for (std::size_t i = 0; i < n; ++i) {
            double best = std::numeric_limits<double>::infinity();
            std::size_t bz = 0;
            for (std::size_t z = 0; z < k; ++z) {
                const double d = point_dist(points[i], centroids[z], metric);
                if (d < best) { best = d; bz = z; }
            }
            assign[i] = bz;
        }
        // update step
        std::vector<std::size_t> counts(k, 0);
        for (std::size_t z = 0; z < k; ++z) std::fill(centroids[z].begin(), centroids[z].end(), 0.0);
        for (std::size_t i = 0; i < n; ++i) {
            ++counts[assign[i]];
            for (std::size_t d = 0; d < dim; ++d) centroids[assign[i]][d] += points[i][d];
        }
        for (std::size_t z = 0; z < k; ++z) {
            if (counts[z] == 0) continue;
            for (std::size_t d = 0; d < dim; ++d) centroids[z][d] /= static_cast<double>(counts[z]);
        }
        // empty-cluster repair: move the centroid to the point farthest from
        // its own (non-singleton) centroid
        std::vector<char> stolen(n, 0);
        for (std::size_t z = 0; z < k; ++z) {
            if (counts[z] != 0) continue;
            double worst = -1.0;
            std::size_t far_i = n;
            for (std::size_t i = 0; i < n; ++i) {
                if (stolen[i] || counts[assign[i]] < 2) continue;
                const double d = point_dist(points[i], centroids[assign[i]], metric);
                if (d > worst) { worst = d; far_i = i; }
            }
            if (far_i == n) continue; // nothing to steal; cluster stays empty
            centroids[z] = points[far_i];
            stolen[far_i] = 1;
        }
        double obj = 0.0;
        for (std::size_t i = 0; i < n; ++i) obj += point_dist(points[i], centroids[assign[i]], metric);
        trace.push_back(obj);
        if (assign == prev) break;
        prev = assign;
    }
    return assign;
}

} // namespace

RuleGrouping grouping_from_assignment(const RuleSet& rs, std::size_t k,
                                      std::vector<std::size_t> assignment) {
    if (assignment.size() != rs.size()) {
        throw shape_error("grouping: " + std::to_string(assignment.size()) +
                          " assignments for " + std::to_string(rs.size()) + " rules");
    }
    RuleGrouping g;
    g.k = k;
    g.assignment = std::move(assignment);
    g.clusters.assign(k, {});
    for (std::size_t j = 0; j < rs.size(); ++j) {
        const std::size_t z = g.assignment[j];
        if (z >= k) {
            throw domain_error("grouping: rule " + std::to_string(j) +
                               " assigned to factor " + std::to_string(z) +
                               " with k=" + std::to_string(k));
        }
        auto& c = g.clusters[z];
        c.insert(c.end(), rs[j].support.begin(), rs[j].support.end());
    }
    for (auto& c : g.clusters) {
        std::sort(c.begin(), c.end());
        c.erase(std::unique(c.begin(), c.end()), c.end());
    }
    return g;
}

RuleGrouping kmeans_rules(const RuleSet& rs, std::size_t k, std::size_t max_iters,
                          std::uint64_t seed, KMeansMetric metric) {
    if (k == 0 || k > rs.size()) {
        throw domain_error("kmeans_rules: k=" + std::to_string(k) + " with " +
                           std::to_string(rs.size()) + " rules");
    }
    std::vector<std::vector<double>> points;
    points.reserve(rs.size());
    for (const Rule& r : rs.rules()) points.push_back(indicator(r, rs.entity_count()));
    std::mt19937_64 rng(seed);
    std::vector<double> trace;
    auto assign = lloyd(points, k, max_iters, rng, metric, trace);
    RuleGrouping g = grouping_from_assignment(rs, k, std::move(assign));
    g.objective_trace = std::move(trace);
    return g;
}

RuleGrouping kmeans_rules_supervised(
    const RuleSet& rs,
    const std::vector<std::pair<std::string, std::size_t>>& per_class_k,
    std::size_t max_iters, std::uint64_t seed, KMeansMetric metric) {
    std::unordered_map<std::string, std::size_t> class_pos;
    for (std::size_t c = 0; c < per_class_k.size(); ++c) {
        if (per_class_k[c].second == 0) {
            throw domain_error("supervised grouping: class '" + per_class_k[c].first +
                               "' requests k=0");
        }
        if (!class_pos.emplace(per_class_k[c].first, c).second) {
            throw domain_error("supervised grouping: class '" + per_class_k[c].first +
                               "' listed twice");
        }
    }
    std::vector<std::vector<std::size_t>> members(per_class_k.size());
    for (std::size_t j = 0; j < rs.size(); ++j) {
        const Rule& r = rs[j];
        if (r.label.empty()) {
            throw domain_error("supervised grouping: rule '" + r.id + "' has no label");
        }
        auto it = class_pos.find(r.label);
        if (it == class_pos.end()) {
            throw domain_error("supervised grouping: no k for label '" + r.label + "'");
        }
        members[it->second].push_back(j);
    }

    std::size_t total_k = 0;
    std::vector<std::size_t> assignment(rs.size(), 0);
    std::vector<double> trace;
    for (std::size_t c = 0; c < per_class_k.size(); ++c) {
        const std::size_t kc = per_class_k[c].second;
        if (members[c].empty()) {
            throw domain_error("supervised grouping: class '" + per_class_k[c].first +
                               "' has no rules");
        }
        if (kc > members[c].size()) {
            throw domain_error("supervised grouping: class '" + per_class_k[c].first +
                               "' requests k=" + std::to_string(kc) + " with " +
                               std::to_string(members[c].size()) + " rules");
        }
        std::vector<std::vector<double>> points;
        points.reserve(members[c].size());
        for (std::size_t j : members[c]) points.push_back(indicator(rs[j], rs.entity_count()));
        std::mt19937_64 rng(seed);
        std::vector<double> sub_trace;
        auto sub = lloyd(points, kc, max_iters, rng, metric, sub_trace);
        for (std::size_t i = 0; i < members[c].size(); ++i) {
            assignment[members[c][i]] = total_k + sub[i];
        }
        trace.insert(trace.end(), sub_trace.begin(), sub_trace.end());
        total_k += kc;
    }
    RuleGrouping g = grouping_from_assignment(rs, total_k, std::move(assignment));
    g.objective_trace = std::move(trace);
    return g;
}

RuleGrouping rfa_assign(const RuleSet& rs, const Matrix& f_init, std::size_t k,
                        std::size_t class_count) {
    if (k == 0 || k > rs.size()) {
        throw domain_error("rfa_assign: k=" + std::to_string(k) + " with " +
                           std::to_string(rs.size()) + " rules");
    }
    if (f_init.rows() != rs.entity_count() || f_init.cols() != k) {
        throw shape_error("rfa_assign: f_init is " + f_init.shape() + ", expected " +
                          std::to_string(rs.entity_count()) + "x" + std::to_string(k));
    }
    for (double v : f_init.data()) {
        if (v < 0.0) throw domain_error("rfa_assign: f_init has negative entries");
    }

    std::vector<std::string> classes = rs.labels();
    if (class_count > 0) {
        if (classes.size() != class_count) {
            throw domain_error("rfa_assign: class_count=" + std::to_string(class_count) +
                               " but rules carry " + std::to_string(classes.size()) +
                               " distinct labels");
        }
        if (class_count > k) {
            throw domain_error("rfa_assign: class_count=" + std::to_string(class_count) +
                               " exceeds k=" + std::to_string(k));
        }
        for (const Rule& r : rs.rules()) {
            if (r.label.empty()) {
                throw domain_error("rfa_assign: rule '" + r.id + "' has no label");
            }
        }
    }

    const auto initial_supports = cluster_assignment(f_init).factor_entities;

    const std::size_t R = rs.size();
    std::vector<char> rule_done(R, 0);
    std::vector<char> factor_used(k, 0);
    std::vector<std::size_t> assignment(R, 0);
    std::vector<std::size_t> centroid_rule; // rule index per seeded factor

    // quality is comparable only when every contender has one
    auto effective_quality = [&](const std::vector<std::size_t>& contenders,
                                 std::size_t j) {
        for (std::size_t c : contenders) {
            if (!rs[c].quality) return static_cast<double>(rs[j].support.size());
        }
        return *rs[j].quality;
    };

    auto find_best_rule = [&](const std::string& label) {
        std::vector<std::size_t> contenders;
        for (std::size_t j = 0; j < R; ++j) {
            if (rule_done[j]) continue;
            if (!label.empty() && rs[j].label != label) continue;
            contenders.push_back(j);
        }
        if (contenders.empty()) {
            throw domain_error("rfa_assign: no unassigned rule for class '" + label + "'");
        }
        std::size_t best = contenders.front();
        double best_q = effective_quality(contenders, best);
        for (std::size_t j : contenders) {
            const double q = effective_quality(contenders, j);
            if (q > best_q) { best = j; best_q = q; }
        }
        return best;
    };

    // assign rule j to the free factor whose initial support overlaps most
    auto assign_to_factor = [&](std::size_t j) {
        double best = -1.0;
        std::size_t bz = k;
        for (std::size_t z = 0; z < k; ++z) {
            if (factor_used[z]) continue;
            const double overlap =
                static_cast<double>(support_intersection_size(rs[j].support,
                                                              initial_supports[z])) /
                static_cast<double>(rs[j].support.size());
            if (overlap > best) { best = overlap; bz = z; }
        }
        factor_used[bz] = 1;
        assignment[j] = bz;
        rule_done[j] = 1;
        centroid_rule.push_back(j);
    };

    if (class_count > 0) {
        for (const std::string& label : classes) assign_to_factor(find_best_rule(label));
    } else {
        assign_to_factor(find_best_rule({}));
    }

    // fill remaining factors with the rule least similar to current centroids
    while (std::find(factor_used.begin(), factor_used.end(), char(0)) != factor_used.end()) {
        double best_score = std::numeric_limits<double>::infinity();
        std::size_t pick = R;
        for (std::size_t j = 0; j < R; ++j) {
            if (rule_done[j]) continue;
            double max_sim = 0.0;
            for (std::size_t c : centroid_rule) {
                max_sim = std::max(max_sim, jaccard(rs[j].support, rs[c].support));
            }
            if (max_sim < best_score) { best_score = max_sim; pick = j; }
        }
        assign_to_factor(pick);
    }

    // leftover rules go to the closest centroid
    std::vector<std::size_t> factor_of_centroid(k, 0);
    for (std::size_t c : centroid_rule) factor_of_centroid[assignment[c]] = c;
    for (std::size_t j = 0; j < R; ++j) {
        if (rule_done[j]) continue;
        double best = -1.0;
        std::size_t bz = 0;
        for (std::size_t z = 0; z < k; ++z) {
            const double sim = jaccard(rs[j].support, rs[factor_of_centroid[z]].support);
            if (sim > best) { best = sim; bz = z; }
        }
        assignment[j] = bz;
        rule_done[j] = 1;
    }

    return grouping_from_assignment(rs, k, std::move(assignment));
}

Matrix build_ideal(const std::vector<std::vector<std::size_t>>& clusters,
                   std::size_t m) {
    Matrix ideal(m, clusters.size());
    for (std::size_t z = 0; z < clusters.size(); ++z) {
        for (std::size_t e : clusters[z]) {
            if (e >= m) {
                throw shape_error("build_ideal: entity " + std::to_string(e) +
                                  " out of range for m=" + std::to_string(m));
            }
            ideal(e, z) = 1.0;
        }
    }
    return ideal;
}

Matrix build_ideal(const RuleGrouping& g, std::size_t m) {
    return build_ideal(g.clusters, m);
}

Matrix build_a(const std::vector<std::vector<std::size_t>>& clusters,
               const RuleSet& rs) {
    Matrix a(clusters.size(), rs.size());
    for (std::size_t i = 0; i < clusters.size(); ++i) {
        std::vector<std::size_t> c = clusters[i];
        std::sort(c.begin(), c.end());
        for (std::size_t j = 0; j < rs.size(); ++j) {
            a(i, j) = static_cast<double>(support_intersection_size(c, rs[j].support));
        }
    }
    return a;
}

Matrix build_a(const RuleGrouping& g, const RuleSet& rs) {
    return build_a(g.clusters, rs);
}

ClusterAssignment cluster_assignment(const Matrix& f) {
    for (double v : f.data()) {
        if (v < 0.0) throw domain_error("cluster_assignment: negative entry in F");
    }
    ClusterAssignment ca;
    ca.entity_factors.assign(f.rows(), {});
    ca.factor_entities.assign(f.cols(), {});
    ca.binary = Matrix(f.rows(), f.cols());
    for (std::size_t i = 0; i < f.rows(); ++i) {
        double mx = 0.0;
        for (std::size_t j = 0; j < f.cols(); ++j) mx = std::max(mx, f(i, j));
        if (mx == 0.0) continue;
        for (std::size_t j = 0; j < f.cols(); ++j) {
            if (f(i, j) / mx >= 0.5) {
                ca.entity_factors[i].push_back(j);
                ca.factor_entities[j].push_back(i);
                ca.binary(i, j) = 1.0;
            }
        }
    }
    return ca;
}

} // namespace rinmf
