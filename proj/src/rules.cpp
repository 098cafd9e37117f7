#include "rinmf/rules.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_set>

namespace rinmf {

RuleSet::RuleSet(std::size_t entity_count, std::vector<Rule> rules)
    : m_(entity_count), rules_(std::move(rules)) {
    std::unordered_set<std::string> seen;
    for (std::size_t i = 0; i < rules_.size(); ++i) {
        Rule& r = rules_[i];
        if (r.id.empty()) {
            throw data_error("rule " + std::to_string(i) + ": empty id");
        }
        if (!seen.insert(r.id).second) {
            throw data_error("rule " + std::to_string(i) + ": duplicate id '" + r.id + "'");
        }
        if (r.support.empty()) {
            throw data_error("rule '" + r.id + "': empty support");
        }
        std::sort(r.support.begin(), r.support.end());
        r.support.erase(std::unique(r.support.begin(), r.support.end()), r.support.end());
        if (r.support.back() >= m_) {
            throw data_error("rule '" + r.id + "': entity index " +
                             std::to_string(r.support.back()) + " out of range for m=" +
                             std::to_string(m_));
        }
        if (r.quality && !std::isfinite(*r.quality)) {
            throw data_error("rule '" + r.id + "': non-finite quality");
        }
    }
}

std::vector<std::string> RuleSet::labels() const {
    std::vector<std::string> out;
    for (const Rule& r : rules_) {
        if (r.label.empty()) continue;
        if (std::find(out.begin(), out.end(), r.label) == out.end()) {
            out.push_back(r.label);
        }
    }
    return out;
}

double coverage(const RuleSet& rs) {
    if (rs.entity_count() == 0) {
        throw domain_error("coverage: empty entity universe");
    }
    std::vector<char> covered(rs.entity_count(), 0);
    for (const Rule& r : rs.rules()) {
        for (std::size_t e : r.support) covered[e] = 1;
    }
    std::size_t n = 0;
    for (char c : covered) n += static_cast<std::size_t>(c);
    return static_cast<double>(n) / static_cast<double>(rs.entity_count());
}

Matrix build_p(const RuleSet& rs) {
    Matrix p(rs.entity_count(), rs.size());
    for (std::size_t j = 0; j < rs.size(); ++j) {
        for (std::size_t e : rs[j].support) p(e, j) = 1.0;
    }
    return p;
}

std::size_t support_intersection_size(const std::vector<std::size_t>& a,
                                      const std::vector<std::size_t>& b) {
    std::size_t n = 0;
    auto ia = a.begin();
    auto ib = b.begin();
    while (ia != a.end() && ib != b.end()) {
        if (*ia < *ib) {
            ++ia;
        } else if (*ib < *ia) {
            ++ib;
        } else {
            ++n;
            ++ia;
            ++ib;
        }
    }
    return n;
}

double jaccard(const std::vector<std::size_t>& a, const std::vector<std::size_t>& b) {
    if (a.empty() && b.empty()) return 1.0;
    const std::size_t inter = support_intersection_size(a, b);
    const std::size_t uni = a.size() + b.size() - inter;
    return static_cast<double>(inter) / static_cast<double>(uni);
}

std::vector<std::pair<std::size_t, std::size_t>>
single_rule_exposure(const RuleSet& rs,
                     const std::vector<std::vector<std::size_t>>& clusters) {
    for (const auto& c : clusters) {
        for (std::size_t e : c) {
            if (e >= rs.entity_count()) {
                throw shape_error("single_rule_exposure: cluster entity " +
                                  std::to_string(e) + " out of range for m=" +
                                  std::to_string(rs.entity_count()));
            }
        }
    }
    std::vector<std::pair<std::size_t, std::size_t>> out;
    for (std::size_t z = 0; z < clusters.size(); ++z) {
        std::vector<std::size_t> cluster = clusters[z];
        std::sort(cluster.begin(), cluster.end());
        // rule associated to the cluster <=> supp(rule) subset of cluster
        std::vector<std::size_t> hits(rs.entity_count(), 0);
        for (const Rule& r : rs.rules()) {
            if (support_intersection_size(r.support, cluster) != r.support.size()) continue;
            for (std::size_t e : r.support) ++hits[e];
        }
        for (std::size_t e : cluster) {
            if (hits[e] == 1) out.emplace_back(e, z);
        }
    }
    std::sort(out.begin(), out.end());
    return out;
}

} // namespace rinmf
