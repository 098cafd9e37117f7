#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "rinmf/matrix.hpp"

namespace rinmf {

// A rule is an opaque description with a support: the set of entities it
// covers. label and quality are ingestion metadata; rule mining itself is
// out of scope.
struct Rule {
    std::string id;
    std::vector<std::size_t> support; // sorted, unique, < m
    std::string label;                // empty = unlabeled
    std::optional<double> quality;
};

// Validated collection of rules over a fixed entity universe of size m.
// Supports are sorted and deduplicated on construction; ids must be unique
// and non-empty, supports non-empty with indices < m.
class RuleSet {
public:
    RuleSet(std::size_t entity_count, std::vector<Rule> rules);

    std::size_t entity_count() const noexcept { return m_; }
    std::size_t size() const noexcept { return rules_.size(); }
    const Rule& operator[](std::size_t i) const { return rules_[i]; }
    const std::vector<Rule>& rules() const noexcept { return rules_; }

    // distinct labels in order of first appearance, skipping unlabeled rules
    std::vector<std::string> labels() const;

private:
    std::size_t m_ = 0;
    std::vector<Rule> rules_;
};

// |union of supports| / m. m = 0 is a domain error; no rules covers nothing.
double coverage(const RuleSet& rs);

// m x |R| binary matrix, P[e][j] = 1 iff entity e is in supp(rule j).
// Column order follows rule order.
Matrix build_p(const RuleSet& rs);

// intersection and Jaccard similarity of two sorted index sets
std::size_t support_intersection_size(const std::vector<std::size_t>& a,
                                      const std::vector<std::size_t>& b);
double jaccard(const std::vector<std::size_t>& a, const std::vector<std::size_t>& b);

// Entities described by exactly one of the rules associated with a given
// cluster, as sorted (entity, cluster index) pairs. A rule is associated
// with a cluster when its support lies entirely inside the cluster. These
// are the spots where ideal recovery guarantees do not apply.
std::vector<std::pair<std::size_t, std::size_t>>
single_rule_exposure(const RuleSet& rs,
                     const std::vector<std::vector<std::size_t>>& clusters);

} // namespace rinmf
