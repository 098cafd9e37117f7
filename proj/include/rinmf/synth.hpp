#pragma once

#include <cstdint>

#include "rinmf/grouping.hpp"
#include "rinmf/matrix.hpp"
#include "rinmf/rules.hpp"

namespace rinmf {

struct SyntheticData {
    Matrix x;
    RuleSet rules;
    RuleGrouping truth; // planted assignment; clusters are the entity blocks
};

// Planted-structure generator. Entities and attributes split into k
// contiguous blocks; each block carries a rank-1 non-negative component with
// entries in [0.5, 1.5), plus uniform noise of the given amplitude
// everywhere. Each block is tiled by rules_per_factor rules so that every
// block entity is covered by at least two of its block's rules and the rule
// union is the whole block (coverage 1). overlap in [0,1] extends each rule
// into the following segment. Deterministic per seed.
SyntheticData generate_synthetic(std::size_t m, std::size_t n, std::size_t k,
                                 double noise, double overlap,
                                 std::size_t rules_per_factor, std::uint64_t seed);

} // namespace rinmf
