#include "rinmf/synth.hpp"

#include <random>
#include <string>

#include "rinmf/rand.hpp"

namespace rinmf {

namespace {

// split total into count contiguous parts, larger parts first
std::vector<std::pair<std::size_t, std::size_t>> split_ranges(std::size_t total,
                                                              std::size_t count) {
    std::vector<std::pair<std::size_t, std::size_t>> out;
    std::size_t start = 0;
    for (std::size_t i = 0; i < count; ++i) {
        std::size_t len = total / count + (i < total % count ? 1 : 0);
        out.emplace_back(start, start + len);
        start += len;
    }
    return out;
}

} // namespace

SyntheticData generate_synthetic(std::size_t m, std::size_t n, std::size_t k,
                                 double noise, double overlap,
                                 std::size_t rules_per_factor, std::uint64_t seed) {
    if (k == 0) throw config_error("synth: k must be at least 1");
    if (m < k) throw config_error("synth: m=" + std::to_string(m) +
                                  " gives an empty entity block for k=" +
                                  std::to_string(k));
    if (n < k) throw config_error("synth: n=" + std::to_string(n) +
                                  " gives an empty attribute block for k=" +
                                  std::to_string(k));
    if (rules_per_factor < 2) {
        throw config_error("synth: rules_per_factor must be at least 2");
    }
    if (!(noise >= 0.0)) throw config_error("synth: noise must be non-negative");
    if (!(overlap >= 0.0) || !(overlap <= 1.0)) {
        throw config_error("synth: overlap must lie in [0,1]");
    }
    const auto entity_blocks = split_ranges(m, k);
    const auto attr_blocks = split_ranges(n, k);
    for (const auto& [b, e] : entity_blocks) {
        if (e - b < rules_per_factor) {
            throw config_error("synth: block of " + std::to_string(e - b) +
                               " entities cannot be tiled by " +
                               std::to_string(rules_per_factor) + " rules");
        }
    }

    std::mt19937_64 rng(seed);
    Matrix x(m, n);
    for (std::size_t z = 0; z < k; ++z) {
        const auto [rb, re] = entity_blocks[z];
        const auto [cb, ce] = attr_blocks[z];
        std::vector<double> u(re - rb), v(ce - cb);
        for (double& val : u) val = 0.5 + uniform01(rng);
        for (double& val : v) val = 0.5 + uniform01(rng);
        for (std::size_t i = rb; i < re; ++i) {
            for (std::size_t j = cb; j < ce; ++j) {
                x(i, j) += u[i - rb] * v[j - cb];
            }
        }
    }
    if (noise > 0.0) {
        for (double& val : x.data()) val += noise * uniform01(rng);
    }

    // Rule t over a block covers segments t and t+1 (mod q), so each entity
    // lands in exactly two rules; overlap pushes rules into a third segment.
    std::vector<Rule> rules;
    std::vector<std::size_t> assignment;
    const std::size_t q = rules_per_factor;
    for (std::size_t z = 0; z < k; ++z) {
        const auto [rb, re] = entity_blocks[z];
        const auto segs = split_ranges(re - rb, q);
        for (std::size_t t = 0; t < q; ++t) {
            Rule r;
            r.id = "r" + std::to_string(z) + "_" + std::to_string(t);
            r.label = "c" + std::to_string(z);
            auto push_seg = [&](std::size_t s, std::size_t limit) {
                const auto [sb, se] = segs[s];
                const std::size_t end = sb + std::min(se - sb, limit);
                for (std::size_t i = sb; i < end; ++i) r.support.push_back(rb + i);
            };
            push_seg(t, m);
            push_seg((t + 1) % q, m);
            if (q >= 3 && overlap > 0.0) {
                const std::size_t s = (t + 2) % q;
                const std::size_t len = segs[s].second - segs[s].first;
                push_seg(s, static_cast<std::size_t>(overlap * static_cast<double>(len)));
            }
            rules.push_back(std::move(r));
            assignment.push_back(z);
        }
    }

    SyntheticData out{std::move(x), RuleSet(m, std::move(rules)), {}};
    out.truth = grouping_from_assignment(out.rules, k, std::move(assignment));
    return out;
}

} // namespace rinmf
