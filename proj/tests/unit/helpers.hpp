#pragma once

#include <cmath>
#include <cstdint>
#include <cstring>
#include <random>

#include "rinmf/matrix.hpp"
#include "rinmf/rand.hpp"

namespace test_helpers {

inline rinmf::Matrix random_matrix(std::size_t rows, std::size_t cols,
                                   std::mt19937_64& rng, double lo = 0.0,
                                   double hi = 1.0) {
    rinmf::Matrix m(rows, cols);
    for (double& v : m.data()) v = lo + (hi - lo) * rinmf::uniform01(rng);
    return m;
}

// distance in representable doubles; same-sign finite inputs only
inline std::uint64_t ulp_distance(double a, double b) {
    auto key = [](double x) {
        std::int64_t bits;
        std::memcpy(&bits, &x, sizeof(bits));
        return bits < 0 ? std::int64_t(0x8000000000000000ull) - bits : bits;
    };
    const std::int64_t ka = key(a);
    const std::int64_t kb = key(b);
    return static_cast<std::uint64_t>(ka > kb ? ka - kb : kb - ka);
}

inline double rel_err(double got, double want) {
    return std::abs(got - want) / std::max(std::abs(want), 1e-300);
}

} // namespace test_helpers
