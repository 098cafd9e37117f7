#pragma once

#include <cstdint>
#include <random>

namespace rinmf {

// std::uniform_real_distribution / uniform_int_distribution are free to
// differ between standard libraries, which would break seed replay. These
// fixed mappings are the only draw primitives the library uses.

// uniform double in [0,1)
inline double uniform01(std::mt19937_64& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

// uniform integer in [0,n)
inline std::size_t uniform_below(std::mt19937_64& rng, std::size_t n) {
    return static_cast<std::size_t>(
        (static_cast<unsigned __int128>(rng()) * n) >> 64);
}

} // namespace rinmf
