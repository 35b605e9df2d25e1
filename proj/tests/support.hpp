#pragma once

#include "khom/exact_arith.hpp"

#include <numeric>
#include <random>

namespace khom::testing {

inline std::mt19937_64& rng() {
    static std::mt19937_64 gen(20261019);
    return gen;
}

inline long uniform(long lo, long hi) { return std::uniform_int_distribution<long>(lo, hi)(rng()); }

/// m/q with gcd 1, 0 < m < q.
inline std::pair<long, long> random_coprime(long q_lo, long q_hi) {
    for (;;) {
        const long q = uniform(q_lo, q_hi);
        const long m = uniform(1, q - 1);
        if (std::gcd(m, q) == 1) return {m, q};
    }
}

/// Plain Euclid on machine integers; independent of the library.
inline std::vector<long> euclid_digits(long num, long den) {
    std::vector<long> out;
    while (den != 0) {
        long a = num / den, r = num % den;
        if (r < 0) {
            a -= 1;
            r += den;
        }
        out.push_back(a);
        num = den;
        den = r;
    }
    return out;
}

}  // namespace khom::testing
