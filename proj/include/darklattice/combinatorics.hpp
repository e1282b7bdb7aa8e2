#pragma once

#include <cstdint>
#include <stdexcept>

namespace darklattice {

// Exact integer combinatorics with explicit overflow detection. Subspace
// dimensions and closed-form coefficients must never be approximated.

inline std::uint64_t checked_mul(std::uint64_t a, std::uint64_t b) {
    unsigned __int128 p = static_cast<unsigned __int128>(a) * b;
    if (p > static_cast<unsigned __int128>(UINT64_MAX))
        throw std::overflow_error("combinatorics: 64-bit overflow");
    return static_cast<std::uint64_t>(p);
}

/// C(n, k), exact; 0 when k > n.
inline std::uint64_t binomial(std::uint64_t n, std::uint64_t k) {
    if (k > n) return 0;
    if (k > n - k) k = n - k;
    std::uint64_t result = 1;
    for (std::uint64_t i = 1; i <= k; ++i) {
        // result * (n-k+i) is divisible by i at every step
        unsigned __int128 p = static_cast<unsigned __int128>(result) * (n - k + i);
        p /= i;
        if (p > static_cast<unsigned __int128>(UINT64_MAX))
            throw std::overflow_error("binomial: 64-bit overflow");
        result = static_cast<std::uint64_t>(p);
    }
    return result;
}

/// m!, exact.
inline std::uint64_t factorial(unsigned m) {
    if (m > 20) throw std::overflow_error("factorial: 64-bit overflow");
    std::uint64_t r = 1;
    for (unsigned i = 2; i <= m; ++i) r *= i;
    return r;
}

/// Permutation number A_m^k = m!/(m-k)!, exact.
inline std::uint64_t permutation_number(unsigned m, unsigned k) {
    if (k > m) throw std::invalid_argument("permutation_number: k > m");
    std::uint64_t r = 1;
    for (unsigned i = 0; i < k; ++i) r = checked_mul(r, m - i);
    return r;
}

}  // namespace darklattice
