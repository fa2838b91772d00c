#pragma once

#include <cstdint>
#include <stdexcept>

namespace uecsp {

inline std::uint32_t mod_add(std::uint32_t a, std::uint32_t b, std::uint32_t d) {
    std::uint32_t s = a + b;
    return s >= d ? s - d : s;
}

inline std::uint32_t mod_sub(std::uint32_t a, std::uint32_t b, std::uint32_t d) {
    return a >= b ? a - b : a + d - b;
}

inline std::uint32_t mod_mul(std::uint32_t a, std::uint32_t b, std::uint32_t d) {
    return static_cast<std::uint32_t>((static_cast<std::uint64_t>(a) * b) % d);
}

inline std::uint32_t gcd_u32(std::uint32_t a, std::uint32_t b) {
    while (b != 0) {
        std::uint32_t t = a % b;
        a = b;
        b = t;
    }
    return a;
}

// a is a unit mod d iff gcd(a, d) == 1; exactly the invertible coefficients.
inline bool is_unit(std::uint32_t a, std::uint32_t d) {
    return a % d != 0 && gcd_u32(a % d, d) == 1;
}

// Inverse of a unit via extended Euclid. Throws if gcd(a, d) != 1.
inline std::uint32_t mod_inverse(std::uint32_t a, std::uint32_t d) {
    std::int64_t r0 = d, r1 = a % d, s0 = 0, s1 = 1;
    while (r1 != 0) {
        std::int64_t q = r0 / r1;
        std::int64_t r2 = r0 - q * r1;
        std::int64_t s2 = s0 - q * s1;
        r0 = r1; r1 = r2;
        s0 = s1; s1 = s2;
    }
    if (r0 != 1) throw std::domain_error("mod_inverse: argument is not a unit");
    std::int64_t inv = s0 % static_cast<std::int64_t>(d);
    if (inv < 0) inv += d;
    return static_cast<std::uint32_t>(inv);
}

inline bool is_prime(std::uint32_t n) {
    if (n < 2) return false;
    for (std::uint32_t p = 2; static_cast<std::uint64_t>(p) * p <= n; ++p)
        if (n % p == 0) return false;
    return true;
}

}  // namespace uecsp
