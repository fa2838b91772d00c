#pragma once

#include <cstdint>
#include <random>

namespace uecsp {

// Deterministic RNG wrapper. All bounded draws go through Lemire rejection on the
// raw 64-bit stream so results depend only on the seed, not on the standard
// library's distribution implementations.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : eng_(seed) {}

    std::uint64_t next() { return eng_(); }

    // uniform in [0, n), n >= 1
    std::uint64_t below(std::uint64_t n) {
        if (n <= 1) return 0;
        while (true) {
            std::uint64_t x = eng_();
            __uint128_t m = static_cast<__uint128_t>(x) * n;
            auto lo = static_cast<std::uint64_t>(m);
            if (lo < n) {
                std::uint64_t floor = (0 - n) % n;  // 2^64 mod n
                if (lo < floor) continue;
            }
            return static_cast<std::uint64_t>(m >> 64);
        }
    }

    // uniform in [0, 1) with 53-bit resolution
    double real01() { return static_cast<double>(eng_() >> 11) * 0x1.0p-53; }

private:
    std::mt19937_64 eng_;
};

// splitmix64 finalizer; used to derive independent per-run seeds from a master seed.
inline std::uint64_t mix_seed(std::uint64_t master, std::uint64_t stream) {
    std::uint64_t z = master + 0x9e3779b97f4a7c15ULL * (stream + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

}  // namespace uecsp
