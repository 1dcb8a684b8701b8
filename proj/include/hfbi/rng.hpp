#pragma once

#include <cstdint>
#include <limits>
#include <random>

namespace hfbi {

// Default master seed used by the CLI and by API defaults. Fixed so that
// runs are reproducible without any flags.
inline constexpr std::uint64_t kDefaultSeed = 123456789;

// SplitMix64 finalizer, used as the mixing step for seed derivation.
inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

// Deterministic seed for sub-task (a, b) of a master seed. Parallel kernels
// derive one seed per task so thread scheduling cannot affect results.
inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t a, std::uint64_t b = 0) {
    const std::uint64_t z = splitmix64(master ^ splitmix64(a + 0x9e3779b97f4a7c15ULL));
    return splitmix64(z ^ splitmix64(b + 0x2545f4914f6cdd1dULL));
}

// mt19937_64 plus the uniform draws we need. The std:: distribution objects
// are not bit-portable across standard libraries, so draws are done here.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : eng_(seed) {}

    std::uint64_t next_u64() { return eng_(); }

    // Uniform on [0, 1) with 53 random bits.
    double uniform01() { return static_cast<double>(eng_() >> 11) * 0x1.0p-53; }

    // Unbiased uniform integer on [0, n), n >= 1.
    std::uint64_t uniform_below(std::uint64_t n) {
        const std::uint64_t rem = (std::numeric_limits<std::uint64_t>::max() % n + 1) % n;
        for (;;) {
            const std::uint64_t r = eng_();
            if (rem == 0 || r < std::numeric_limits<std::uint64_t>::max() - rem + 1) {
                return r % n;
            }
        }
    }

private:
    std::mt19937_64 eng_;
};

}  // namespace hfbi
