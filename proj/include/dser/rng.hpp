#ifndef DSER_RNG_HPP
#define DSER_RNG_HPP

#include <cstdint>

namespace dser {

// Deterministic splitmix64 generator.  Every randomized routine in the
// library takes an explicit Rng (or a seed) so that reports are
// byte-reproducible; parallel trial batches derive one stream per trial
// via mix() instead of sharing a generator.
struct Rng {
    std::uint64_t state;

    explicit Rng(std::uint64_t seed) : state(seed) {}

    std::uint64_t next() {
        std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    // Uniform value in [0, k); k must be positive.  Rejection sampling keeps
    // the distribution exact and the stream reproducible.
    std::uint64_t below(std::uint64_t k) {
        const std::uint64_t limit = k * (UINT64_MAX / k);
        std::uint64_t v = next();
        while (v >= limit) v = next();
        return v % k;
    }

    // Uniform value in [lo, hi] inclusive.
    long range(long lo, long hi) {
        return lo + static_cast<long>(below(static_cast<std::uint64_t>(hi - lo + 1)));
    }

    bool coin() { return (next() & 1u) != 0; }
};

// Derive an independent child seed from a master seed and a position tag.
// Used to give each (module, case, trial) its own stream so parallel runs
// match serial runs bit for bit.
inline std::uint64_t mix_seed(std::uint64_t master, std::uint64_t a,
                              std::uint64_t b = 0, std::uint64_t c = 0) {
    Rng r(master ^ (a * 0x9e3779b97f4a7c15ULL) ^ (b * 0xc2b2ae3d27d4eb4fULL) ^
          (c * 0x165667b19e3779f9ULL));
    r.next();
    return r.next();
}

}  // namespace dser

#endif
