#pragma once

#include <cstdint>
#include <random>
#include <vector>

namespace peagnn {

// Deterministic RNG wrapper. mt19937_64 has a standard-pinned output
// sequence; the derived draws below avoid std::*_distribution, whose
// output is implementation-defined, so runs reproduce bit-for-bit.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : seed_(seed), gen_(seed) {}

    std::uint64_t next() { return gen_(); }

    // uniform in [0, n), n > 0; rejection sampling removes modulo bias
    std::uint64_t below(std::uint64_t n) {
        const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
        std::uint64_t v = gen_();
        while (v >= limit) v = gen_();
        return v % n;
    }

    // uniform in [0, 1) with 53 random bits
    double uniform() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    template <typename T>
    void shuffle(std::vector<T>& v) {
        for (std::size_t i = v.size(); i > 1; --i) {
            std::size_t j = static_cast<std::size_t>(below(i));
            std::swap(v[i - 1], v[j]);
        }
    }

    // independent sub-stream keyed off the construction seed, so sampling
    // stages (split, negatives, candidates, init, ...) do not share state
    Rng fork(std::uint64_t tag) const {
        return Rng(splitmix64(seed_ ^ splitmix64(tag ^ 0x517cc1b727220a95ULL)));
    }

    std::uint64_t seed() const { return seed_; }

    static std::uint64_t splitmix64(std::uint64_t x) {
        x += 0x9e3779b97f4a7c15ULL;
        x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
        x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
        return x ^ (x >> 31);
    }

private:
    std::uint64_t seed_;
    std::mt19937_64 gen_;
};

}  // namespace peagnn
