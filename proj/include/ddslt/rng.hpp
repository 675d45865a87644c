#pragma once

#include <cstddef>
#include <cstdint>
#include <random>
#include <utility>
#include <vector>

namespace ddslt {

/// splitmix64 finalizer, used to derive independent stream seeds.
inline std::uint64_t mix64(std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

inline std::uint64_t mix64(std::uint64_t a, std::uint64_t b) {
    return mix64(mix64(a) ^ b);
}

inline std::uint64_t mix64(std::uint64_t a, std::uint64_t b, std::uint64_t c) {
    return mix64(mix64(a, b) ^ c);
}

/// Seeded random stream. Raw mt19937_64 output is portable across
/// implementations; the distribution helpers below avoid the
/// implementation-defined std:: distributions so that identical seeds give
/// byte-identical results everywhere.
class Rand {
public:
    explicit Rand(std::uint64_t seed) : eng_(seed) {}

    /// Uniform double in [0, 1), 53-bit resolution.
    double unit() { return static_cast<double>(eng_() >> 11) * 0x1.0p-53; }

    /// Uniform integer in [0, bound), bound > 0. Rejection sampling, unbiased.
    std::uint64_t below(std::uint64_t bound) {
        const std::uint64_t limit = UINT64_MAX - UINT64_MAX % bound;
        std::uint64_t v;
        do {
            v = eng_();
        } while (v >= limit);
        return v % bound;
    }

    bool bernoulli(double p) { return unit() < p; }

    std::uint8_t byte() { return static_cast<std::uint8_t>(eng_() >> 56); }

    /// Fisher-Yates shuffle.
    template <typename T>
    void shuffle(std::vector<T>& v) {
        for (std::size_t i = v.size(); i > 1; --i) {
            std::swap(v[i - 1], v[below(i)]);
        }
    }

private:
    std::mt19937_64 eng_;
};

/// Outcome source for accept/reject trials. The simulator feeds per-node
/// seeded streams; tests may substitute scripted outcome sequences.
struct BernoulliSource {
    virtual ~BernoulliSource() = default;
    virtual bool draw(double p) = 0;
};

struct RandBernoulli final : BernoulliSource {
    explicit RandBernoulli(std::uint64_t seed) : rand(seed) {}
    bool draw(double p) override { return rand.bernoulli(p); }
    Rand rand;
};

}  // namespace ddslt
