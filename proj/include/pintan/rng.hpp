#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <stdexcept>
#include <string_view>
#include <utility>
#include <vector>

namespace pintan {

inline std::uint64_t splitmix64(std::uint64_t x)
{
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

inline std::uint64_t fnv1a(std::string_view s)
{
    std::uint64_t h = 0xCBF29CE484222325ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 0x100000001B3ULL;
    }
    return h;
}

/// Child seed for a named sub-stream, so that adding draws to one actor
/// never perturbs another actor's sequence.
inline std::uint64_t derive_seed(std::uint64_t seed, std::string_view label)
{
    return splitmix64(seed ^ splitmix64(fnv1a(label)));
}

/// Seeded generator with portable helpers. std::mt19937_64 output is fixed by
/// the standard; the std:: distributions are not, so the helpers below avoid them.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(splitmix64(seed)) {}
    Rng(std::uint64_t seed, std::string_view label) : Rng(derive_seed(seed, label)) {}

    std::uint64_t next() { return engine_(); }

    /// Uniform in [0, n). n must be positive.
    std::uint64_t below(std::uint64_t n)
    {
        if (n == 0)
            throw std::invalid_argument("Rng::below(0)");
        const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
        std::uint64_t x;
        do {
            x = engine_();
        } while (x >= limit);
        return x % n;
    }

    /// Uniform in [lo, hi], inclusive.
    std::int64_t between(std::int64_t lo, std::int64_t hi)
    {
        if (hi < lo)
            std::swap(lo, hi);
        return lo + static_cast<std::int64_t>(below(static_cast<std::uint64_t>(hi - lo) + 1));
    }

    double unit() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    bool chance(double p)
    {
        if (p <= 0.0)
            return false;
        if (p >= 1.0)
            return true;
        return unit() < p;
    }

    /// Index drawn proportionally to non-negative weights.
    std::size_t pick_weighted(std::span<const double> weights)
    {
        double total = 0.0;
        for (double w : weights)
            total += w;
        if (!(total > 0.0))
            throw std::invalid_argument("pick_weighted: weights sum to zero");
        double r = unit() * total;
        for (std::size_t i = 0; i < weights.size(); ++i) {
            if (r < weights[i])
                return i;
            r -= weights[i];
        }
        for (std::size_t i = weights.size(); i-- > 0;)
            if (weights[i] > 0.0)
                return i;
        return 0;
    }

    template <class T>
    void shuffle(std::vector<T>& v)
    {
        for (std::size_t i = v.size(); i > 1; --i)
            std::swap(v[i - 1], v[below(i)]);
    }

    char digit() { return static_cast<char>('0' + below(10)); }

private:
    std::mt19937_64 engine_;
};

} // namespace pintan
