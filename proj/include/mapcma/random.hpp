#pragma once

#include <cstdint>
#include <random>

namespace mapcma
{
    /// splitmix64 finalizer; used to derive independent per-trial seeds.
    constexpr std::uint64_t splitmix64(std::uint64_t x)
    {
        x += 0x9E3779B97F4A7C15ULL;
        x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
        x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
        return x ^ (x >> 31);
    }

    /// Seeded random stream: uniform and standard normal draws.
    /// Reproducible for a given seed within one standard library build.
    class RandomStream
    {
    public:
        explicit RandomStream(std::uint64_t seed) : engine_(splitmix64(seed)) {}

        double uniform(double lower, double upper)
        {
            return std::uniform_real_distribution<double>(lower, upper)(engine_);
        }

        double normal() { return normal_(engine_); }

    private:
        std::mt19937_64 engine_;
        std::normal_distribution<double> normal_;
    };
}
