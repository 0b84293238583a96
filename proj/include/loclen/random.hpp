#pragma once

// Reproducible random streams. A Seed names a stream; the engine for a Seed is
// an mt19937_64 keyed by a SplitMix64 hash of both fields, so nearby seeds give
// unrelated states. Gaussian and exponential variates use Boost's ziggurat
// samplers, whose output is fixed by the engine output (unlike the
// implementation-defined std:: distributions).

#include <boost/random/exponential_distribution.hpp>
#include <boost/random/normal_distribution.hpp>
#include <boost/random/uniform_01.hpp>

#include <cstdint>
#include <random>

namespace loclen {

struct Seed {
    std::uint64_t stream_id = 0;
    std::uint64_t substream_index = 0;

    /// Seed of the i-th child stream. Children of distinct parents or with
    /// distinct i are distinct streams.
    Seed child(std::uint64_t i) const noexcept;

    bool operator==(const Seed&) const = default;
};

constexpr std::uint64_t splitmix64(std::uint64_t x) noexcept {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

class Rng {
public:
    explicit Rng(Seed seed);

    double normal() { return normal_(engine_); }
    /// Exponential with mean 1.
    double exponential() { return exp_(engine_); }
    /// Uniform on [0, 1).
    double uniform() { return unif_(engine_); }

    std::mt19937_64& engine() noexcept { return engine_; }

private:
    std::mt19937_64 engine_;
    boost::random::normal_distribution<double> normal_;
    boost::random::exponential_distribution<double> exp_;
    boost::random::uniform_01<double> unif_;
};

}  // namespace loclen
