#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace fairpath {

/// SplitMix64 finalizer. Used to turn (seed, stream) pairs into generator seeds.
std::uint64_t mix64(std::uint64_t x);

/// FNV-1a over the bytes of a string; stream ids for named columns.
std::uint64_t hash_name(std::string_view name);

/// Seed for an independent substream. Streams are keyed by a 64-bit id so that
/// adding a new stream never shifts the draws of an existing one.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream);
std::uint64_t derive_seed(std::uint64_t seed, std::string_view stream);

/// Portable random source. The engine output sequence of std::mt19937_64 is
/// fixed by the standard; the distributions below are implemented here because
/// the std:: ones are not bit-reproducible across standard libraries.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(mix64(seed)) {}

    std::uint64_t next() { return engine_(); }

    /// Uniform on [0, 1) with 53 random bits.
    double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    /// Uniform integer in [0, n). Lemire's nearly-divisionless rejection.
    std::size_t index(std::size_t n);

    /// Standard normal via Box-Muller (one output per pair of uniforms).
    double normal();

    bool bernoulli(double p) { return uniform() < p; }

private:
    std::mt19937_64 engine_;
};

}  // namespace fairpath
