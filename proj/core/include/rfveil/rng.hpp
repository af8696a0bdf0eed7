#pragma once

#include <cstdint>
#include <random>

#include "rfveil/types.hpp"

namespace rfveil {

// Deterministic random source.  Distributions are implemented by hand on top
// of mt19937_64 so that streams are bit-identical across standard libraries
// and platforms; std::normal_distribution et al. make no such guarantee.
class Rng {
  public:
    explicit Rng(std::uint64_t seed) : gen_(seed) {}

    std::uint64_t next_u64() { return gen_(); }

    // Uniform in [0, 1) with 53 bits of resolution.
    double uniform();

    // Uniform in [lo, hi).
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    std::uint64_t uniform_index(std::uint64_t n);  // uniform in [0, n)

    // Standard normal via Box-Muller (one value per call, cached pair).
    double gaussian();

    // Circularly symmetric complex Gaussian with E[|z|^2] = variance.
    Complex complex_gaussian(double variance);

  private:
    std::mt19937_64 gen_;
    bool have_spare_ = false;
    double spare_ = 0.0;
};

// SplitMix64 step; used to derive well-separated child seeds from a master
// seed plus a handful of indices.
std::uint64_t splitmix64(std::uint64_t x);

// Chain a sequence of values through splitmix64 to derive a child seed.
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t a, std::uint64_t b = 0,
                          std::uint64_t c = 0, std::uint64_t d = 0);

}  // namespace rfveil
