#pragma once

#include <cstdint>
#include <random>

namespace lmef {

/// Seedable random stream shared by every stochastic operation.
///
/// The engine is std::mt19937_64, whose output sequence is fixed by the
/// standard. The std:: distributions are implementation-defined, so the
/// real/integer/normal transforms below are written out explicitly to keep
/// draws identical across toolchains. `counter()` is the number of raw 64-bit
/// words consumed since seeding.
class Rng {
public:
    explicit Rng(std::uint64_t seed = 0);

    std::uint64_t next_u64();

    /// Uniform on [0, 1) with 53 random bits.
    double uniform();
    /// Uniform on [lo, hi).
    double uniform(double lo, double hi);
    /// Uniform integer on [0, n). n must be positive.
    std::uint64_t index(std::uint64_t n);
    /// Gaussian draw (Box-Muller, no cached second value).
    double normal(double mean, double stddev);
    bool bernoulli(double p) { return uniform() < p; }

    std::uint64_t seed() const noexcept { return seed_; }
    std::uint64_t counter() const noexcept { return counter_; }

    /// Derives an independent child stream, e.g. one per experiment cell.
    Rng split();

private:
    std::mt19937_64 engine_;
    std::uint64_t seed_;
    std::uint64_t counter_ = 0;
};

} // namespace lmef
