#pragma once

#include <cmath>
#include <cstdint>

namespace rgm {

/// Counter-based pseudo-random generator. The i-th draw is a pure function of
/// (seed, i), so streams are reproducible across platforms and independent
/// streams can be derived by fixed offsets. Mixing is the splitmix64 finalizer.
class CounterRng {
  public:
    explicit CounterRng(std::uint64_t seed) : seed_(seed) {}

    /// Derive an independent stream for a named pipeline stage.
    CounterRng derive(std::uint64_t stage) const { return CounterRng(stream_seed(stage)); }

    /// Seed value of the derived stream (for APIs that take raw seeds).
    std::uint64_t stream_seed(std::uint64_t stage) const {
        return mix(seed_ ^ (0x9e3779b97f4a7c15ULL * (stage + 1)));
    }

    std::uint64_t next_u64() { return mix(seed_ + 0x9e3779b97f4a7c15ULL * (++counter_)); }

    /// Uniform draw in (0, 1]; never returns 0 so log() is safe.
    double uniform01() {
        return (static_cast<double>(next_u64() >> 11) + 1.0) * 0x1.0p-53;
    }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

    /// Standard normal via Box-Muller.
    double gaussian() {
        const double u1 = uniform01();
        const double u2 = uniform01();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
    }

    /// Uniform integer in [0, bound).
    std::uint64_t below(std::uint64_t bound) { return next_u64() % bound; }

  private:
    static std::uint64_t mix(std::uint64_t z) {
        z ^= z >> 30;
        z *= 0xbf58476d1ce4e5b9ULL;
        z ^= z >> 27;
        z *= 0x94d049bb133111ebULL;
        z ^= z >> 31;
        return z;
    }

    std::uint64_t seed_;
    std::uint64_t counter_ = 0;
};

}  // namespace rgm
