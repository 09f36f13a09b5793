#pragma once
#include <cstdint>

namespace kq {

/// Counter-based generator: output i is a keyed hash of (seed, stream, i).
/// Any draw can be reproduced from its coordinates without replaying the sequence.
class CounterRng {
  public:
    explicit CounterRng(std::uint64_t seed, std::uint64_t stream = 0) : key_(mix(seed ^ mix(stream + 0x632be59bd9b4e019ULL))) {}

    std::uint64_t next() { return at(counter_++); }
    [[nodiscard]] std::uint64_t at(std::uint64_t i) const { return mix(key_ + 0x9e3779b97f4a7c15ULL * (i + 1)); }

    /// Uniform double in [0, 1).
    double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

    [[nodiscard]] std::uint64_t counter() const { return counter_; }

    static std::uint64_t mix(std::uint64_t z) {
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

  private:
    std::uint64_t key_;
    std::uint64_t counter_ = 0;
};

} // namespace kq
