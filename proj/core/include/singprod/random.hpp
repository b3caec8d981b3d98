// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace singprod {

// Name of the generator and the derivation scheme. Bump the suffix whenever
// any change would alter the bit stream for a given (seed, index).
inline constexpr std::string_view kRngAlgorithm = "mt19937_64/seed_seq-v1";

// A single random stream. Engine and seeding are fully specified by the C++
// standard, and the uniform transform below is ours, so a given (seed, index)
// produces the same doubles on every conforming platform.
class RandomStream {
public:
  RandomStream(std::uint64_t seed, std::uint64_t index);

  std::uint64_t next_u64() { return engine_(); }

  // Uniform on [0, 1) with 53 random bits.
  double uniform() {
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
  }

private:
  std::mt19937_64 engine_;
};

// Deterministic family of independent sub-streams keyed by replication index.
class StreamFamily {
public:
  explicit StreamFamily(std::uint64_t seed) : seed_(seed) {}

  std::uint64_t seed() const noexcept { return seed_; }
  RandomStream stream(std::uint64_t index) const { return {seed_, index}; }

private:
  std::uint64_t seed_;
};

}  // namespace singprod
