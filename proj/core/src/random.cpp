// SPDX-License-Identifier: Apache-2.0
#include "singprod/random.hpp"

namespace singprod {

namespace {

constexpr std::uint32_t kDomainTag = 0x5199d0a1u;

std::seed_seq make_seed_seq(std::uint64_t seed, std::uint64_t index) {
  return std::seed_seq{static_cast<std::uint32_t>(seed),
                       static_cast<std::uint32_t>(seed >> 32),
                       static_cast<std::uint32_t>(index),
                       static_cast<std::uint32_t>(index >> 32), kDomainTag};
}

}  // namespace

RandomStream::RandomStream(std::uint64_t seed, std::uint64_t index) {
  auto seq = make_seed_seq(seed, index);
  engine_.seed(seq);
}

}  // namespace singprod
