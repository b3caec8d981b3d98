// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <variant>
#include <vector>

#include "singprod/random.hpp"

namespace singprod {

// P(x = a) = p, P(x = b) = 1 - p. p in [0, 1]; a == b is allowed and is a
// point mass.
struct Binary {
  double a = 1.0;
  double b = 1.0;
  double p = 0.5;
};

// Uniform on [lo, hi] with lo <= 0 < hi, i.e. [-a, b] with a = -lo, b = hi.
struct Uniform {
  double lo = 0.0;
  double hi = 1.0;
};

// sign * Exp(rate). sign is +1 (support (0, inf)) or -1 (support (-inf, 0)).
struct Exponential {
  double rate = 1.0;
  int sign = 1;
};

// Zero-mean Laplace with density exp(-|x| / scale) / (2 scale).
struct Laplace {
  double scale = 1.0;
};

// Finite support with strictly positive weights summing to one.
struct DiscreteAtoms {
  std::vector<double> atoms;
  std::vector<double> weights;
};

using EntryDistribution =
    std::variant<Binary, Uniform, Exponential, Laplace, DiscreteAtoms>;

// Throws Error{ZeroAtom | CancellingAtoms | BadWeights | BadSupport}.
void validate(const EntryDistribution& dist);

// Law of c * x. Throws Error{ZeroParam} for c == 0 and Error{UnsupportedScale}
// when a uniform support cannot be put back in lo <= 0 < hi form.
EntryDistribution scale(const EntryDistribution& dist, double c);

bool is_discrete(const EntryDistribution& dist) noexcept;
bool is_continuous(const EntryDistribution& dist) noexcept;

std::string kind_name(const EntryDistribution& dist);

// A weighted atom list equivalent to a discrete law, with zero-weight and
// duplicate atoms merged. Only valid for Binary and DiscreteAtoms.
struct Support {
  std::vector<double> atoms;
  std::vector<double> weights;
};
Support discrete_support(const EntryDistribution& dist);

// Draws i.i.d. entries from a validated distribution. Continuous draws that
// land exactly on 0 are redrawn and counted.
class EntrySampler {
public:
  explicit EntrySampler(EntryDistribution dist);

  double draw(RandomStream& rng);
  void fill(RandomStream& rng, std::vector<double>& out, std::size_t count);

  const EntryDistribution& distribution() const noexcept { return dist_; }
  std::uint64_t zero_redraws() const noexcept { return zero_redraws_; }

private:
  double draw_once(RandomStream& rng) const;

  EntryDistribution dist_;
  std::vector<double> cumulative_;  // DiscreteAtoms only
  std::uint64_t zero_redraws_ = 0;
};

// Convenience wrapper: validate, then draw `count` entries.
std::vector<double> sample(const EntryDistribution& dist, RandomStream& rng,
                           std::size_t count);

}  // namespace singprod
