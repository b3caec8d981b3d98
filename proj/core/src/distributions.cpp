// SPDX-License-Identifier: Apache-2.0
#include "singprod/distributions.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "singprod/error.hpp"

namespace singprod {

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};

constexpr double kWeightSumTolerance = 1e-9;

[[noreturn]] void fail(ErrorCode code, const std::string& msg) {
  throw Error(code, msg);
}

void check_finite(double v, const char* what) {
  if (!std::isfinite(v)) {
    fail(ErrorCode::BadSupport, std::string(what) + " must be finite");
  }
}

void validate_binary(const Binary& d) {
  check_finite(d.a, "binary atom a");
  check_finite(d.b, "binary atom b");
  if (d.a == 0.0 || d.b == 0.0) fail(ErrorCode::ZeroAtom, "binary atom is zero");
  if (!(d.p >= 0.0 && d.p <= 1.0)) {
    fail(ErrorCode::BadWeights, "binary p must lie in [0, 1]");
  }
  const bool both_charged = d.p > 0.0 && d.p < 1.0;
  if (both_charged && d.a == -d.b) {
    fail(ErrorCode::CancellingAtoms, "binary atoms satisfy a == -b");
  }
}

void validate_uniform(const Uniform& d) {
  check_finite(d.lo, "uniform lo");
  check_finite(d.hi, "uniform hi");
  if (!(d.lo <= 0.0 && d.hi > 0.0 && d.lo < d.hi)) {
    fail(ErrorCode::BadSupport, "uniform support must satisfy lo <= 0 < hi");
  }
}

void validate_atoms(const DiscreteAtoms& d) {
  if (d.atoms.empty() || d.atoms.size() != d.weights.size()) {
    fail(ErrorCode::BadWeights, "atoms and weights must be nonempty and of equal length");
  }
  double total = 0.0;
  for (double w : d.weights) {
    if (!(w > 0.0) || !std::isfinite(w)) {
      fail(ErrorCode::BadWeights, "weights must be positive and finite");
    }
    total += w;
  }
  if (std::abs(total - 1.0) > kWeightSumTolerance) {
    fail(ErrorCode::BadWeights, "weights must sum to 1");
  }
  for (std::size_t i = 0; i < d.atoms.size(); ++i) {
    check_finite(d.atoms[i], "atom");
    if (d.atoms[i] == 0.0) fail(ErrorCode::ZeroAtom, "atom is zero");
  }
  for (std::size_t i = 0; i < d.atoms.size(); ++i) {
    for (std::size_t k = i + 1; k < d.atoms.size(); ++k) {
      if (d.atoms[i] == d.atoms[k]) {
        fail(ErrorCode::BadWeights, "atoms must be pairwise distinct");
      }
      if (d.atoms[i] == -d.atoms[k]) {
        std::ostringstream os;
        os << "atoms " << d.atoms[i] << " and " << d.atoms[k] << " cancel";
        fail(ErrorCode::CancellingAtoms, os.str());
      }
    }
  }
}

}  // namespace

void validate(const EntryDistribution& dist) {
  std::visit(overloaded{
                 [](const Binary& d) { validate_binary(d); },
                 [](const Uniform& d) { validate_uniform(d); },
                 [](const Exponential& d) {
                   if (!(d.rate > 0.0) || !std::isfinite(d.rate)) {
                     fail(ErrorCode::BadSupport, "exponential rate must be positive");
                   }
                   if (d.sign != 1 && d.sign != -1) {
                     fail(ErrorCode::BadSupport, "exponential sign must be +1 or -1");
                   }
                 },
                 [](const Laplace& d) {
                   if (!(d.scale > 0.0) || !std::isfinite(d.scale)) {
                     fail(ErrorCode::BadSupport, "laplace scale must be positive");
                   }
                 },
                 [](const DiscreteAtoms& d) { validate_atoms(d); },
             },
             dist);
}

EntryDistribution scale(const EntryDistribution& dist, double c) {
  if (c == 0.0 || !std::isfinite(c)) {
    fail(ErrorCode::ZeroParam, "scale factor must be finite and nonzero");
  }
  return std::visit(
      overloaded{
          [c](const Binary& d) -> EntryDistribution {
            return Binary{c * d.a, c * d.b, d.p};
          },
          [c](const Uniform& d) -> EntryDistribution {
            Uniform out = c > 0.0 ? Uniform{c * d.lo, c * d.hi}
                                  : Uniform{c * d.hi, c * d.lo};
            if (!(out.lo <= 0.0 && out.hi > 0.0)) {
              fail(ErrorCode::UnsupportedScale,
                   "scaled uniform support violates lo <= 0 < hi");
            }
            return out;
          },
          [c](const Exponential& d) -> EntryDistribution {
            return Exponential{d.rate / std::abs(c), c > 0.0 ? d.sign : -d.sign};
          },
          [c](const Laplace& d) -> EntryDistribution {
            return Laplace{d.scale * std::abs(c)};
          },
          [c](const DiscreteAtoms& d) -> EntryDistribution {
            DiscreteAtoms out = d;
            for (double& a : out.atoms) a *= c;
            return out;
          },
      },
      dist);
}

bool is_discrete(const EntryDistribution& dist) noexcept {
  return std::holds_alternative<Binary>(dist) ||
         std::holds_alternative<DiscreteAtoms>(dist);
}

bool is_continuous(const EntryDistribution& dist) noexcept {
  return !is_discrete(dist);
}

std::string kind_name(const EntryDistribution& dist) {
  return std::visit(overloaded{
                        [](const Binary&) { return std::string("binary"); },
                        [](const Uniform&) { return std::string("uniform"); },
                        [](const Exponential&) { return std::string("exponential"); },
                        [](const Laplace&) { return std::string("laplace"); },
                        [](const DiscreteAtoms&) { return std::string("atoms"); },
                    },
                    dist);
}

Support discrete_support(const EntryDistribution& dist) {
  Support raw;
  if (const auto* b = std::get_if<Binary>(&dist)) {
    raw.atoms = {b->a, b->b};
    raw.weights = {b->p, 1.0 - b->p};
  } else if (const auto* d = std::get_if<DiscreteAtoms>(&dist)) {
    raw.atoms = d->atoms;
    raw.weights = d->weights;
  } else {
    fail(ErrorCode::BadSupport, "distribution is not discrete");
  }
  Support out;
  for (std::size_t i = 0; i < raw.atoms.size(); ++i) {
    if (raw.weights[i] <= 0.0) continue;
    auto it = std::find(out.atoms.begin(), out.atoms.end(), raw.atoms[i]);
    if (it == out.atoms.end()) {
      out.atoms.push_back(raw.atoms[i]);
      out.weights.push_back(raw.weights[i]);
    } else {
      out.weights[static_cast<std::size_t>(it - out.atoms.begin())] += raw.weights[i];
    }
  }
  return out;
}

EntrySampler::EntrySampler(EntryDistribution dist) : dist_(std::move(dist)) {
  validate(dist_);
  if (const auto* d = std::get_if<DiscreteAtoms>(&dist_)) {
    cumulative_.resize(d->weights.size());
    std::partial_sum(d->weights.begin(), d->weights.end(), cumulative_.begin());
  }
}

double EntrySampler::draw_once(RandomStream& rng) const {
  return std::visit(
      overloaded{
          [&rng](const Binary& d) { return rng.uniform() < d.p ? d.a : d.b; },
          [&rng](const Uniform& d) { return d.lo + (d.hi - d.lo) * rng.uniform(); },
          [&rng](const Exponential& d) {
            return d.sign * (-std::log1p(-rng.uniform()) / d.rate);
          },
          [&rng](const Laplace& d) {
            const std::uint64_t bits = rng.next_u64();
            const double u = static_cast<double>(bits >> 11) * 0x1.0p-53;
            const double magnitude = -std::log1p(-u) * d.scale;
            return (bits & 1u) ? -magnitude : magnitude;
          },
          [&rng, this](const DiscreteAtoms& d) {
            // Scale by the realized total so the last bin absorbs rounding.
            const double u = rng.uniform() * cumulative_.back();
            auto it = std::upper_bound(cumulative_.begin(), cumulative_.end(), u);
            const auto idx = std::min<std::size_t>(
                static_cast<std::size_t>(it - cumulative_.begin()), d.atoms.size() - 1);
            return d.atoms[idx];
          },
      },
      dist_);
}

double EntrySampler::draw(RandomStream& rng) {
  double x = draw_once(rng);
  while (x == 0.0) {
    ++zero_redraws_;
    x = draw_once(rng);
  }
  return x;
}

void EntrySampler::fill(RandomStream& rng, std::vector<double>& out,
                        std::size_t count) {
  out.resize(count);
  for (auto& x : out) x = draw(rng);
}

std::vector<double> sample(const EntryDistribution& dist, RandomStream& rng,
                           std::size_t count) {
  EntrySampler sampler(dist);
  std::vector<double> out;
  sampler.fill(rng, out, count);
  return out;
}

}  // namespace singprod
