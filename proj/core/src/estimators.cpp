// SPDX-License-Identifier: Apache-2.0
#include "singprod/estimators.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <vector>

#include "singprod/error.hpp"
#include "singprod/matrix.hpp"
#include "singprod/parallel.hpp"
#include "singprod/statistics.hpp"

namespace singprod {

namespace {

using std::numbers::ln2;
using std::numbers::pi;

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr std::size_t kTargetBatches = 32;

// log|1 + next/prev|, written to keep precision when next ~ -prev.
inline double ratio_log(double prev, double next) noexcept {
  return std::log(std::abs((prev + next) / prev));
}

[[noreturn]] void degenerate_sample() {
  throw Error(ErrorCode::DegenerateSample,
              "path redraw cap exhausted: 1 + x_{j+1}/x_j == 0 keeps occurring");
}

void require_length(std::size_t n, std::size_t minimum, const char* op) {
  if (n < minimum) {
    throw Error(ErrorCode::ConfigError,
                std::string(op) + ": path length n must be at least " +
                    std::to_string(minimum));
  }
}

// Streams the n-1 ratio terms of one path into `sink`; returns false (and
// stops early) when some 1 + x_{j+1}/x_j is exactly zero.
template <class Sink>
bool stream_terms(EntrySampler& sampler, RandomStream& rng, std::size_t n, Sink&& sink) {
  double prev = sampler.draw(rng);
  for (std::size_t j = 1; j < n; ++j) {
    const double next = sampler.draw(rng);
    if (prev + next == 0.0) return false;
    sink(ratio_log(prev, next));
    prev = next;
  }
  return true;
}

// The n-1 terms of one path split into `batch_count` contiguous batches of
// near-equal size, all using the first term as shift.
std::vector<OneDependentMoments> accumulate_batches(const EntryDistribution& dist,
                                                    std::size_t n,
                                                    std::size_t batch_count,
                                                    RandomStream& rng) {
  EntrySampler sampler(dist);
  const std::size_t m = n - 1;
  const std::size_t base = m / batch_count;
  const std::size_t extra = m % batch_count;
  auto batch_size = [&](std::size_t b) { return base + (b < extra ? 1 : 0); };

  for (int attempt = 0; attempt <= kMaxPathRedraws; ++attempt) {
    std::vector<OneDependentMoments> batches;
    batches.reserve(batch_count);
    std::size_t in_batch = 0;
    const bool ok = stream_terms(sampler, rng, n, [&](double v) {
      if (batches.empty()) {
        batches.emplace_back(v);
      } else if (in_batch == batch_size(batches.size() - 1)) {
        batches.emplace_back(batches.front().shift());
        in_batch = 0;
      }
      batches.back().add(v);
      ++in_batch;
    });
    if (ok) return batches;
  }
  degenerate_sample();
}

double binary_log_ratio(const Binary& d) {
  return std::log((d.a + d.b) * (d.a + d.b) / (4.0 * std::abs(d.a * d.b)));
}

// Centered moments of A = log|1 + x_2/x_1| - lambda over a finite support.
struct AtomMoments {
  double lambda = 0.0;
  double c0 = 0.0;
  double c1 = 0.0;
};

AtomMoments atom_moments(const Support& s) {
  const std::size_t k = s.atoms.size();
  std::vector<double> ell(k * k);
  AtomMoments out;
  for (std::size_t i = 0; i < k; ++i) {
    for (std::size_t j = 0; j < k; ++j) {
      ell[i * k + j] = ratio_log(s.atoms[i], s.atoms[j]);
      out.lambda += s.weights[i] * s.weights[j] * ell[i * k + j];
    }
  }
  for (double& v : ell) v -= out.lambda;
  for (std::size_t j = 0; j < k; ++j) {
    // E[A(x1, y) | x2 = y] and E[A(y, x3) | x2 = y] for y = atom j.
    double into = 0.0;
    double out_of = 0.0;
    for (std::size_t i = 0; i < k; ++i) {
      into += s.weights[i] * ell[i * k + j];
      out_of += s.weights[i] * ell[j * k + i];
      out.c0 += s.weights[i] * s.weights[j] * ell[i * k + j] * ell[i * k + j];
    }
    out.c1 += s.weights[j] * into * out_of;
  }
  return out;
}

std::optional<double> uniform_lambda(const Uniform& d) {
  const double a = -d.lo;
  const double b = d.hi;
  if (a == 0.0) return 2.0 * ln2 - 0.5;
  if (a == b) return ln2 - 0.5;
  const double s = a + b;
  return 2.0 * (a * a + b * b) / (s * s) * ln2 - 0.5 +
         (a - b) / (s * s) *
             (b * std::log(std::abs(1.0 - a / b)) - a * std::log(std::abs(1.0 - b / a)));
}

std::optional<double> uniform_sigma2(const Uniform& d) {
  const double a = -d.lo;
  const double b = d.hi;
  if (a == 0.0) {
    return (4.0 * pi * pi + 15.0) / 36.0 - 2.0 / 3.0 * ln2 * (7.0 * ln2 - 2.0);
  }
  if (a == b) return (5.0 * pi * pi + 15.0) / 36.0;
  return std::nullopt;
}

}  // namespace

LambdaEstimate lambda_block_estimate(const EntryDistribution& dist, std::size_t n,
                                     RandomStream& rng) {
  require_length(n, 2, "lambda_block_estimate");
  const auto batches = accumulate_batches(dist, n, 1, rng);
  const auto& total = batches.front();
  LambdaEstimate out;
  out.lambda_hat = total.mean();
  out.n_samples = total.count();
  out.stderr_lambda = std::sqrt(std::max(0.0, total.long_run_variance()) /
                                static_cast<double>(total.count()));
  return out;
}

BlockMomentEstimate sigma2_block_estimate(const EntryDistribution& dist, std::size_t n,
                                          RandomStream& rng) {
  require_length(n, 3, "sigma2_block_estimate");
  const std::size_t m = n - 1;
  const std::size_t batch_count = std::clamp<std::size_t>(m / 2, 1, kTargetBatches);
  const auto batches = accumulate_batches(dist, n, batch_count, rng);

  OneDependentMoments total(batches.front().shift());
  for (const auto& b : batches) total.append(b);

  BlockMomentEstimate out;
  out.lambda_hat = total.mean();
  out.m2_hat = total.second_moment();
  out.c1_hat = total.cross_moment();
  // Equal to m2 + 2 c1 - 3 lambda^2, evaluated in centered form.
  out.sigma2_hat = total.long_run_variance();
  out.n_samples = total.count();
  out.batches = batches.size();
  out.stderr_lambda = std::sqrt(std::max(0.0, out.sigma2_hat) / static_cast<double>(m));

  if (batches.size() < 2) {
    out.stderr_sigma2 = kInf;
  } else {
    std::vector<double> per_batch;
    per_batch.reserve(batches.size());
    for (const auto& b : batches) per_batch.push_back(b.long_run_variance());
    const auto summary = summarize(per_batch);
    out.stderr_sigma2 =
        std::sqrt(summary.variance / static_cast<double>(per_batch.size()));
  }
  return out;
}

LambdaEstimate lambda_direct_estimate(const EntryDistribution& dist, std::size_t n,
                                      std::size_t reps, const StreamFamily& family,
                                      unsigned threads) {
  require_length(n, 1, "lambda_direct_estimate");
  if (reps == 0) throw Error(ErrorCode::ConfigError, "lambda_direct_estimate: reps must be positive");
  validate(dist);
  std::vector<double> rates(reps);
  parallel_for(reps, threads, [&](std::size_t r) {
    EntrySampler sampler(dist);
    RandomStream rng = family.stream(r);
    for (int attempt = 0; attempt <= kMaxPathRedraws; ++attempt) {
      RenormalizedProduct prod;
      double prev = 0.0;
      bool vanished = false;
      for (std::size_t j = 0; j < n; ++j) {
        const double x = sampler.draw(rng);
        if (j > 0 && prev + x == 0.0) {
          vanished = true;
          break;
        }
        prod.push(y_matrix(x));
        prev = x;
      }
      if (!vanished) {
        rates[r] = prod.log_norm() / static_cast<double>(n);
        return;
      }
    }
    degenerate_sample();
  });
  const auto summary = summarize(rates);
  LambdaEstimate out;
  out.lambda_hat = summary.mean;
  out.n_samples = reps;
  out.stderr_lambda =
      reps < 2 ? kInf : std::sqrt(summary.variance / static_cast<double>(reps));
  return out;
}

std::optional<double> lambda_closed_form(const EntryDistribution& dist) {
  validate(dist);
  if (const auto* b = std::get_if<Binary>(&dist)) {
    const double q = b->p * (1.0 - b->p);
    if (q == 0.0) return ln2;
    return ln2 + q * binary_log_ratio(*b);
  }
  if (const auto* u = std::get_if<Uniform>(&dist)) return uniform_lambda(*u);
  if (std::holds_alternative<Exponential>(dist)) return 1.0;
  if (std::holds_alternative<Laplace>(dist)) return 0.5;
  return atom_moments(discrete_support(dist)).lambda;
}

std::optional<double> sigma2_closed_form(const EntryDistribution& dist) {
  validate(dist);
  if (const auto* b = std::get_if<Binary>(&dist)) {
    const double q = b->p * (1.0 - b->p);
    if (q == 0.0) return 0.0;
    const double l = binary_log_ratio(*b);
    return q * (1.0 - 3.0 * q) * l * l;
  }
  if (const auto* u = std::get_if<Uniform>(&dist)) return uniform_sigma2(*u);
  if (std::holds_alternative<Exponential>(dist)) return (pi * pi - 9.0) / 3.0;
  if (std::holds_alternative<Laplace>(dist)) return (8.0 * pi * pi - 27.0) / 36.0;
  const auto m = atom_moments(discrete_support(dist));
  return m.c0 + 2.0 * m.c1;
}

std::string to_string(DegeneracyForm form) {
  switch (form) {
    case DegeneracyForm::FormI: return "FormI";
    case DegeneracyForm::FormII: return "FormII";
    case DegeneracyForm::FormIII: return "FormIII";
    case DegeneracyForm::Nondegenerate: return "Nondegenerate";
    case DegeneracyForm::NotApplicable: return "NotApplicable";
  }
  return "Unknown";
}

DegeneracyVerdict classify_degeneracy(const EntryDistribution& dist, double rel_tol) {
  if (!is_discrete(dist)) return {};
  validate(dist);
  const Support s = discrete_support(dist);
  if (s.atoms.size() == 1) {
    return {DegeneracyForm::FormI, s.atoms[0], 1.0};
  }
  if (s.atoms.size() == 2) {
    constexpr double kRatioII = -3.0 - 2.0 * std::numbers::sqrt2;
    constexpr double kRatioIII = -3.0 + 2.0 * std::numbers::sqrt2;
    const double r = s.atoms[1] / s.atoms[0];
    if (std::abs(r - kRatioII) <= rel_tol * std::abs(kRatioII)) {
      return {DegeneracyForm::FormII, s.atoms[0], s.weights[0]};
    }
    if (std::abs(r - kRatioIII) <= rel_tol * std::abs(kRatioIII)) {
      return {DegeneracyForm::FormIII, s.atoms[0], s.weights[0]};
    }
  }
  return {DegeneracyForm::Nondegenerate, 0.0, 0.0};
}

}  // namespace singprod
