// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <optional>
#include <string>

#include "singprod/distributions.hpp"
#include "singprod/random.hpp"

namespace singprod {

// Redraws allowed when a path hits 1 + x_{j+1}/x_j == 0 before giving up with
// Error{DegenerateSample}.
inline constexpr int kMaxPathRedraws = 100;

struct LambdaEstimate {
  double lambda_hat = 0.0;
  double stderr_lambda = 0.0;
  std::size_t n_samples = 0;  // number of averaged terms
};

struct BlockMomentEstimate {
  double lambda_hat = 0.0;
  double m2_hat = 0.0;  // mean of (log|1 + x_{j+1}/x_j|)^2
  double c1_hat = 0.0;  // mean of adjacent products
  double sigma2_hat = 0.0;
  std::size_t n_samples = 0;
  std::size_t batches = 0;
  double stderr_lambda = 0.0;
  double stderr_sigma2 = 0.0;
};

// One path x_1..x_n; averages the n-1 terms log|1 + x_{j+1}/x_j|. The
// standard error uses the 1-dependent long-run variance C0 + 2 C1.
LambdaEstimate lambda_block_estimate(const EntryDistribution& dist, std::size_t n,
                                     RandomStream& rng);

// Mean of (1/n) log ||S_n|| over `reps` independent paths; replication r uses
// family.stream(r).
LambdaEstimate lambda_direct_estimate(const EntryDistribution& dist, std::size_t n,
                                      std::size_t reps, const StreamFamily& family,
                                      unsigned threads = 0);

// One path of length n; sigma2_hat = m2 + 2 c1 - 3 lambda^2, with a
// nonoverlapping batch-means standard error.
BlockMomentEstimate sigma2_block_estimate(const EntryDistribution& dist,
                                          std::size_t n, RandomStream& rng);

// Exact values where known; nullopt means "not available".
std::optional<double> lambda_closed_form(const EntryDistribution& dist);
std::optional<double> sigma2_closed_form(const EntryDistribution& dist);

enum class DegeneracyForm { FormI, FormII, FormIII, Nondegenerate, NotApplicable };

struct DegeneracyVerdict {
  DegeneracyForm form = DegeneracyForm::NotApplicable;
  double atom = 0.0;  // the atom a of the matched form
  double p = 1.0;     // P(x = a)
};

std::string to_string(DegeneracyForm form);

inline constexpr double kDefaultDegeneracyTolerance = 1e-9;

// Matches a discrete law against the three zero-variance families
//   I:   x = a a.s.
//   II:  P(x = a) = p, P(x = (-3 - 2 sqrt 2) a) = 1 - p
//   III: P(x = a) = p, P(x = (-3 + 2 sqrt 2) a) = 1 - p
// II and III describe the same two-point sets with roles swapped; `a` is the
// first listed atom, so {1, -3-2sqrt2} is FormII(1) and {1, -3+2sqrt2} is
// FormIII(1).
DegeneracyVerdict classify_degeneracy(const EntryDistribution& dist,
                                      double rel_tol = kDefaultDegeneracyTolerance);

}  // namespace singprod
