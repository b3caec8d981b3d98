// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "singprod/distributions.hpp"
#include "singprod/quadrature.hpp"
#include "singprod/random.hpp"

namespace singprod {

// Asymptotic 1% critical value of sqrt(n) * D_n for the one-sample KS test.
inline constexpr double kKsCritical1Pct = 1.6276;

struct KsResult {
  double distance = 0.0;
  double critical_value = 0.0;  // kKsCritical1Pct / sqrt(n)
  bool reject_at_1pct = false;
};

// One-sample Kolmogorov-Smirnov distance against N(0, sigma2).
// Throws Error{ZeroVariance} when sigma2 <= 0.
KsResult ks_against_normal(std::span<const double> samples, double sigma2);

enum class LambdaSource {
  ClosedForm,  // exact formula; Error{MissingLambda} when there is none
  Estimate,    // an independent high-precision value: quadrature oracle for
               // continuous laws, exact finite sums for discrete ones
};

struct CltReport {
  std::size_t n = 0;
  std::size_t reps = 0;
  double lambda_used = 0.0;
  double sigma2_ref = 0.0;
  std::vector<double> samples;  // (log ||S_n|| - n lambda) / sqrt(n)
  double empirical_mean = 0.0;
  double empirical_var = 0.0;
  std::optional<KsResult> ks;  // absent when sigma2_ref is (numerically) zero
};

CltReport simulate_normalized(const EntryDistribution& dist, std::size_t n,
                              std::size_t reps, LambdaSource lambda_source,
                              const StreamFamily& family, unsigned threads = 0,
                              const QuadratureSpec& oracle_spec = {});

struct CancellationReport {
  std::size_t n = 0;
  std::size_t reps = 0;
  double lambda_used = 0.0;
  double var_total_over_n = 0.0;    // Var(sum_{j<=n} A_j) / n
  double var_even_over_half = 0.0;  // Var(sum A_{2j}) / (n/2)
  double var_odd_over_half = 0.0;   // Var(sum A_{2j-1}) / (n/2)
  double correlation_even_odd = 0.0;
  std::vector<double> s_total;
  std::vector<double> s_even;
  std::vector<double> s_odd;
};

// A_j = log|1 + x_{j+1}/x_j| - lambda for j = 1..n (n even), lambda from the
// closed form. Per replication, the total, even-index and odd-index sums.
CancellationReport even_odd_cancellation(const EntryDistribution& dist, std::size_t n,
                                         std::size_t reps, const StreamFamily& family,
                                         unsigned threads = 0);

// Reference values used by the harness: closed form when available, otherwise
// the quadrature oracle (continuous laws only).
double reference_lambda(const EntryDistribution& dist, LambdaSource source,
                        const QuadratureSpec& spec = {});
double reference_sigma2(const EntryDistribution& dist, const QuadratureSpec& spec = {});

}  // namespace singprod
