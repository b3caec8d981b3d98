// SPDX-License-Identifier: Apache-2.0
#include "singprod/clt.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "singprod/error.hpp"
#include "singprod/estimators.hpp"
#include "singprod/matrix.hpp"
#include "singprod/parallel.hpp"
#include "singprod/statistics.hpp"

namespace singprod {

namespace {

// sigma2_ref below this is treated as a degenerate limit (no KS test).
constexpr double kZeroVarianceFloor = 1e-12;

double normal_cdf(double x, double sd) {
  return 0.5 * std::erfc(-x / (sd * std::numbers::sqrt2));
}

[[noreturn]] void degenerate_sample() {
  throw Error(ErrorCode::DegenerateSample, "path redraw cap exhausted");
}

}  // namespace

KsResult ks_against_normal(std::span<const double> samples, double sigma2) {
  if (!(sigma2 > 0.0)) {
    throw Error(ErrorCode::ZeroVariance, "ks_against_normal needs sigma2 > 0");
  }
  if (samples.empty()) {
    throw Error(ErrorCode::ConfigError, "ks_against_normal needs at least one sample");
  }
  std::vector<double> sorted(samples.begin(), samples.end());
  std::sort(sorted.begin(), sorted.end());
  const double sd = std::sqrt(sigma2);
  const double n = static_cast<double>(sorted.size());
  double d = 0.0;
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    const double cdf = normal_cdf(sorted[i], sd);
    const double i_d = static_cast<double>(i);
    d = std::max({d, (i_d + 1.0) / n - cdf, cdf - i_d / n});
  }
  KsResult out;
  out.distance = d;
  out.critical_value = kKsCritical1Pct / std::sqrt(n);
  out.reject_at_1pct = d > out.critical_value;
  return out;
}

double reference_lambda(const EntryDistribution& dist, LambdaSource source,
                        const QuadratureSpec& spec) {
  if (source == LambdaSource::ClosedForm) {
    const auto closed = lambda_closed_form(dist);
    if (!closed) throw Error(ErrorCode::MissingLambda, "no closed-form lambda");
    return *closed;
  }
  if (is_discrete(dist)) return *lambda_closed_form(dist);
  return lambda_quadrature(dist, spec).value;
}

double reference_sigma2(const EntryDistribution& dist, const QuadratureSpec& spec) {
  if (const auto closed = sigma2_closed_form(dist)) return *closed;
  return sigma2_quadrature(dist, spec).value;
}

CltReport simulate_normalized(const EntryDistribution& dist, std::size_t n,
                              std::size_t reps, LambdaSource lambda_source,
                              const StreamFamily& family, unsigned threads,
                              const QuadratureSpec& oracle_spec) {
  if (n == 0 || reps == 0) {
    throw Error(ErrorCode::ConfigError, "simulate_normalized needs n >= 1 and reps >= 1");
  }
  validate(dist);
  CltReport report;
  report.n = n;
  report.reps = reps;
  report.lambda_used = reference_lambda(dist, lambda_source, oracle_spec);
  report.sigma2_ref = reference_sigma2(dist, oracle_spec);
  report.samples.resize(reps);

  const double dn = static_cast<double>(n);
  const double root_n = std::sqrt(dn);
  parallel_for(reps, threads, [&](std::size_t r) {
    EntrySampler sampler(dist);
    RandomStream rng = family.stream(r);
    for (int attempt = 0; attempt <= kMaxPathRedraws; ++attempt) {
      RenormalizedProduct prod;
      double prev = 0.0;
      bool vanished = false;
      for (std::size_t j = 0; j < n && !vanished; ++j) {
        const double x = sampler.draw(rng);
        vanished = j > 0 && prev + x == 0.0;
        prod.push(y_matrix(x));
        prev = x;
      }
      if (!vanished) {
        report.samples[r] = (prod.log_norm() - dn * report.lambda_used) / root_n;
        return;
      }
    }
    degenerate_sample();
  });

  const auto summary = summarize(report.samples);
  report.empirical_mean = summary.mean;
  report.empirical_var = summary.variance;
  if (report.sigma2_ref > kZeroVarianceFloor) {
    report.ks = ks_against_normal(report.samples, report.sigma2_ref);
  }
  return report;
}

CancellationReport even_odd_cancellation(const EntryDistribution& dist, std::size_t n,
                                         std::size_t reps, const StreamFamily& family,
                                         unsigned threads) {
  if (n < 2 || n % 2 != 0) {
    throw Error(ErrorCode::ConfigError, "even_odd_cancellation needs an even n >= 2");
  }
  if (reps < 2) throw Error(ErrorCode::ConfigError, "even_odd_cancellation needs reps >= 2");
  validate(dist);
  CancellationReport report;
  report.n = n;
  report.reps = reps;
  report.lambda_used = reference_lambda(dist, LambdaSource::ClosedForm);
  report.s_total.resize(reps);
  report.s_even.resize(reps);
  report.s_odd.resize(reps);

  parallel_for(reps, threads, [&](std::size_t r) {
    EntrySampler sampler(dist);
    RandomStream rng = family.stream(r);
    for (int attempt = 0; attempt <= kMaxPathRedraws; ++attempt) {
      double even = 0.0;
      double odd = 0.0;
      double prev = sampler.draw(rng);
      bool vanished = false;
      for (std::size_t j = 1; j <= n; ++j) {
        const double next = sampler.draw(rng);
        if (prev + next == 0.0) {
          vanished = true;
          break;
        }
        const double a = std::log(std::abs((prev + next) / prev)) - report.lambda_used;
        (j % 2 == 0 ? even : odd) += a;
        prev = next;
      }
      if (!vanished) {
        report.s_even[r] = even;
        report.s_odd[r] = odd;
        report.s_total[r] = even + odd;
        return;
      }
    }
    degenerate_sample();
  });

  const double half = static_cast<double>(n / 2);
  report.var_total_over_n = summarize(report.s_total).variance / static_cast<double>(n);
  report.var_even_over_half = summarize(report.s_even).variance / half;
  report.var_odd_over_half = summarize(report.s_odd).variance / half;
  report.correlation_even_odd = correlation(report.s_even, report.s_odd);
  return report;
}

}  // namespace singprod
