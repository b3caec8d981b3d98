// SPDX-License-Identifier: Apache-2.0
#include "singprod/hill.hpp"

#include <cmath>
#include <limits>
#include <optional>
#include <vector>

#include "singprod/error.hpp"
#include "singprod/estimators.hpp"
#include "singprod/parallel.hpp"
#include "singprod/statistics.hpp"

namespace singprod {

namespace {

void check_params(const CycleParams& c) {
  if (c.h == 0.0 || c.g == 0.0 || !std::isfinite(c.h) || !std::isfinite(c.g)) {
    throw Error(ErrorCode::ZeroParam, "cycle parameters h and g must be finite and nonzero");
  }
}

enum class Role { H, G };

void check_law(const ScalarLaw& law, Role role) {
  const char* name = role == Role::H ? "h" : "g";
  if (const auto* c = std::get_if<ConstantValue>(&law)) {
    if (c->value == 0.0 || !std::isfinite(c->value)) {
      throw Error(ErrorCode::ZeroParam, std::string(name) + " constant must be nonzero");
    }
  } else if (const auto* u = std::get_if<UniformInterval>(&law)) {
    if (!(u->lo < u->hi) || !(u->lo > 0.0 || u->hi < 0.0)) {
      throw Error(ErrorCode::ZeroParam,
                  std::string(name) + " interval must be nonempty and exclude 0");
    }
  } else {
    const auto& dist = std::get<EntryDistribution>(law);
    validate(dist);
    // Continuous entry laws put mass arbitrarily close to 0.
    if (role == Role::H && is_continuous(dist)) {
      throw Error(ErrorCode::ZeroParam, "h law must be bounded away from 0");
    }
  }
}

// Per-replication sampler; entry laws keep one EntrySampler for the path.
class ScalarSampler {
public:
  explicit ScalarSampler(const ScalarLaw& law) : law_(law) {
    if (const auto* d = std::get_if<EntryDistribution>(&law)) entry_.emplace(*d);
  }

  double draw(RandomStream& rng) {
    if (entry_) return entry_->draw(rng);
    return draw_scalar(law_, rng);
  }

private:
  const ScalarLaw& law_;
  std::optional<EntrySampler> entry_;
};

}  // namespace

Matrix2 transfer_matrix(const CycleParams& c) {
  check_params(c);
  return c.h * y_matrix(c.x()) + Matrix2{0.0, -1.0 / c.g, 0.0, 0.0};
}

Matrix2 transfer_matrix_expanded(const CycleParams& c) {
  check_params(c);
  return {c.h, (c.h * c.h - 1.0) / c.g, c.g, c.h};
}

double residual_ratio(const CycleParams& c) {
  check_params(c);
  return (1.0 / std::abs(c.g)) / (std::abs(c.g / c.h) + std::abs(c.h / c.g));
}

double draw_scalar(const ScalarLaw& law, RandomStream& rng) {
  if (const auto* c = std::get_if<ConstantValue>(&law)) return c->value;
  if (const auto* u = std::get_if<UniformInterval>(&law)) {
    return u->lo + (u->hi - u->lo) * rng.uniform();
  }
  // Entry laws go through the sampler for the zero-redraw rule.
  EntrySampler sampler(std::get<EntryDistribution>(law));
  return sampler.draw(rng);
}

GrowthCheck unstable_growth_check(const ScalarLaw& h_law, const ScalarLaw& g_law,
                                  std::size_t n, std::size_t reps,
                                  const StreamFamily& family, unsigned threads) {
  check_law(h_law, Role::H);
  check_law(g_law, Role::G);
  if (n < 2 || reps == 0) {
    throw Error(ErrorCode::ConfigError, "unstable_growth_check needs n >= 2 and reps >= 1");
  }

  std::vector<double> exact(reps);
  std::vector<double> approx(reps);
  std::vector<double> log_h(reps);
  std::vector<double> lambda(reps);
  parallel_for(reps, threads, [&](std::size_t r) {
    RandomStream rng = family.stream(r);
    ScalarSampler h_sampler(h_law);
    ScalarSampler g_sampler(g_law);
    for (int attempt = 0; attempt <= kMaxPathRedraws; ++attempt) {
      RenormalizedProduct full;
      ProductAccumulator singular;
      double sum_log_h = 0.0;
      for (std::size_t j = 0; j < n; ++j) {
        const double h = h_sampler.draw(rng);
        const CycleParams c{h, g_sampler.draw(rng)};
        full.push(transfer_matrix(c));
        singular.push(c.x());
        sum_log_h += std::log(std::abs(c.h));
      }
      if (singular.sign_zero()) continue;
      const double dn = static_cast<double>(n);
      exact[r] = full.log_norm() / dn;
      approx[r] = (sum_log_h + singular.log_norm()) / dn;
      log_h[r] = sum_log_h / dn;
      lambda[r] = singular.log_a() / (dn - 1.0);
      return;
    }
    throw Error(ErrorCode::DegenerateSample, "path redraw cap exhausted in unstable_growth_check");
  });

  GrowthCheck out;
  out.n = n;
  out.reps = reps;
  const auto ex = summarize(exact);
  out.rate_exact = ex.mean;
  out.stderr_exact = reps < 2 ? std::numeric_limits<double>::infinity()
                              : std::sqrt(ex.variance / static_cast<double>(reps));
  out.rate_approx = summarize(approx).mean;
  out.mean_log_h = summarize(log_h).mean;
  out.lambda_hat = summarize(lambda).mean;
  out.gap = std::abs(out.rate_exact - out.rate_approx);
  return out;
}

}  // namespace singprod
