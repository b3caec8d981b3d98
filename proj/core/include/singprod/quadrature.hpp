// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <functional>
#include <vector>

#include "singprod/distributions.hpp"

namespace singprod {

struct QuadratureSpec {
  double abs_tol = 1e-10;
  double rel_tol = 1e-10;
  std::size_t max_subdivisions = 4000;
};

struct QuadratureResult {
  double value = 0.0;
  double error_bound = 0.0;
  std::size_t evaluations = 0;
};

// Integrand sample: value plus an absolute error already carried by the value
// (e.g. from an inner integral). Carried errors are integrated alongside the
// value and added to the reported bound.
struct IntegrandValue {
  double value = 0.0;
  double carried_error = 0.0;
};

using Integrand = std::function<IntegrandValue(double)>;

// Adaptive Gauss-Kronrod (7/15) over the union of [points[i], points[i+1]].
// Endpoints may be +-infinity. Each piece is mapped to [0, 1] through a quintic
// grading whose slope vanishes to second order at both ends, so integrable log
// singularities at piece boundaries cost only a few bisections; callers put
// every singular point into `points`. Throws Error{Nonconvergence} when
// max_subdivisions is exhausted.
QuadratureResult integrate_pieces(const Integrand& f, const std::vector<double>& points,
                                  double abs_tol, double rel_tol,
                                  std::size_t max_subdivisions);

// Density of a continuous entry law together with the points where it is
// not smooth (support ends, 0, kinks), sorted ascending.
class ContinuousLaw {
public:
  explicit ContinuousLaw(const EntryDistribution& dist);

  double density(double x) const;
  const std::vector<double>& breakpoints() const noexcept { return points_; }
  double support_lo() const noexcept { return points_.front(); }
  double support_hi() const noexcept { return points_.back(); }

  // Law of -x.
  ContinuousLaw reflected() const;

private:
  ContinuousLaw() = default;

  enum class Kind { Uniform, Exponential, Laplace } kind_ = Kind::Uniform;
  double param_ = 1.0;  // uniform density height, exponential rate, laplace scale
  int sign_ = 1;        // x -> sign * x applied to the base law
  std::vector<double> points_;
};

// The oracles below snap both tolerances down to the nearest power of ten, so
// tightening a request either leaves the result unchanged or refines it.

// lambda = E log|1 + x2/x1| as an iterated integral.
QuadratureResult lambda_quadrature(const ContinuousLaw& law, const QuadratureSpec& spec = {});
QuadratureResult lambda_quadrature(const EntryDistribution& dist,
                                   const QuadratureSpec& spec = {});

// sigma^2 = M2 + 2 C1' - 3 lambda^2 with
//   M2  = E[H(x)],      H(x) = E_y (log|1 + y/x|)^2
//   C1' = E[K(y) G(y)], K(y) = E_x log|1 + y/x|,  G(y) = E_z log|1 + z/y|
// which reduces the triple integral to nested one-dimensional ones.
QuadratureResult sigma2_quadrature(const ContinuousLaw& law, const QuadratureSpec& spec = {});
QuadratureResult sigma2_quadrature(const EntryDistribution& dist,
                                   const QuadratureSpec& spec = {});

}  // namespace singprod
