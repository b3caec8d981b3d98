// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <variant>

#include "singprod/distributions.hpp"
#include "singprod/matrix.hpp"
#include "singprod/random.hpp"

namespace singprod {

// One period of Hill's equation, summarized by the principal solution value
// h and derivative g at the end of the period.
struct CycleParams {
  double h = 1.0;
  double g = 1.0;

  double x() const noexcept { return h / g; }
};

// h * Y(h/g) + [[0, -1/g], [0, 0]]. Throws Error{ZeroParam} if h or g is 0.
Matrix2 transfer_matrix(const CycleParams& c);

// The same matrix written out as [[h, (h^2 - 1)/g], [g, h]].
Matrix2 transfer_matrix_expanded(const CycleParams& c);

// ||[[0, -1/g], [0, 0]]|| / ||Y(h/g)|| = (1/|g|) / (|g/h| + |h/g|).
double residual_ratio(const CycleParams& c);

// Law of a scalar cycle parameter.
struct ConstantValue {
  double value = 1.0;
};
struct UniformInterval {
  double lo = 1.0;
  double hi = 2.0;
};
using ScalarLaw = std::variant<ConstantValue, UniformInterval, EntryDistribution>;

double draw_scalar(const ScalarLaw& law, RandomStream& rng);

struct GrowthCheck {
  double rate_exact = 0.0;   // mean of (1/n) log ||M_n ... M_1||
  double rate_approx = 0.0;  // mean of (1/n) (sum log|h_j| + log ||Y_n ... Y_1||)
  double gap = 0.0;          // |rate_exact - rate_approx|
  double mean_log_h = 0.0;   // mean of (1/n) sum log|h_j|
  double lambda_hat = 0.0;   // block estimate of lambda for x = h/g
  double stderr_exact = 0.0;
  std::size_t n = 0;
  std::size_t reps = 0;
};

// Compares the exact transfer-matrix growth rate with the rate of the
// scaled singular products h_j Y(h_j/g_j), path by path. The approximate
// product is evaluated through the product form, including its boundary
// factor, so the comparison has no O(log|h| / n) mismatch at finite n.
// h must be bounded away from 0 and g must never be 0 (Error{ZeroParam}).
GrowthCheck unstable_growth_check(const ScalarLaw& h_law, const ScalarLaw& g_law,
                                  std::size_t n, std::size_t reps,
                                  const StreamFamily& family, unsigned threads = 0);

}  // namespace singprod
