// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <span>

namespace singprod {

// Moment sums of a 1-dependent series v_1, v_2, ... accumulated about a fixed
// shift K (d_j = v_j - K). Working in shifted coordinates keeps the centered
// quantities C0 = Var(v) and C1 = Cov(v_j, v_{j+1}) free of the K^2
// cancellation, and makes constant series produce exact zeros.
class OneDependentMoments {
public:
  explicit OneDependentMoments(double shift = 0.0) : shift_(shift) {}

  void add(double v) noexcept {
    const double d = v - shift_;
    if (count_ == 0) {
      first_ = d;
    } else {
      sum_pair_ += last_ * d;
    }
    sum_ += d;
    sum_sq_ += d * d;
    last_ = d;
    ++count_;
  }

  // Concatenate a later contiguous segment of the same series. Associative;
  // the boundary pair (last of *this, first of later) is included.
  void append(const OneDependentMoments& later) noexcept;

  std::size_t count() const noexcept { return count_; }
  std::size_t pairs() const noexcept { return count_ > 0 ? count_ - 1 : 0; }
  double shift() const noexcept { return shift_; }

  double mean() const noexcept;
  // E[v^2] and E[v_j v_{j+1}] plug-ins.
  double second_moment() const noexcept;
  double cross_moment() const noexcept;
  // Centered plug-ins.
  double c0() const noexcept;
  double c1() const noexcept;
  // C0 + 2 C1, the long-run variance of a 1-dependent sum.
  double long_run_variance() const noexcept { return c0() + 2.0 * c1(); }

private:
  double shift_;
  std::size_t count_ = 0;
  double sum_ = 0.0;
  double sum_sq_ = 0.0;
  double sum_pair_ = 0.0;
  double first_ = 0.0;
  double last_ = 0.0;
};

// Mean and unbiased variance of a sample, two-pass.
struct SampleSummary {
  double mean = 0.0;
  double variance = 0.0;
  std::size_t count = 0;
};
SampleSummary summarize(std::span<const double> xs) noexcept;

// Pearson correlation; 0 when either side has zero variance.
double correlation(std::span<const double> xs, std::span<const double> ys) noexcept;

}  // namespace singprod
