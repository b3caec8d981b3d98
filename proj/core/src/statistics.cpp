// SPDX-License-Identifier: Apache-2.0
#include "singprod/statistics.hpp"

#include <cassert>
#include <cmath>

namespace singprod {

void OneDependentMoments::append(const OneDependentMoments& later) noexcept {
  assert(later.shift_ == shift_);
  if (later.count_ == 0) return;
  if (count_ == 0) {
    *this = later;
    return;
  }
  sum_pair_ += last_ * later.first_ + later.sum_pair_;
  sum_ += later.sum_;
  sum_sq_ += later.sum_sq_;
  last_ = later.last_;
  count_ += later.count_;
}

double OneDependentMoments::mean() const noexcept {
  if (count_ == 0) return shift_;
  return shift_ + sum_ / static_cast<double>(count_);
}

double OneDependentMoments::second_moment() const noexcept {
  if (count_ == 0) return shift_ * shift_;
  const double m = static_cast<double>(count_);
  return shift_ * shift_ + 2.0 * shift_ * sum_ / m + sum_sq_ / m;
}

double OneDependentMoments::cross_moment() const noexcept {
  if (count_ < 2) return mean() * mean();
  const double pairs = static_cast<double>(count_ - 1);
  return shift_ * shift_ + shift_ * (2.0 * sum_ - first_ - last_) / pairs +
         sum_pair_ / pairs;
}

double OneDependentMoments::c0() const noexcept {
  if (count_ == 0) return 0.0;
  const double m = static_cast<double>(count_);
  const double mean_d = sum_ / m;
  return sum_sq_ / m - mean_d * mean_d;
}

double OneDependentMoments::c1() const noexcept {
  if (count_ < 2) return 0.0;
  const double m = static_cast<double>(count_);
  const double pairs = m - 1.0;
  const double mean_d = sum_ / m;
  return shift_ * ((2.0 * sum_ - first_ - last_) / pairs - 2.0 * mean_d) +
         sum_pair_ / pairs - mean_d * mean_d;
}

SampleSummary summarize(std::span<const double> xs) noexcept {
  SampleSummary out;
  out.count = xs.size();
  if (xs.empty()) return out;
  double sum = 0.0;
  for (double x : xs) sum += x;
  out.mean = sum / static_cast<double>(xs.size());
  if (xs.size() < 2) return out;
  double ss = 0.0;
  double comp = 0.0;
  for (double x : xs) {
    const double d = x - out.mean;
    ss += d * d;
    comp += d;
  }
  const double n = static_cast<double>(xs.size());
  out.variance = (ss - comp * comp / n) / (n - 1.0);
  return out;
}

double correlation(std::span<const double> xs, std::span<const double> ys) noexcept {
  const std::size_t n = xs.size() < ys.size() ? xs.size() : ys.size();
  if (n < 2) return 0.0;
  double mx = 0.0;
  double my = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    mx += xs[i];
    my += ys[i];
  }
  mx /= static_cast<double>(n);
  my /= static_cast<double>(n);
  double sxx = 0.0;
  double syy = 0.0;
  double sxy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double dx = xs[i] - mx;
    const double dy = ys[i] - my;
    sxx += dx * dx;
    syy += dy * dy;
    sxy += dx * dy;
  }
  if (sxx <= 0.0 || syy <= 0.0) return 0.0;
  return sxy / std::sqrt(sxx * syy);
}

}  // namespace singprod
