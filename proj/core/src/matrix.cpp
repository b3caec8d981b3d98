// SPDX-License-Identifier: Apache-2.0
#include "singprod/matrix.hpp"

#include "singprod/error.hpp"

namespace singprod {

namespace {

// Flush the batched scale before it can leave the normal range.
constexpr double kFlushHigh = 0x1.0p+500;
constexpr double kFlushLow = 0x1.0p-500;

}  // namespace

double determinant(const Matrix2& m) noexcept {
  const double bc = m.m12 * m.m21;
  const double err = std::fma(-m.m12, m.m21, bc);
  const double diff = std::fma(m.m11, m.m22, -bc);
  return diff + err;
}

Matrix2 y_matrix(double x) {
  if (x == 0.0) throw Error(ErrorCode::ZeroEntry, "y_matrix: x must be nonzero");
  return {1.0, x, 1.0 / x, 1.0};
}

void RenormalizedProduct::push(const Matrix2& m) noexcept {
  state_ = m * state_;
  const double norm = hs_norm(state_);
  if (norm == 0.0) {
    log_scale_ = kMinusInfinity;
    ++n_;
    return;
  }
  const double inv = 1.0 / norm;
  state_ = inv * state_;
  pending_scale_ *= norm;
  if (pending_scale_ > kFlushHigh || pending_scale_ < kFlushLow) {
    log_scale_ += std::log(pending_scale_);
    pending_scale_ = 1.0;
  }
  ++n_;
}

double RenormalizedProduct::log_norm() const noexcept {
  return log_scale_ + std::log(pending_scale_) + std::log(hs_norm(state_));
}

double log_norm_direct(std::span<const double> xs) {
  RenormalizedProduct prod;
  for (double x : xs) prod.push(y_matrix(x));
  return prod.log_norm();
}

double log_norm_closed(std::span<const double> xs) {
  ProductAccumulator acc;
  for (double x : xs) acc.push(x);
  return acc.log_norm();
}

}  // namespace singprod
