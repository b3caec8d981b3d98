// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cmath>
#include <cstddef>
#include <limits>
#include <span>

namespace singprod {

struct Matrix2 {
  double m11 = 0.0;
  double m12 = 0.0;
  double m21 = 0.0;
  double m22 = 0.0;

  friend bool operator==(const Matrix2&, const Matrix2&) = default;
};

inline Matrix2 operator*(const Matrix2& l, const Matrix2& r) noexcept {
  return {l.m11 * r.m11 + l.m12 * r.m21, l.m11 * r.m12 + l.m12 * r.m22,
          l.m21 * r.m11 + l.m22 * r.m21, l.m21 * r.m12 + l.m22 * r.m22};
}

inline Matrix2 operator+(const Matrix2& l, const Matrix2& r) noexcept {
  return {l.m11 + r.m11, l.m12 + r.m12, l.m21 + r.m21, l.m22 + r.m22};
}

inline Matrix2 operator*(double s, const Matrix2& m) noexcept {
  return {s * m.m11, s * m.m12, s * m.m21, s * m.m22};
}

// Hilbert-Schmidt (Frobenius) norm, overflow-safe.
inline double hs_norm(const Matrix2& m) noexcept {
  return std::hypot(std::hypot(m.m11, m.m12), std::hypot(m.m21, m.m22));
}

// a*d - b*c with Kahan's fma trick; accurate to a few ulps of the result.
double determinant(const Matrix2& m) noexcept;

// [[1, x], [1/x, 1]]. Throws Error{ZeroEntry} for x == 0.
Matrix2 y_matrix(double x);

inline constexpr double kMinusInfinity = -std::numeric_limits<double>::infinity();

// log ||Y(x_n) ... Y(x_1)|| by repeated multiplication, rescaling by the HS
// norm after every factor.
double log_norm_direct(std::span<const double> xs);

// Same quantity through the product form
//   sum_{j<n} log|1 + x_{j+1}/x_j| + log sqrt((1 + x_1^2)(1 + 1/x_n^2)),
// or kMinusInfinity when some factor 1 + x_{j+1}/x_j vanishes.
double log_norm_closed(std::span<const double> xs);

// Streaming form of log_norm_closed.
class ProductAccumulator {
public:
  void push(double x) noexcept {
    if (n_ == 0) {
      x_first_ = x;
    } else {
      const double ratio_term = (x_last_ + x) / x_last_;
      if (ratio_term == 0.0) {
        sign_zero_ = true;
      } else {
        log_a_ += std::log(std::abs(ratio_term));
      }
    }
    x_last_ = x;
    ++n_;
  }

  std::size_t count() const noexcept { return n_; }
  double log_a() const noexcept { return log_a_; }
  double x_first() const noexcept { return x_first_; }
  double x_last() const noexcept { return x_last_; }
  bool sign_zero() const noexcept { return sign_zero_; }

  // log sqrt((1 + x_1^2)(1 + 1/x_n^2)), the HS norm of the residual factor
  // [[1, x_1], [1/x_n, x_1/x_n]].
  double log_residual() const noexcept {
    return std::log(std::hypot(1.0, x_first_)) +
           std::log(std::hypot(1.0, 1.0 / x_last_));
  }

  double log_norm() const noexcept {
    if (sign_zero_) return kMinusInfinity;
    return log_a_ + log_residual();
  }

private:
  double log_a_ = 0.0;
  double x_first_ = 1.0;
  double x_last_ = 1.0;
  std::size_t n_ = 0;
  bool sign_zero_ = false;
};

// Renormalized left-multiplication S <- M S, tracking log of the discarded
// scale. Logs of rescale factors are batched to avoid one log per step.
class RenormalizedProduct {
public:
  void push(const Matrix2& m) noexcept;

  // log ||current product||.
  double log_norm() const noexcept;
  std::size_t count() const noexcept { return n_; }

private:
  Matrix2 state_{1.0, 0.0, 0.0, 1.0};
  double log_scale_ = 0.0;
  double pending_scale_ = 1.0;
  std::size_t n_ = 0;
};

}  // namespace singprod
