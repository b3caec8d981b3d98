#include <doctest.h>

#include <cmath>
#include <numbers>

#include "oracles.hpp"
#include "singprod/distributions.hpp"
#include "singprod/error.hpp"
#include "singprod/estimators.hpp"
#include "singprod/random.hpp"

using namespace singprod;

namespace {

constexpr double ln2 = std::numbers::ln2;
constexpr double pi = std::numbers::pi;
const double kR2 = -3.0 - 2.0 * std::numbers::sqrt2;
const double kR3 = -3.0 + 2.0 * std::numbers::sqrt2;

ErrorCode code_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected an error");
  return ErrorCode::ConfigError;
}

oracle::Moments brute(const Support& s) {
  std::vector<oracle::Atom> law;
  for (std::size_t i = 0; i < s.atoms.size(); ++i) law.push_back({s.atoms[i], s.weights[i]});
  return oracle::discrete_moments(law);
}

}  // namespace

TEST_CASE("closed forms: documented values") {
  CHECK(*lambda_closed_form(Binary{1, 2, 0.5}) ==
        doctest::Approx(ln2 + 0.25 * std::log(9.0 / 8.0)).epsilon(1e-15));
  CHECK(*lambda_closed_form(Binary{1, 2, 0.5}) == doctest::Approx(0.7225929395).epsilon(1e-10));
  CHECK(*sigma2_closed_form(Binary{1, 2, 0.5}) ==
        doctest::Approx(0.0625 * std::pow(std::log(9.0 / 8.0), 2)).epsilon(1e-14));
  CHECK(*lambda_closed_form(Uniform{0, 1}) == doctest::Approx(2 * ln2 - 0.5).epsilon(1e-15));
  CHECK(*lambda_closed_form(Uniform{-1, 1}) == doctest::Approx(ln2 - 0.5).epsilon(1e-15));
  CHECK(*lambda_closed_form(Exponential{5}) == 1.0);
  CHECK(*lambda_closed_form(Laplace{3}) == 0.5);
  CHECK(*sigma2_closed_form(Exponential{1}) == doctest::Approx((pi * pi - 9) / 3).epsilon(1e-15));
  CHECK(*sigma2_closed_form(Laplace{3}) == doctest::Approx((8 * pi * pi - 27) / 36).epsilon(1e-15));
  CHECK(*sigma2_closed_form(Uniform{-2, 2}) == doctest::Approx((5 * pi * pi + 15) / 36).epsilon(1e-15));
  CHECK(*sigma2_closed_form(Uniform{0, 1}) == doctest::Approx(0.19537155).epsilon(1e-7));
  // General uniform: lambda known, sigma^2 only through quadrature.
  CHECK(*lambda_closed_form(Uniform{-1, 2}) == doctest::Approx(0.4241962407).epsilon(1e-9));
  CHECK_FALSE(sigma2_closed_form(Uniform{-1, 2}).has_value());
  // Uniform general branch tends to the a = 0 endpoint.
  CHECK(*lambda_closed_form(Uniform{-1e-9, 1}) ==
        doctest::Approx(2 * ln2 - 0.5).epsilon(1e-6));
}

TEST_CASE("closed forms: degenerate p and point masses") {
  CHECK(*lambda_closed_form(Binary{1, -1, 1.0}) == ln2);
  CHECK(*sigma2_closed_form(Binary{1, -1, 1.0}) == 0.0);
  CHECK(*lambda_closed_form(Binary{3, 3, 0.4}) == doctest::Approx(ln2).epsilon(1e-15));
  CHECK(*sigma2_closed_form(DiscreteAtoms{{7}, {1}}) == 0.0);
  CHECK(code_of([] { lambda_closed_form(Binary{1, -1, 0.5}); }) == ErrorCode::CancellingAtoms);
}

TEST_CASE("binary closed forms match the triple-sum oracle") {
  RandomStream rng(1001, 0);
  for (int trial = 0; trial < 100; ++trial) {
    double a = std::exp(6 * rng.uniform() - 3) * (rng.uniform() < 0.5 ? -1 : 1);
    double b = std::exp(6 * rng.uniform() - 3) * (rng.uniform() < 0.5 ? -1 : 1);
    if (std::abs(a + b) < 1e-3 * std::abs(a)) b *= 1.5;
    const double p = 0.01 + 0.98 * rng.uniform();
    const Binary d{a, b, p};
    const auto o = brute(discrete_support(d));
    CAPTURE(a);
    CAPTURE(b);
    CAPTURE(p);
    CHECK(std::abs(*lambda_closed_form(d) - static_cast<double>(o.lambda)) <= 1e-12);
    CHECK(std::abs(*sigma2_closed_form(d) - static_cast<double>(o.sigma2)) <= 1e-12);
  }
}

TEST_CASE("atom closed forms match the triple-sum oracle") {
  RandomStream rng(1002, 0);
  for (int trial = 0; trial < 50; ++trial) {
    const std::size_t k = 1 + static_cast<std::size_t>(rng.uniform() * 5);
    DiscreteAtoms d;
    double total = 0;
    for (std::size_t i = 0; i < k; ++i) {
      d.atoms.push_back((rng.uniform() * 4 + 0.1) * (rng.uniform() < 0.5 ? -1 : 1) + 0.01 * i);
      d.weights.push_back(0.1 + rng.uniform());
      total += d.weights.back();
    }
    for (double& w : d.weights) w /= total;
    const auto o = brute(discrete_support(d));
    CHECK(std::abs(*lambda_closed_form(d) - static_cast<double>(o.lambda)) <= 1e-12);
    CHECK(std::abs(*sigma2_closed_form(d) - static_cast<double>(o.sigma2)) <= 1e-12);
  }
}

TEST_CASE("classify_degeneracy examples") {
  const auto one = classify_degeneracy(DiscreteAtoms{{7}, {1}});
  CHECK(one.form == DegeneracyForm::FormI);
  CHECK(one.atom == 7);
  const auto two = classify_degeneracy(Binary{1, kR2, 0.3});
  CHECK(two.form == DegeneracyForm::FormII);
  CHECK(two.atom == 1);
  CHECK(two.p == doctest::Approx(0.3));
  const auto three = classify_degeneracy(Binary{-2, -2 * kR3, 0.5});
  CHECK(three.form == DegeneracyForm::FormIII);
  CHECK(three.atom == -2);
  CHECK(classify_degeneracy(Binary{1, 2, 0.5}).form == DegeneracyForm::Nondegenerate);
  CHECK(classify_degeneracy(Uniform{0, 1}).form == DegeneracyForm::NotApplicable);
  CHECK(classify_degeneracy(Binary{5, 9, 1.0}).form == DegeneracyForm::FormI);
  // Tolerance: 1e-9 relative on the ratio.
  CHECK(classify_degeneracy(Binary{1, kR2 * (1 + 1e-11), 0.5}).form == DegeneracyForm::FormII);
  CHECK(classify_degeneracy(Binary{1, kR2 * (1 + 1e-6), 0.5}).form ==
        DegeneracyForm::Nondegenerate);
  CHECK(to_string(DegeneracyForm::FormIII) == "FormIII");
}

TEST_CASE("classify_degeneracy agrees with sigma2 over random discrete laws") {
  RandomStream rng(1003, 0);
  for (int trial = 0; trial < 400; ++trial) {
    const int kind = trial % 4;
    const double a = (0.1 + 5 * rng.uniform()) * (rng.uniform() < 0.5 ? -1 : 1);
    const double p = 0.05 + 0.9 * rng.uniform();
    DiscreteAtoms d;
    if (kind == 0) d = {{a}, {1.0}};
    else if (kind == 1) d = {{a, a * kR2}, {p, 1 - p}};
    else if (kind == 2) d = {{a, a * kR3}, {p, 1 - p}};
    else {
      const std::size_t k = 2 + static_cast<std::size_t>(rng.uniform() * 3);
      d.atoms.push_back(a);
      for (std::size_t i = 1; i < k; ++i) d.atoms.push_back(d.atoms.back() * (1.3 + rng.uniform()));
      double total = 0;
      for (std::size_t i = 0; i < k; ++i) {
        d.weights.push_back(0.1 + rng.uniform());
        total += d.weights[i];
      }
      for (double& w : d.weights) w /= total;
    }
    const auto v = classify_degeneracy(d);
    const double s2 = *sigma2_closed_form(d);
    if (kind == 3) {
      CHECK(v.form == DegeneracyForm::Nondegenerate);
      CHECK(s2 > 1e-12);
    } else {
      CHECK(v.form == static_cast<DegeneracyForm>(kind));
      CHECK(std::abs(s2) <= 1e-12);
      CHECK(std::abs(*lambda_closed_form(d) - ln2) <= 1e-12);
    }
  }
}

TEST_CASE("lambda_block_estimate") {
  SUBCASE("constant path is exact") {
    RandomStream rng(1, 0);
    const auto e = lambda_block_estimate(Binary{1, 1, 0.7}, 1000, rng);
    CHECK(e.lambda_hat == ln2);
    CHECK(e.stderr_lambda == 0.0);
    CHECK(e.n_samples == 999);
  }
  SUBCASE("exponential and symmetric uniform") {
    RandomStream rng(2, 0);
    const auto e = lambda_block_estimate(Exponential{1}, 1000000, rng);
    CHECK(std::abs(e.lambda_hat - 1.0) <= 4 * e.stderr_lambda);
    const auto u = lambda_block_estimate(Uniform{-1, 1}, 1000000, rng);
    CHECK(std::abs(u.lambda_hat - (ln2 - 0.5)) <= 4 * u.stderr_lambda);
  }
  SUBCASE("errors") {
    RandomStream rng(3, 0);
    CHECK(code_of([&] { lambda_block_estimate(Exponential{1}, 1, rng); }) == ErrorCode::ConfigError);
    CHECK(code_of([&] { lambda_block_estimate(Binary{1, -1, 0.5}, 10, rng); }) ==
          ErrorCode::CancellingAtoms);
  }
  SUBCASE("identical stream gives identical bits") {
    RandomStream r1(9, 4), r2(9, 4);
    CHECK(lambda_block_estimate(Laplace{1}, 10000, r1).lambda_hat ==
          lambda_block_estimate(Laplace{1}, 10000, r2).lambda_hat);
  }
}

TEST_CASE("lambda_direct_estimate") {
  for (std::size_t n : {10, 100, 1000}) {
    const auto e = lambda_direct_estimate(Binary{1, 1, 0.5}, n, 3, StreamFamily(1));
    CHECK(std::abs(e.lambda_hat - ln2) <= 2 * ln2 / static_cast<double>(n));
  }
  const auto l = lambda_direct_estimate(Laplace{1}, 10000, 1000, StreamFamily(2));
  CHECK(std::abs(l.lambda_hat - 0.5) <= 4 * l.stderr_lambda + 10.0 / 10000);

  const auto d = lambda_direct_estimate(Exponential{1}, 10000, 1000, StreamFamily(3));
  RandomStream rng(3, 999999);
  const auto b = lambda_block_estimate(Exponential{1}, 10000000, rng);
  CHECK(std::abs(d.lambda_hat - b.lambda_hat) <=
        4 * std::hypot(d.stderr_lambda, b.stderr_lambda) + 10.0 / 10000);

  // Thread count does not change the answer.
  const auto t1 = lambda_direct_estimate(Uniform{0, 1}, 500, 64, StreamFamily(4), 1);
  const auto t4 = lambda_direct_estimate(Uniform{0, 1}, 500, 64, StreamFamily(4), 4);
  CHECK(t1.lambda_hat == t4.lambda_hat);
  CHECK(code_of([] { lambda_direct_estimate(Uniform{0, 1}, 10, 0, StreamFamily(1)); }) ==
        ErrorCode::ConfigError);
}

TEST_CASE("sigma2_block_estimate") {
  SUBCASE("exponential") {
    RandomStream rng(5, 0);
    const auto e = sigma2_block_estimate(Exponential{1}, 2000000, rng);
    CHECK(e.batches >= 30);
    CHECK(std::abs(e.sigma2_hat - (pi * pi - 9) / 3) <= 4 * e.stderr_sigma2);
    CHECK(std::abs(e.lambda_hat - 1.0) <= 4 * e.stderr_lambda);
    CHECK(e.sigma2_hat == doctest::Approx(e.m2_hat + 2 * e.c1_hat - 3 * e.lambda_hat * e.lambda_hat)
                              .epsilon(1e-6));
  }
  SUBCASE("form III is degenerate") {
    RandomStream rng(6, 0);
    const auto e = sigma2_block_estimate(Binary{1, kR3, 0.5}, 1000000, rng);
    CHECK(std::abs(e.sigma2_hat) <= std::max(4 * e.stderr_sigma2, 1e-3));
  }
  SUBCASE("uniform a = 0") {
    RandomStream rng(7, 0);
    const auto e = sigma2_block_estimate(Uniform{0, 1}, 2000000, rng);
    CHECK(std::abs(e.sigma2_hat - *sigma2_closed_form(Uniform{0, 1})) <= 4 * e.stderr_sigma2);
  }
  SUBCASE("point mass") {
    RandomStream rng(8, 0);
    const auto e = sigma2_block_estimate(Binary{2, 2, 0.5}, 100, rng);
    CHECK(e.sigma2_hat == 0.0);
    CHECK(e.lambda_hat == ln2);
  }
  SUBCASE("short paths") {
    RandomStream rng(9, 0);
    CHECK(code_of([&] { sigma2_block_estimate(Exponential{1}, 2, rng); }) == ErrorCode::ConfigError);
    const auto e = sigma2_block_estimate(Exponential{1}, 3, rng);
    CHECK(e.batches == 1);
    CHECK(std::isinf(e.stderr_sigma2));
  }
}
