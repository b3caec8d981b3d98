// SPDX-License-Identifier: Apache-2.0
// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any FAIL.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <string>
#include <vector>

#include "oracles.hpp"
#include "singprod/clt.hpp"
#include "singprod/distributions.hpp"
#include "singprod/error.hpp"
#include "singprod/estimators.hpp"
#include "singprod/hill.hpp"
#include "singprod/matrix.hpp"
#include "singprod/quadrature.hpp"
#include "singprod/random.hpp"

using namespace singprod;

namespace {

constexpr double ln2 = std::numbers::ln2;
constexpr double pi = std::numbers::pi;
const double kR2 = -3.0 - 2.0 * std::numbers::sqrt2;
const double kR3 = -3.0 + 2.0 * std::numbers::sqrt2;

struct Outcome {
  bool pass = true;
  std::string detail;
};

class Notes {
public:
  void check(bool ok, const std::string& what) {
    if (!ok) {
      pass_ = false;
      failures_ += (failures_.empty() ? "" : "; ") + what;
    }
  }
  void note(const char* fmt, auto... args) {
    char buf[256];
    std::snprintf(buf, sizeof buf, fmt, args...);
    detail_ += (detail_.empty() ? "" : ", ") + std::string(buf);
  }
  Outcome done() const {
    return {pass_, failures_.empty() ? detail_ : detail_ + " | failed: " + failures_};
  }

private:
  bool pass_ = true;
  std::string detail_;
  std::string failures_;
};

std::vector<oracle::Atom> atoms_of(const EntryDistribution& d) {
  const auto s = discrete_support(d);
  std::vector<oracle::Atom> law;
  for (std::size_t i = 0; i < s.atoms.size(); ++i) law.push_back({s.atoms[i], s.weights[i]});
  return law;
}

// Closed form, Monte Carlo at n = 1e7, and the quadrature oracle must agree.
void three_way(Notes& notes, const char* name, const EntryDistribution& d,
               double lambda_ref, double sigma2_ref, std::uint64_t stream) {
  const auto t0 = std::chrono::steady_clock::now();
  const double l = *lambda_closed_form(d);
  const double s = *sigma2_closed_form(d);
  notes.check(std::abs(l - lambda_ref) <= 1e-12, std::string(name) + " lambda closed form");
  notes.check(std::abs(s - sigma2_ref) <= 1e-12, std::string(name) + " sigma2 closed form");

  RandomStream rng(20240601, stream);
  const auto mc = sigma2_block_estimate(d, 10'000'000, rng);
  const double zl = std::abs(mc.lambda_hat - l) / mc.stderr_lambda;
  const double zs = std::abs(mc.sigma2_hat - s) / mc.stderr_sigma2;
  notes.check(zl <= 4.0, std::string(name) + " MC lambda beyond 4 stderr");
  notes.check(zs <= 4.0, std::string(name) + " MC sigma2 beyond 4 stderr");

  const auto ql = lambda_quadrature(d);
  const auto qs = sigma2_quadrature(d);
  const double el = std::abs(ql.value - l);
  const double es = std::abs(qs.value - s);
  notes.check(el <= 1e-6 && es <= 1e-6, std::string(name) + " quadrature off by > 1e-6");

  const double secs =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  notes.check(secs <= 60.0, std::string(name) + " slower than 60 s");
  notes.note("%s: z_lambda %.2f z_sigma2 %.2f quad err %.1e/%.1e %.1fs", name, zl, zs, el, es,
             secs);
}

Outcome criterion_exponential() {
  Notes n;
  three_way(n, "exponential(1)", Exponential{1}, 1.0, (pi * pi - 9) / 3, 1);
  return n.done();
}

Outcome criterion_laplace() {
  Notes n;
  three_way(n, "laplace(1)", Laplace{1}, 0.5, (8 * pi * pi - 27) / 36, 2);
  return n.done();
}

Outcome criterion_uniform() {
  Notes n;
  // sigma2 for a = 0 is frozen from an independent 20-digit nested integral.
  three_way(n, "uniform[0,1]", Uniform{0, 1}, 2 * ln2 - 0.5, 0.19537155369380472, 3);
  three_way(n, "uniform[-1,1]", Uniform{-1, 1}, ln2 - 0.5, (5 * pi * pi + 15) / 36, 4);
  return n.done();
}

Outcome criterion_binary() {
  Notes n;
  RandomStream rng(4004, 0);
  double worst = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    const double a = std::exp(6 * rng.uniform() - 3) * (rng.uniform() < 0.5 ? -1 : 1);
    double b = std::exp(6 * rng.uniform() - 3) * (rng.uniform() < 0.5 ? -1 : 1);
    if (std::abs(a + b) < 1e-3 * std::abs(a)) b *= 1.5;
    const double p = rng.uniform();
    const Binary d{a, b, p};
    const auto o = oracle::discrete_moments(atoms_of(d));
    worst = std::max({worst, std::abs(*lambda_closed_form(d) - static_cast<double>(o.lambda)),
                      std::abs(*sigma2_closed_form(d) - static_cast<double>(o.sigma2))});
  }
  n.check(worst <= 1e-12, "triple sum disagrees");
  n.note("triple-sum max diff %.1e over 100 laws", worst);

  const Binary d{1, 2, 0.5};
  RandomStream mc_rng(4004, 1);
  const auto mc = sigma2_block_estimate(d, 10'000'000, mc_rng);
  const double zl = std::abs(mc.lambda_hat - *lambda_closed_form(d)) / mc.stderr_lambda;
  const double zs = std::abs(mc.sigma2_hat - *sigma2_closed_form(d)) / mc.stderr_sigma2;
  n.check(zl <= 4.0 && zs <= 4.0, "binary(1,2,0.5) MC beyond 4 stderr");
  n.note("binary(1,2,0.5) z_lambda %.2f z_sigma2 %.2f", zl, zs);
  return n.done();
}

Outcome criterion_degeneracy() {
  Notes n;
  RandomStream rng(5005, 0);
  int misclassified = 0;
  double worst_s2 = 0.0;
  double worst_l = 0.0;
  double least_nondeg = INFINITY;
  for (int trial = 0; trial < 1000; ++trial) {
    const int kind = trial % 4;
    const double a = (0.1 + 5 * rng.uniform()) * (rng.uniform() < 0.5 ? -1 : 1);
    const double p = 0.05 + 0.9 * rng.uniform();
    DiscreteAtoms d;
    if (kind == 0) d = {{a}, {1.0}};
    else if (kind == 1) d = {{a, a * kR2}, {p, 1 - p}};
    else if (kind == 2) d = {{a, a * kR3}, {p, 1 - p}};
    else {
      const std::size_t k = 2 + static_cast<std::size_t>(rng.uniform() * 4);
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
      misclassified += v.form != DegeneracyForm::Nondegenerate;
      least_nondeg = std::min(least_nondeg, s2);
    } else {
      misclassified += v.form != static_cast<DegeneracyForm>(kind);
      worst_s2 = std::max(worst_s2, std::abs(s2));
      worst_l = std::max(worst_l, std::abs(*lambda_closed_form(d) - ln2));
    }
  }
  n.check(misclassified == 0, "classify_degeneracy wrong");
  n.check(worst_s2 <= 1e-12, "degenerate sigma2 not zero");
  n.check(least_nondeg > 1e-12, "nondegenerate law with zero sigma2");
  n.check(worst_l <= 1e-12, "degenerate lambda differs from log 2");
  n.note("misclassified %d/1000, max |sigma2| %.1e, max |lambda-log2| %.1e", misclassified,
         worst_s2, worst_l);

  const auto clt = simulate_normalized(DiscreteAtoms{{1.0, kR3}, {0.5, 0.5}}, 10'000, 2000,
                                       LambdaSource::ClosedForm, StreamFamily(5005));
  n.check(clt.empirical_var <= 1e-2, "FormIII CLT variance above 1e-2");
  n.note("FormIII CLT var %.2e", clt.empirical_var);
  return n.done();
}

Outcome criterion_product_form() {
  Notes n;
  const std::vector<EntryDistribution> laws = {
      Binary{1, 2, 0.5},     Uniform{0, 1},        Uniform{-1, 1},
      Uniform{-1, 2},        Exponential{1},       Exponential{2, -1},
      Laplace{1},            DiscreteAtoms{{1.0, kR2}, {0.3, 0.7}},
      DiscreteAtoms{{0.5, 2.0, -4.0}, {0.2, 0.5, 0.3}}};
  const StreamFamily family(6006);
  RandomStream lengths(6006, 999);
  double worst = 0.0;
  int vanishing = 0;
  int mismatched_inf = 0;
  for (std::size_t i = 0; i < 1000; ++i) {
    const auto& law = laws[i % laws.size()];
    const std::size_t len = 1 + static_cast<std::size_t>(lengths.uniform() * 10'000);
    RandomStream rng = family.stream(i);
    auto xs = sample(law, rng, len);
    // Every tenth path gets an adjacent pair 2^k, -2^k, whose factor vanishes
    // exactly in both forms.
    if (i % 10 == 9 && len >= 2) {
      const std::size_t at = static_cast<std::size_t>(rng.uniform() * (len - 1));
      xs[at] = std::ldexp(1.0, static_cast<int>(rng.uniform() * 20) - 10);
      xs[at + 1] = -xs[at];
    }
    const double direct = log_norm_direct(xs);
    const double closed = log_norm_closed(xs);
    if (closed == kMinusInfinity || direct == kMinusInfinity) {
      ++vanishing;
      mismatched_inf += !(closed == kMinusInfinity && direct == kMinusInfinity);
      continue;
    }
    worst = std::max(worst, std::abs(direct - closed) / std::max(std::abs(closed), 1e-300));
  }
  n.check(worst <= 1e-10, "relative difference above 1e-10");
  n.check(vanishing > 0, "no vanishing factor exercised");
  n.check(mismatched_inf == 0, "MinusInfinity disagreement");
  n.note("max rel diff %.1e over 1000 paths, %d MinusInfinity paths agree", worst,
         vanishing - mismatched_inf);
  return n.done();
}

Outcome criterion_clt_shape() {
  Notes n;
  const double s2 = (pi * pi - 9) / 3;
  const auto r = simulate_normalized(Exponential{1}, 4000, 5000, LambdaSource::ClosedForm,
                                     StreamFamily(7007));
  n.check(r.ks.has_value() && !r.ks->reject_at_1pct, "KS rejects at 1%");
  const double rel = std::abs(r.empirical_var - s2) / s2;
  n.check(rel <= 0.15, "variance off by more than 15%");
  n.note("KS %.4f (crit %.4f), var %.4f vs %.4f (%.1f%%)", r.ks ? r.ks->distance : NAN,
         r.ks ? r.ks->critical_value : NAN, r.empirical_var, s2, 100 * rel);
  return n.done();
}

Outcome criterion_cancellation() {
  Notes n;
  const DiscreteAtoms form3{{1.0, kR3}, {0.5, 0.5}};
  // Calibration: exact enumeration gives Var(total) = C0 for every n, so
  // Var(total)/n = C0/n and Var(even)/(n/2) = C0.
  const auto law = atoms_of(form3);
  double calib_total = 0.0;
  double calib_even = 0.0;
  for (std::size_t m : {6, 8, 10, 12}) {
    const auto e = oracle::enumerate_even_odd(law, m, ln2);
    calib_total = static_cast<double>(e.var_total);
    calib_even = static_cast<double>(e.var_even / (m / 2));
  }
  const std::size_t len = 10'000;
  n.check(calib_total / len <= 0.02 && calib_even >= 0.05, "calibration misses thresholds");
  n.note("enumerated Var(total) %.4f, Var(even)/(n/2) %.4f", calib_total, calib_even);

  const auto r = even_odd_cancellation(form3, len, 2000, StreamFamily(8008));
  n.check(r.correlation_even_odd <= -0.5, "correlation above -0.5");
  n.check(r.var_total_over_n <= 0.02, "Var(total)/n above 0.02");
  n.check(r.var_even_over_half >= 0.05, "Var(even)/(n/2) below 0.05");
  n.note("corr %.4f, Var(total)/n %.2e, Var(even)/(n/2) %.4f", r.correlation_even_odd,
         r.var_total_over_n, r.var_even_over_half);
  return n.done();
}

Outcome criterion_hill() {
  Notes n;
  RandomStream rng(9009, 0);
  auto draw = [&] {
    const double mag = std::exp(std::log(0.01) + rng.uniform() * std::log(1e4));
    return rng.uniform() < 0.5 ? -mag : mag;
  };
  double worst_det = 0.0;
  double worst_ratio = 0.0;
  for (int i = 0; i < 10'000; ++i) {
    const CycleParams c{draw(), draw()};
    worst_det = std::max(worst_det, std::abs(determinant(transfer_matrix(c)) - 1.0));
    const double want = (1 / std::abs(c.g)) / (std::abs(c.g / c.h) + std::abs(c.h / c.g));
    worst_ratio = std::max(worst_ratio, std::abs(residual_ratio(c) - want) / want);
  }
  n.check(worst_det <= 1e-10, "det differs from 1");
  n.check(worst_ratio <= 1e-12, "residual_ratio differs from the magnitude algebra");
  n.note("max |det-1| %.1e, max residual rel diff %.1e", worst_det, worst_ratio);

  double prev = INFINITY;
  std::string gaps;
  for (double h : {10.0, 1e2, 1e3, 1e4}) {
    const auto g = unstable_growth_check(ConstantValue{h}, UniformInterval{1, 2}, 10'000, 20,
                                         StreamFamily(9009));
    n.check(g.gap < prev, "gap not decreasing at h = " + std::to_string(h));
    char buf[32];
    std::snprintf(buf, sizeof buf, "%s%.1e", gaps.empty() ? "" : " ", g.gap);
    gaps += buf;
    prev = g.gap;
  }
  n.note("gaps %s", gaps.c_str());
  return n.done();
}

Outcome criterion_scale() {
  Notes n;
  const std::vector<EntryDistribution> laws = {
      Binary{1, 2, 0.5}, Binary{-0.7, 3, 0.2}, Uniform{0, 1},   Uniform{-1, 1},
      Uniform{-1, 2},    Exponential{1},       Exponential{2, -1}, Laplace{1},
      DiscreteAtoms{{1.0, kR3}, {0.5, 0.5}}, DiscreteAtoms{{0.5, -2.0, 3.0}, {0.2, 0.3, 0.5}}};
  double worst = 0.0;
  int checked = 0;
  int unsupported = 0;
  for (const auto& d : laws) {
    for (double c : {-3.0, 0.01, 7.0}) {
      EntryDistribution scaled;
      try {
        scaled = scale(d, c);
      } catch (const Error& e) {
        // A uniform law touching 0 from one side cannot be mirrored.
        n.check(e.code() == ErrorCode::UnsupportedScale, "unexpected scale error");
        ++unsupported;
        continue;
      }
      const auto l0 = lambda_closed_form(d);
      const auto l1 = lambda_closed_form(scaled);
      const auto s0 = sigma2_closed_form(d);
      const auto s1 = sigma2_closed_form(scaled);
      n.check(l0.has_value() == l1.has_value() && s0.has_value() == s1.has_value(),
              "closed form availability changed under scaling");
      if (l0 && l1) worst = std::max(worst, std::abs(*l0 - *l1));
      if (s0 && s1) worst = std::max(worst, std::abs(*s0 - *s1));
      ++checked;
    }
  }
  n.check(worst <= 1e-12, "closed form changes under scaling");
  n.note("max diff %.1e over %d (law, c) pairs, %d UnsupportedScale", worst, checked,
         unsupported);
  return n.done();
}

}  // namespace

int main() {
  const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria = {
      {"exponential three-way agreement", criterion_exponential},
      {"laplace three-way agreement", criterion_laplace},
      {"uniform three-way agreement", criterion_uniform},
      {"binary closed forms", criterion_binary},
      {"degeneracy", criterion_degeneracy},
      {"product-form equivalence", criterion_product_form},
      {"CLT shape", criterion_clt_shape},
      {"even/odd cancellation", criterion_cancellation},
      {"Hill transfer matrices", criterion_hill},
      {"scale invariance", criterion_scale},
  };
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = {false, std::string("threw: ") + e.what()};
    }
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    failed += !o.pass;
    std::printf("%s %2zu %s [%.1fs]: %s\n", o.pass ? "PASS" : "FAIL", i + 1, criteria[i].first,
                secs, o.detail.c_str());
    std::fflush(stdout);
  }
  return failed == 0 ? 0 : 1;
}
