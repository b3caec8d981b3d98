// SPDX-License-Identifier: Apache-2.0
#include "singprod/quadrature.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <queue>

#include "singprod/error.hpp"

namespace singprod {

namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();
constexpr double kInf = std::numeric_limits<double>::infinity();

// Kronrod abscissae and weights (15 points) with the embedded 7-point Gauss
// weights for the odd-indexed abscissae.
constexpr std::array<double, 8> kXgk = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
constexpr std::array<double, 8> kWgk = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
constexpr std::array<double, 4> kWg = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

// Cells narrower than this in the mapped variable are not bisected further.
constexpr double kMinCellWidth = 1e-13;

// Quintic grading s(t) = t^3 (10 - 15t + 6t^2), s'(t) = 30 t^2 (1 - t)^2.
// Near either end of a piece the integrand picks up the factor t^2, so an
// integrable log singularity there turns into the much tamer t^2 log t.
inline double grade(double t) noexcept { return t * t * t * (10.0 + t * (-15.0 + 6.0 * t)); }
inline double grade_slope(double t, double u) noexcept { return 30.0 * t * t * u * u; }

// Maps t in (0, 1) onto one piece through the grading above.
struct PieceMap {
  double lo;
  double hi;

  struct Point {
    double x;
    double jac;
  };

  Point operator()(double t) const noexcept {
    const double u = 1.0 - t;
    const double slope = grade_slope(t, u);
    if (std::isfinite(lo) && std::isfinite(hi)) {
      const double width = hi - lo;
      // Measure from the nearer end so distances to it keep full precision.
      if (t <= 0.5) return {lo + width * grade(t), width * slope};
      return {hi - width * grade(u), width * slope};
    }
    if (std::isfinite(lo)) {
      const double s = grade(t);
      const double rest = grade(u);  // 1 - s
      return {lo + s / rest, slope / (rest * rest)};
    }
    // (-inf, hi]: t = 1 is the finite end.
    const double s = grade(u);
    const double rest = grade(t);
    return {hi - s / rest, slope / (rest * rest)};
  }
};

struct Cell {
  std::size_t piece = 0;
  double a = 0.0;
  double b = 1.0;
  double value = 0.0;
  double error = 0.0;
  double carried = 0.0;
  bool refinable = true;
};

struct ByError {
  bool operator()(const Cell& l, const Cell& r) const noexcept { return l.error < r.error; }
};

Cell evaluate_cell(const Integrand& f, const PieceMap& map, std::size_t piece, double a,
                   double b, std::size_t& evaluations) {
  const double center = 0.5 * (a + b);
  const double half = 0.5 * (b - a);
  auto sample = [&](double t) {
    const auto p = map(t);
    if (p.jac == 0.0 || !std::isfinite(p.x)) return IntegrandValue{};
    // A node that rounds onto an end of the piece would sample the singular
    // point itself; it stands for an interval one ulp wide.
    if (p.x == map.lo || p.x == map.hi) return IntegrandValue{};
    const auto v = f(p.x);
    ++evaluations;
    return IntegrandValue{v.value * p.jac, std::abs(v.carried_error) * p.jac};
  };

  const auto mid = sample(center);
  double kronrod = kWgk[7] * mid.value;
  double gauss = kWg[3] * mid.value;
  double resabs = kWgk[7] * std::abs(mid.value);
  double carried = kWgk[7] * mid.carried_error;
  for (std::size_t k = 0; k < 7; ++k) {
    const double dx = half * kXgk[k];
    const auto left = sample(center - dx);
    const auto right = sample(center + dx);
    const double pair = left.value + right.value;
    kronrod += kWgk[k] * pair;
    if (k % 2 == 1) gauss += kWg[k / 2] * pair;
    resabs += kWgk[k] * (std::abs(left.value) + std::abs(right.value));
    carried += kWgk[k] * (left.carried_error + right.carried_error);
  }

  Cell cell;
  cell.piece = piece;
  cell.a = a;
  cell.b = b;
  cell.value = kronrod * half;
  resabs *= half;
  const double roundoff = 50.0 * kEps * resabs;
  cell.error = std::max(std::abs(kronrod - gauss) * half, roundoff);
  cell.carried = carried * half;
  cell.refinable = (b - a) > kMinCellWidth && cell.error > roundoff;
  if (!std::isfinite(cell.value) || !std::isfinite(cell.error)) {
    throw Error(ErrorCode::Nonconvergence, "integrand produced a non-finite value");
  }
  return cell;
}

double safe_log_abs(double v) noexcept {
  const double a = std::abs(v);
  return std::log(a > std::numeric_limits<double>::min() ? a
                                                        : std::numeric_limits<double>::min());
}

// Support breakpoints plus extra singular points. A point just outside the
// support is mirrored across the nearest end, so the feature it leaves at
// that scale starts a new piece.
std::vector<double> with_points(const std::vector<double>& base,
                                std::initializer_list<double> extra) {
  std::vector<double> pts = base;
  const double lo = base.front();
  const double hi = base.back();
  for (double e : extra) {
    if (!std::isfinite(e)) continue;
    if (e > lo && e < hi) {
      pts.push_back(e);
    } else if (e <= lo && std::isfinite(lo) && lo - e > 0.0) {
      const double m = lo + (lo - e);
      if (m < hi && m > lo) pts.push_back(m);
    } else if (e >= hi && std::isfinite(hi) && e - hi > 0.0) {
      const double m = hi - (e - hi);
      if (m > lo && m < hi) pts.push_back(m);
    }
  }
  std::sort(pts.begin(), pts.end());
  pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
  return pts;
}

}  // namespace

QuadratureResult integrate_pieces(const Integrand& f, const std::vector<double>& points,
                                  double abs_tol, double rel_tol,
                                  std::size_t max_subdivisions) {
  if (points.size() < 2) return {};
  std::vector<double> pts = points;
  // A doubly infinite piece is split at 0 so every piece has a finite end.
  if (!std::isfinite(pts.front()) && !std::isfinite(pts.back()) && pts.size() == 2) {
    pts = {pts.front(), 0.0, pts.back()};
  }
  std::vector<PieceMap> maps;
  for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
    if (pts[i + 1] > pts[i]) maps.push_back({pts[i], pts[i + 1]});
  }

  QuadratureResult result;
  std::priority_queue<Cell, std::vector<Cell>, ByError> active;
  double finished_value = 0.0;
  double finished_error = 0.0;
  double finished_carried = 0.0;
  std::size_t cells = 0;

  auto admit = [&](Cell c) {
    ++cells;
    if (c.refinable) {
      active.push(c);
    } else {
      finished_value += c.value;
      finished_error += c.error;
      finished_carried += c.carried;
    }
  };
  for (std::size_t i = 0; i < maps.size(); ++i) {
    admit(evaluate_cell(f, maps[i], i, 0.0, 1.0, result.evaluations));
  }

  auto totals = [&] {
    // The heap is small; a fresh sum avoids drift from incremental updates.
    double value = finished_value;
    double error = finished_error;
    double carried = finished_carried;
    auto copy = active;
    while (!copy.empty()) {
      value += copy.top().value;
      error += copy.top().error;
      carried += copy.top().carried;
      copy.pop();
    }
    return std::array<double, 3>{value, error, carried};
  };

  double value = 0.0;
  double error = 0.0;
  double carried = 0.0;
  double running_value = 0.0;
  double running_error = 0.0;
  {
    const auto t = totals();
    running_value = t[0];
    running_error = t[1];
  }
  for (std::size_t iter = 0;; ++iter) {
    const double tol = std::max(abs_tol, rel_tol * std::abs(running_value));
    // Retired cells sit at their roundoff floor. Once the refinable part is no
    // larger than that floor, stop and report the floor in the bound.
    if (running_error <= tol || active.empty()) break;
    if (running_error - finished_error <= std::max(0.1 * tol, finished_error)) break;
    if (cells >= max_subdivisions) {
      throw Error(ErrorCode::Nonconvergence,
                  "adaptive quadrature exhausted max_subdivisions");
    }
    const Cell worst = active.top();
    active.pop();
    const double mid = 0.5 * (worst.a + worst.b);
    const Cell left = evaluate_cell(f, maps[worst.piece], worst.piece, worst.a, mid,
                                    result.evaluations);
    const Cell right = evaluate_cell(f, maps[worst.piece], worst.piece, mid, worst.b,
                                     result.evaluations);
    --cells;
    running_value += left.value + right.value - worst.value;
    running_error += left.error + right.error - worst.error;
    admit(left);
    admit(right);
    if (iter % 64 == 63) {
      const auto t = totals();
      running_value = t[0];
      running_error = t[1];
    }
  }
  const auto t = totals();
  value = t[0];
  error = t[1];
  carried = t[2];
  result.value = value;
  result.error_bound = error + carried;
  return result;
}

ContinuousLaw::ContinuousLaw(const EntryDistribution& dist) {
  validate(dist);
  if (const auto* u = std::get_if<Uniform>(&dist)) {
    kind_ = Kind::Uniform;
    param_ = 1.0 / (u->hi - u->lo);
    points_ = u->lo < 0.0 ? std::vector<double>{u->lo, 0.0, u->hi}
                          : std::vector<double>{u->lo, u->hi};
  } else if (const auto* e = std::get_if<Exponential>(&dist)) {
    kind_ = Kind::Exponential;
    param_ = e->rate;
    sign_ = e->sign;
    points_ = sign_ > 0 ? std::vector<double>{0.0, kInf} : std::vector<double>{-kInf, 0.0};
  } else if (const auto* l = std::get_if<Laplace>(&dist)) {
    kind_ = Kind::Laplace;
    param_ = l->scale;
    points_ = {-kInf, 0.0, kInf};
  } else {
    throw Error(ErrorCode::BadSupport, "quadrature requires a continuous distribution");
  }
}

double ContinuousLaw::density(double x) const {
  switch (kind_) {
    case Kind::Uniform:
      return (x >= points_.front() && x <= points_.back()) ? param_ : 0.0;
    case Kind::Exponential: {
      const double z = sign_ * x;
      return z >= 0.0 ? param_ * std::exp(-param_ * z) : 0.0;
    }
    case Kind::Laplace:
      return std::exp(-std::abs(x) / param_) / (2.0 * param_);
  }
  return 0.0;
}

ContinuousLaw ContinuousLaw::reflected() const {
  ContinuousLaw out = *this;
  out.sign_ = -sign_;
  out.points_.clear();
  for (auto it = points_.rbegin(); it != points_.rend(); ++it) out.points_.push_back(-*it);
  return out;
}

namespace {

// Requested tolerances snap down to the ladder 10^-k, so the oracle's output
// only changes at decade boundaries and each change is a tenfold tightening.
double snap(double tol) noexcept {
  if (!(tol > 0.0)) return tol;
  return std::pow(10.0, std::floor(std::log10(tol) + 1e-9));
}

QuadratureSpec snapped(const QuadratureSpec& spec) {
  QuadratureSpec out = spec;
  out.abs_tol = snap(spec.abs_tol);
  out.rel_tol = snap(spec.rel_tol);
  return out;
}

// Inner one-dimensional expectations at a fixed outer point. They are O(1)
// dimensionless log moments, so their target is absolute and two decades
// below the looser of the outer tolerances.
class InnerIntegrals {
public:
  InnerIntegrals(const ContinuousLaw& law, const QuadratureSpec& spec)
      : law_(law),
        abs_tol_(1e-2 * std::max(spec.abs_tol, spec.rel_tol)),
        max_sub_(spec.max_subdivisions) {}

  // G(x) = E_y log|1 + y/x|  (= K with the roles of the two entries swapped)
  QuadratureResult g(double x) const {
    return run(
        [this, x](double y) {
          return IntegrandValue{safe_log_abs((x + y) / x) * law_.density(y), 0.0};
        },
        with_points(law_.breakpoints(), {-x}));
  }

  // H(x) = E_y (log|1 + y/x|)^2
  QuadratureResult h(double x) const {
    return run(
        [this, x](double y) {
          const double l = safe_log_abs((x + y) / x);
          return IntegrandValue{l * l * law_.density(y), 0.0};
        },
        with_points(law_.breakpoints(), {-x}));
  }

  // K(y) = E_x log|1 + y/x|
  QuadratureResult k(double y) const {
    return run(
        [this, y](double x) {
          return IntegrandValue{safe_log_abs((x + y) / x) * law_.density(x), 0.0};
        },
        with_points(law_.breakpoints(), {0.0, -y}));
  }

private:
  template <class F>
  QuadratureResult run(F&& f, const std::vector<double>& pts) const {
    return integrate_pieces(Integrand(std::forward<F>(f)), pts, abs_tol_, 0.0, max_sub_);
  }

  const ContinuousLaw& law_;
  double abs_tol_;
  std::size_t max_sub_;
};

// Outer points: support breakpoints, 0, and the reflections of finite support
// ends, where the inner integrals lose smoothness.
std::vector<double> outer_points(const ContinuousLaw& law) {
  std::vector<double> pts = with_points(law.breakpoints(), {0.0});
  const double lo = law.support_lo();
  const double hi = law.support_hi();
  return with_points(pts, {std::isfinite(lo) ? -lo : kInf, std::isfinite(hi) ? -hi : kInf});
}

QuadratureResult lambda_impl(const ContinuousLaw& law, const QuadratureSpec& spec) {
  const InnerIntegrals inner(law, spec);
  return integrate_pieces(
      [&](double x) {
        const double fx = law.density(x);
        if (fx == 0.0) return IntegrandValue{};
        const auto g = inner.g(x);
        return IntegrandValue{g.value * fx, g.error_bound * fx};
      },
      outer_points(law), spec.abs_tol, spec.rel_tol, spec.max_subdivisions);
}

}  // namespace

QuadratureResult lambda_quadrature(const ContinuousLaw& law, const QuadratureSpec& spec) {
  return lambda_impl(law, snapped(spec));
}

QuadratureResult lambda_quadrature(const EntryDistribution& dist,
                                   const QuadratureSpec& spec) {
  return lambda_quadrature(ContinuousLaw(dist), spec);
}

QuadratureResult sigma2_quadrature(const ContinuousLaw& law, const QuadratureSpec& requested) {
  const QuadratureSpec spec = snapped(requested);
  QuadratureSpec tight = spec;
  tight.abs_tol *= 0.1;
  tight.rel_tol *= 0.1;
  const auto lambda = lambda_impl(law, tight);

  const InnerIntegrals inner(law, spec);
  const auto pts = outer_points(law);
  const auto m2 = integrate_pieces(
      [&](double x) {
        const double fx = law.density(x);
        if (fx == 0.0) return IntegrandValue{};
        const auto h = inner.h(x);
        return IntegrandValue{h.value * fx, h.error_bound * fx};
      },
      pts, spec.abs_tol, spec.rel_tol, spec.max_subdivisions);
  const auto c1 = integrate_pieces(
      [&](double y) {
        const double fy = law.density(y);
        if (fy == 0.0) return IntegrandValue{};
        const auto k = inner.k(y);
        const auto g = inner.g(y);
        const double carried = std::abs(k.value) * g.error_bound +
                               std::abs(g.value) * k.error_bound +
                               k.error_bound * g.error_bound;
        return IntegrandValue{k.value * g.value * fy, carried * fy};
      },
      pts, spec.abs_tol, spec.rel_tol, spec.max_subdivisions);

  QuadratureResult out;
  const double l = lambda.value;
  const double el = lambda.error_bound;
  out.value = m2.value + 2.0 * c1.value - 3.0 * l * l;
  out.error_bound = m2.error_bound + 2.0 * c1.error_bound + 3.0 * (2.0 * std::abs(l) * el + el * el);
  out.evaluations = lambda.evaluations + m2.evaluations + c1.evaluations;
  return out;
}

QuadratureResult sigma2_quadrature(const EntryDistribution& dist,
                                   const QuadratureSpec& spec) {
  return sigma2_quadrature(ContinuousLaw(dist), spec);
}

}  // namespace singprod
