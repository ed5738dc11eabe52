#include "harper/model.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "harper/errors.hpp"
#include "harper/quadrature.hpp"

namespace harper {

namespace {

struct TwoSum {
  Real s, e;
};

inline TwoSum two_sum(Real a, Real b) {
  const Real s = a + b;
  const Real bp = s - a;
  const Real e = (a - (s - bp)) + (b - bp);
  return {s, e};
}

inline TwoSum fast_two_sum(Real a, Real b) {  // requires |a| >= |b|
  const Real s = a + b;
  const Real e = b - (s - a);
  return {s, e};
}

}  // namespace

Coupling::Coupling(Real l1, Real l2, Real l3) : lambda1(l1), lambda2(l2), lambda3(l3) {
  if (!(l1 >= 0.0) || !(l2 >= 0.0) || !(l3 >= 0.0))
    throw std::invalid_argument("coupling components must be nonnegative");
  if (!(l1 + l2 + l3 > 0.0))
    throw std::invalid_argument("coupling must have a strictly positive component");
}

const char* to_string(RegionTag tag) {
  switch (tag) {
    case RegionTag::I: return "I";
    case RegionTag::II: return "II";
    default: return "III";
  }
}

HarperModel::HarperModel(Coupling c, Real alpha_, Real theta_)
    : coupling(c), alpha(alpha_), theta(theta_) {
  if (!(alpha > 0.0) || !(alpha < 1.0)) throw std::invalid_argument("alpha must lie in (0,1)");
  if (!(theta >= 0.0) || !(theta < 1.0)) throw std::invalid_argument("theta must lie in [0,1)");
}

Complex sample_c(const Coupling& coupling, Real alpha, Real x) {
  Real t = x + 0.5 * alpha;
  t -= std::floor(t);
  const Real phi = kTwoPi * t;
  return {coupling.lambda2 + (coupling.lambda1 + coupling.lambda3) * std::cos(phi),
          (coupling.lambda1 - coupling.lambda3) * std::sin(phi)};
}

Real sample_v(Real x) {
  Real t = x - std::floor(x);
  return 2.0 * std::cos(kTwoPi * t);
}

PhaseOrbit::PhaseOrbit(Real theta, Real alpha) : alpha_(alpha), hi_(theta), lo_(0.0) {
  if (!(alpha > 0.0) || !(alpha < 1.0)) throw std::invalid_argument("alpha must lie in (0,1)");
  hi_ -= std::floor(hi_);
}

void PhaseOrbit::add(Real delta) {
  auto [s, e] = two_sum(hi_, delta);
  lo_ += e;
  if (s >= 1.0) {
    auto [s2, e2] = two_sum(s, -1.0);
    s = s2;
    lo_ += e2;
  } else if (s < 0.0) {
    auto [s2, e2] = two_sum(s, 1.0);
    s = s2;
    lo_ += e2;
  }
  auto [h, l] = fast_two_sum(s, lo_);
  hi_ = h;
  lo_ = l;
  if (hi_ >= 1.0) {
    hi_ -= 1.0;
  } else if (hi_ < 0.0) {
    hi_ += 1.0;
  }
}

Real PhaseOrbit::value() const {
  Real v = hi_ + lo_;
  if (v >= 1.0) v -= 1.0;
  if (v < 0.0) v += 1.0;
  return v;
}

void PhaseOrbit::advance() {
  add(alpha_);
  ++position_;
}

void PhaseOrbit::retreat() {
  add(-alpha_);
  --position_;
}

void PhaseOrbit::seek(Index n) {
  while (position_ < n) advance();
  while (position_ > n) retreat();
}

CoefficientWindow coefficients(const HarperModel& model, Index start, Index length) {
  if (length < 1) throw std::invalid_argument("window length must be positive");
  CoefficientWindow w;
  w.start_index = start;
  w.a.resize(length);
  w.b.resize(length);
  PhaseOrbit orbit(model.theta, model.alpha);
  orbit.seek(start);
  for (Index k = 0; k < length; ++k) {
    const Real x = orbit.value();
    w.a[k] = sample_c(model.coupling, model.alpha, x);
    w.b[k] = sample_v(x);
    if (std::abs(w.a[k]) <= kSingularThreshold) w.near_singular.push_back(start + k);
    orbit.advance();
  }
  return w;
}

CoefficientWindow constant_window(Index start, Index length, Complex a, Real b) {
  if (length < 1) throw std::invalid_argument("window length must be positive");
  CoefficientWindow w;
  w.start_index = start;
  w.a = Eigen::VectorXcd::Constant(length, a);
  w.b = Eigen::VectorXd::Constant(length, b);
  if (std::abs(a) <= kSingularThreshold)
    for (Index k = 0; k < length; ++k) w.near_singular.push_back(start + k);
  return w;
}

CoefficientWindow sampled_window(Index start, Index length, const std::function<Complex(Index)>& fa,
                                 const std::function<Real(Index)>& fb) {
  if (length < 1) throw std::invalid_argument("window length must be positive");
  CoefficientWindow w;
  w.start_index = start;
  w.a.resize(length);
  w.b.resize(length);
  for (Index k = 0; k < length; ++k) {
    w.a[k] = fa(start + k);
    w.b[k] = fb(start + k);
    if (std::abs(w.a[k]) <= kSingularThreshold) w.near_singular.push_back(start + k);
  }
  return w;
}

Region classify_region(const Coupling& c, Real tol) {
  const Real s = c.cross_sum();
  const Real l2 = c.lambda2;
  auto near = [tol](Real a, Real b) { return std::abs(a - b) <= tol; };

  Region r;
  if (s <= 1.0 + tol && l2 <= 1.0 + tol) {
    r.tag = RegionTag::I;
    r.on_boundary = near(s, 1.0) || near(l2, 1.0) || near(s, 0.0) || near(l2, 0.0);
  } else if (s <= l2 + tol && l2 >= 1.0 - tol) {
    r.tag = RegionTag::II;
    r.on_boundary = near(s, l2) || near(l2, 1.0) || near(s, 0.0);
  } else {
    r.tag = RegionTag::III;
    r.on_boundary = near(s, std::max(1.0, l2));
  }
  return r;
}

Coupling sigma_dual(const Coupling& c) {
  if (!(c.lambda2 > 0.0)) throw std::domain_error("sigma_dual requires lambda2 > 0");
  return Coupling(c.lambda3 / c.lambda2, 1.0 / c.lambda2, c.lambda1 / c.lambda2);
}

Real jensen_log_integral_closed(const Coupling& c, Real tol) {
  const Real s = c.cross_sum();
  if (s >= c.lambda2 - tol && s > 0.0) {
    // Next-nearest-dominated cases: the mean of log|c| is log of the larger cross weight.
    return std::log(std::max(c.lambda1, c.lambda3));
  }
  // Diagonal-dominated cases. Equivalent to log|2 l1 l3 / (-l2 + sqrt(l2^2 - 4 l1 l3))|
  // when l1 l3 > 0, written without the subtractive cancellation; reduces to log(l2)
  // when l1 l3 = 0.
  const Real disc = std::max(0.0, c.lambda2 * c.lambda2 - 4.0 * c.lambda1 * c.lambda3);
  return std::log(0.5 * (c.lambda2 + std::sqrt(disc)));
}

Real jensen_log_integral_quadrature(const Coupling& c, Real alpha, Real tol) {
  if (!(tol > 0.0)) throw std::invalid_argument("quadrature tolerance must be positive");

  auto csq = [&](Real x) { return std::norm(sample_c(c, alpha, x)); };
  auto f = [&](Real x) { return 0.5 * std::log(csq(x)); };

  // |c|^2 is a degree-one trigonometric polynomial in x: it has at most two zeros per
  // period. Scan for candidate minima and refine by golden-section search.
  const int kScan = 2048;
  std::vector<Real> g(kScan);
  Real gmax = 0.0;
  for (int k = 0; k < kScan; ++k) {
    g[k] = csq((k + 0.5) / kScan);
    gmax = std::max(gmax, g[k]);
  }
  if (!(gmax > 0.0)) throw std::domain_error("hopping symbol vanishes identically");

  std::vector<Real> breakpoints;
  const Real gr = 0.5 * (std::sqrt(5.0) - 1.0);
  for (int k = 0; k < kScan; ++k) {
    const Real prev = g[(k + kScan - 1) % kScan], next = g[(k + 1) % kScan];
    if (g[k] <= prev && g[k] <= next && g[k] <= gmax * 1e-6) {
      Real lo = (k - 0.5) / kScan, hi = (k + 1.5) / kScan;
      Real x1 = hi - gr * (hi - lo), x2 = lo + gr * (hi - lo);
      Real f1 = csq(x1), f2 = csq(x2);
      for (int it = 0; it < 120 && hi - lo > 1e-14; ++it) {
        if (f1 < f2) {
          hi = x2; x2 = x1; f2 = f1;
          x1 = hi - gr * (hi - lo); f1 = csq(x1);
        } else {
          lo = x1; x1 = x2; f1 = f2;
          x2 = lo + gr * (hi - lo); f2 = csq(x2);
        }
      }
      const Real xmin = 0.5 * (lo + hi);
      if (csq(xmin) <= gmax * 1e-10) breakpoints.push_back(xmin - std::floor(xmin));
    }
  }
  std::sort(breakpoints.begin(), breakpoints.end());

  // Integrate panel by panel; panels touching a zero of |c| use tanh-sinh nodes,
  // the rest adaptive Simpson.
  std::vector<Real> edges;
  edges.push_back(0.0);
  for (Real x : breakpoints)
    if (x > 1e-12 && x < 1.0 - 1e-12) edges.push_back(x);
  edges.push_back(1.0);

  auto is_zero_edge = [&](Real x) {
    for (Real bp : breakpoints)
      if (std::abs(x - bp) < 1e-10 || std::abs(x - bp + 1.0) < 1e-10 ||
          std::abs(x - bp - 1.0) < 1e-10)
        return true;
    return false;
  };

  const Real panel_tol = 0.5 * tol / static_cast<Real>(edges.size() - 1);
  Real total = 0.0, bound = 0.0;
  bool ok = true;
  for (size_t i = 0; i + 1 < edges.size(); ++i) {
    const Real a = edges[i], b = edges[i + 1];
    QuadratureResult q;
    if (is_zero_edge(a) || is_zero_edge(b)) {
      q = tanh_sinh([&](Real da, Real db) { return da < db ? f(a + da) : f(b - db); }, a, b,
                    panel_tol);
    } else {
      q = adaptive_simpson(f, a, b, panel_tol);
    }
    total += q.value;
    bound += q.error_bound;
    ok = ok && q.converged;
  }
  if (!ok) throw accuracy_error("log-mean quadrature did not converge", total, bound);
  return total;
}

bool diophantine_witness(Real alpha, Real r, Real b, Index j_max) {
  if (!(r > 1.0)) throw std::invalid_argument("diophantine exponent must exceed 1");
  if (!(b > 0.0)) throw std::invalid_argument("diophantine constant must be positive");
  if (j_max < 1) throw std::invalid_argument("j_max must be at least 1");
  PhaseOrbit orbit(0.0, alpha);
  for (Index j = 1; j <= j_max; ++j) {
    orbit.advance();  // phase = j * alpha mod 1, compensated
    const Real frac = orbit.value();
    const Real s = std::abs(std::sin(kTwoPi * frac));
    if (!(s > b / std::pow(static_cast<Real>(j), r))) return false;
  }
  return true;
}

}  // namespace harper
