#pragma once

#include <cmath>
#include <cstdint>
#include <utility>

#include "harper/common.hpp"

namespace harper {

struct QuadratureResult {
  Real value = 0.0;
  Real error_bound = 0.0;
  bool converged = false;
  Index evaluations = 0;
};

namespace detail {

template <class F>
Real simpson_recurse(const F& f, Real a, Real b, Real fa, Real fm, Real fb, Real whole, Real tol,
                     int depth, Index& evals, Index max_evals, bool& ok, Real& err) {
  const Real m = 0.5 * (a + b);
  const Real lm = 0.5 * (a + m), rm = 0.5 * (m + b);
  const Real flm = f(lm), frm = f(rm);
  evals += 2;
  const Real h = b - a;
  const Real left = (h / 12.0) * (fa + 4.0 * flm + fm);
  const Real right = (h / 12.0) * (fm + 4.0 * frm + fb);
  const Real delta = left + right - whole;
  if (depth <= 0 || evals > max_evals) {
    ok = false;
    err += std::abs(delta);
    return left + right + delta / 15.0;
  }
  if (std::abs(delta) <= 15.0 * tol) {
    err += std::abs(delta) / 15.0;
    return left + right + delta / 15.0;  // Richardson correction
  }
  return simpson_recurse(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1, evals, max_evals, ok, err) +
         simpson_recurse(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1, evals, max_evals, ok, err);
}

}  // namespace detail

// Adaptive Simpson with Richardson correction. Intended for integrands smooth in the
// interior of [a, b]; never evaluates the endpoints of subintervals beyond a, m, b.
template <class F>
QuadratureResult adaptive_simpson(F&& f, Real a, Real b, Real tol, Index max_evals = 200000,
                                  int max_depth = 40) {
  QuadratureResult r;
  if (a == b) {
    r.converged = true;
    return r;
  }
  const Real m = 0.5 * (a + b);
  const Real fa = f(a), fm = f(m), fb = f(b);
  r.evaluations = 3;
  const Real whole = ((b - a) / 6.0) * (fa + 4.0 * fm + fb);
  bool ok = true;
  Real err = 0.0;
  r.value = detail::simpson_recurse(f, a, b, fa, fm, fb, whole, tol, max_depth, r.evaluations,
                                    max_evals, ok, err);
  r.error_bound = err;
  r.converged = ok && err <= tol;
  return r;
}

// Tanh-sinh panel rule. Nodes cluster double-exponentially at the endpoints, which
// integrates endpoint log singularities to full accuracy. Integrand arguments are
// passed as (distance from a, distance from b) so callers can evaluate stably.
template <class F>
QuadratureResult tanh_sinh(F&& f, Real a, Real b, Real tol, int max_level = 12) {
  QuadratureResult res;
  if (a == b) {
    res.converged = true;
    return res;
  }
  const Real r = 0.5 * (b - a);
  const Real t_max = 4.0;

  // weight(t) = (pi/2) cosh(t) / cosh^2((pi/2) sinh t); offset(t) = distance to endpoint.
  const Real half_pi = kTwoPi / 4.0;
  auto node = [&](Real t, Real& offset, Real& weight) {
    const Real y = half_pi * std::sinh(t);
    offset = r * 2.0 / (1.0 + std::exp(2.0 * y));  // r (1 - tanh(y)), cancellation-free
    const Real ch = std::cosh(y);
    weight = half_pi * std::cosh(t) / (ch * ch);
  };

  Real h = 1.0;
  Real prev = 0.0;
  // Level 0: node at t = 0 plus symmetric tail nodes at integer t.
  Real sum = 0.0;
  {
    Real off, w;
    node(0.0, off, w);
    sum = w * f(off, 2.0 * r - off);
    for (Real t = 1.0; t <= t_max; t += 1.0) {
      node(t, off, w);
      if (w < 1e-300) break;
      sum += w * (f(off, 2.0 * r - off) + f(2.0 * r - off, off));
      res.evaluations += 2;
    }
    ++res.evaluations;
    prev = sum * h * r;
  }
  for (int level = 1; level <= max_level; ++level) {
    h *= 0.5;
    Real add = 0.0;
    for (Real t = h; t <= t_max; t += 2.0 * h) {
      Real off, w;
      node(t, off, w);
      if (w < 1e-300) continue;
      add += w * (f(off, 2.0 * r - off) + f(2.0 * r - off, off));
      res.evaluations += 2;
    }
    sum = sum + add;
    const Real cur = sum * h * r;
    res.error_bound = std::abs(cur - prev);
    res.value = cur;
    if (level >= 3 && res.error_bound <= tol) {
      res.converged = true;
      return res;
    }
    prev = cur;
  }
  res.converged = false;
  return res;
}

}  // namespace harper
