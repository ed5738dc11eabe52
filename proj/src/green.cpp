#include "harper/green.hpp"

#include <cmath>
#include <stdexcept>

#include "harper/cocycle.hpp"
#include "harper/errors.hpp"
#include "harper/parallel.hpp"
#include "harper/spectrum.hpp"

namespace harper {

namespace {

void check_depth(Index depth) {
  if (depth < 1) throw std::invalid_argument("recursion depth must be positive");
}

Complex riccati_step(Complex m, Real b, Complex z, Real hop_sq) {
  const Complex den = (b - z) - hop_sq * m;
  if (std::abs(den) < 1e-300) throw std::runtime_error("m-function recursion underflow");
  return 1.0 / den;
}

// m_{+,k} for k = lo..hi, seeded with zero at seed >= hi + 1; the window must
// cover coefficient indices lo+1 .. seed.
Eigen::VectorXcd m_plus_range(const CoefficientWindow& w, Complex z, Index lo, Index hi,
                              Index seed) {
  Eigen::VectorXcd out(hi - lo + 1);
  Complex m(0.0, 0.0);
  for (Index n = seed; n >= lo + 1; --n) {
    m = riccati_step(m, w.b_at(n), z, std::norm(w.a_at(n)));
    if (n - 1 <= hi) out[n - 1 - lo] = m;
  }
  return out;
}

// m_{-,k} for k = lo..hi, seeded with zero at seed <= lo - 1; the window must
// cover coefficient indices seed-1 .. hi-1.
Eigen::VectorXcd m_minus_range(const CoefficientWindow& w, Complex z, Index lo, Index hi,
                               Index seed) {
  Eigen::VectorXcd out(hi - lo + 1);
  Complex m(0.0, 0.0);
  for (Index n = seed; n <= hi - 1; ++n) {
    m = riccati_step(m, w.b_at(n), z, std::norm(w.a_at(n - 1)));
    if (n + 1 >= lo) out[n + 1 - lo] = m;
  }
  return out;
}

}  // namespace

HerglotzValue m_plus(const CoefficientWindow& w, Complex z, Index depth, Index site) {
  check_depth(depth);
  return {m_plus_range(w, z, site, site, site + depth)[0]};
}

HerglotzValue m_plus(const HarperModel& model, Complex z, Index depth, Index site) {
  check_depth(depth);
  const CoefficientWindow w = coefficients(model, site + 1, depth);
  return m_plus(w, z, depth, site);
}

HerglotzValue m_minus(const CoefficientWindow& w, Complex z, Index depth, Index site) {
  check_depth(depth);
  return {m_minus_range(w, z, site, site, site - depth)[0]};
}

HerglotzValue m_minus(const HarperModel& model, Complex z, Index depth, Index site) {
  check_depth(depth);
  const CoefficientWindow w = coefficients(model, site - depth - 1, depth + 1);
  return m_minus(w, z, depth, site);
}

Complex m_from_resolvent(const CoefficientWindow& w, Complex z, Index N) {
  if (N < 1) throw std::invalid_argument("truncation size must be positive");
  TridiagonalOperator op;
  op.start_index = 1;
  op.diag.resize(N);
  op.offdiag.resize(N - 1);
  for (Index n = 1; n <= N; ++n) {
    op.diag[n - 1] = w.b_at(n);
    if (n < N) op.offdiag[n - 1] = w.a_at(n);
  }
  Eigen::VectorXcd rhs = Eigen::VectorXcd::Zero(N);
  rhs[0] = Complex(1.0, 0.0);
  return solve_shifted_tridiagonal(op, z, rhs)[0];
}

Complex m_from_resolvent(const HarperModel& model, Complex z, Index N) {
  if (N < 1) throw std::invalid_argument("truncation size must be positive");
  return m_from_resolvent(coefficients(model, 1, N), z, N);
}

namespace {

struct TwoSidedSolutions {
  Index lo = 0, hi = 0;
  Eigen::VectorXcd psi_plus;   // indices lo..hi
  Eigen::VectorXcd psi_minus;  // indices lo..hi
  CoefficientWindow window;    // covers at least lo..hi-1 for the hoppings
};

// Builds the two decaying solutions on [lo, hi], both normalized to 1 at site 0,
// by converting the one-sided Weyl ratios back into solutions:
//   psi_{+,k+1} = -conj(a_k) m_{+,k} psi_{+,k},  psi_{-,k-1} = -a_{k-1} m_{-,k} psi_{-,k}.
TwoSidedSolutions decaying_solutions(const HarperModel& model, Complex z, Index lo, Index hi,
                                     Index depth) {
  TwoSidedSolutions s;
  s.lo = lo;
  s.hi = hi;

  const Index plus_seed = hi + depth;
  const CoefficientWindow wp = coefficients(model, lo, plus_seed - lo + 1);
  const Eigen::VectorXcd mp = m_plus_range(wp, z, lo, hi - 1, plus_seed);

  const Index minus_seed = lo - depth;
  const CoefficientWindow wm = coefficients(model, minus_seed - 1, (hi - 1) - (minus_seed - 1) + 1);
  const Eigen::VectorXcd mm = m_minus_range(wm, z, lo + 1, hi, minus_seed);

  s.psi_plus.resize(hi - lo + 1);
  s.psi_minus.resize(hi - lo + 1);
  s.psi_plus[0 - lo] = Complex(1.0, 0.0);
  s.psi_minus[0 - lo] = Complex(1.0, 0.0);
  for (Index k = 0; k < hi; ++k) {
    const Complex factor = -std::conj(wp.a_at(k)) * mp[k - lo];
    s.psi_plus[k + 1 - lo] = factor * s.psi_plus[k - lo];
  }
  for (Index k = 0; k > lo; --k) {
    const Complex factor = -std::conj(wp.a_at(k - 1)) * mp[k - 1 - lo];
    if (std::abs(factor) < 1e-300) throw std::runtime_error("decaying solution underflow");
    s.psi_plus[k - 1 - lo] = s.psi_plus[k - lo] / factor;
  }
  for (Index k = 0; k > lo; --k) {
    const Complex factor = -wm.a_at(k - 1) * mm[k - (lo + 1)];
    s.psi_minus[k - 1 - lo] = factor * s.psi_minus[k - lo];
  }
  for (Index k = 0; k < hi; ++k) {
    const Complex factor = -wm.a_at(k) * mm[k + 1 - (lo + 1)];
    if (std::abs(factor) < 1e-300) throw std::runtime_error("decaying solution underflow");
    s.psi_minus[k + 1 - lo] = s.psi_minus[k - lo] / factor;
  }
  s.window = wp;
  return s;
}

}  // namespace

Complex green_entry(const HarperModel& model, Complex z, Index n, Index m, Index depth) {
  check_depth(depth);
  const Index lo = std::min({n, m, Index(0)});
  const Index hi = std::max({n, m, Index(0)}) + 1;
  const TwoSidedSolutions s = decaying_solutions(model, z, lo, hi, depth);

  const Index nm_min = std::min(n, m), nm_max = std::max(n, m);
  const Complex wron = s.psi_minus[m - lo] * s.psi_plus[m + 1 - lo] -
                       s.psi_minus[m + 1 - lo] * s.psi_plus[m - lo];
  const Complex denom = s.window.a_at(m) * wron;
  if (std::abs(denom) < 1e-300) throw std::runtime_error("vanishing Wronskian in Green entry");
  return s.psi_minus[nm_min - lo] * s.psi_plus[nm_max - lo] / denom;
}

std::pair<Real, Real> green_diag_residuals(const HarperModel& model, Complex z, Index depth) {
  check_depth(depth);
  const Complex g00 = green_entry(model, z, 0, 0, depth);
  const Complex g11 = green_entry(model, z, 1, 1, depth);
  const Complex mp = m_plus(model, z, depth).value;
  const Complex mm = m_minus(model, z, depth).value;

  const CoefficientWindow w = coefficients(model, -1, 2);
  const Real a0_sq = std::norm(w.a_at(0));
  const Real am1_sq = std::norm(w.a_at(-1));
  const Real b0 = w.b_at(0);

  const Complex lhs1 = -1.0 / g00;
  const Complex rhs1 = a0_sq * mp + am1_sq * mm + z - b0;
  const Complex lhs2 = 1.0 / g11;
  const Complex rhs2 = 1.0 / mp + a0_sq / (am1_sq * mm + z - b0);
  return {std::abs(lhs1 - rhs1), std::abs(lhs2 - rhs2)};
}

IdentityCheck le_m_identity(const Coupling& coupling, Real alpha, Complex z, Index phases,
                            Index depth, Index cocycle_steps) {
  if (phases < 1) throw std::invalid_argument("phase count must be positive");
  check_depth(depth);
  if (!(z.imag() > 0.0)) throw std::invalid_argument("identity requires Im z > 0");

  IdentityCheck out;
  const HarperModel model(coupling, alpha, kDefaultTheta);
  out.lhs = 2.0 * lyapunov_exponent(model, z, cocycle_steps).raw_estimate;

  std::vector<Real> terms(static_cast<size_t>(phases));
  parallel_for(phases, [&](Index j) {
    const Real theta = static_cast<Real>(j) / static_cast<Real>(phases);
    const HarperModel mj(coupling, alpha, theta);
    const Complex m = m_plus(mj, z, depth).value;
    const Real a0_sq = std::norm(sample_c(coupling, alpha, theta));
    terms[static_cast<size_t>(j)] = std::log1p(z.imag() / (a0_sq * m.imag()));
  });
  out.rhs = pairwise_sum(terms) / static_cast<Real>(phases);
  out.residual = std::abs(out.lhs - out.rhs);
  return out;
}

Real m_norm_identity_residual(const HarperModel& model, Complex z, Index N) {
  if (N < 2) throw std::invalid_argument("window size must be at least 2");
  if (!(z.imag() > 0.0)) throw std::invalid_argument("identity requires Im z > 0");

  const Index pad = 500;
  const Index seed = N + pad;
  const CoefficientWindow w = coefficients(model, 0, seed + 1);
  const Eigen::VectorXcd mp = m_plus_range(w, z, 0, N - 1, seed);

  Eigen::VectorXcd psi(N + 1);
  psi[0] = Complex(1.0, 0.0);
  for (Index k = 0; k < N; ++k) psi[k + 1] = -std::conj(w.a_at(k)) * mp[k] * psi[k];

  std::vector<Real> sq(static_cast<size_t>(N));
  for (Index nidx = 1; nidx <= N; ++nidx) sq[static_cast<size_t>(nidx - 1)] = std::norm(psi[nidx]);
  Real total = pairwise_sum(sq);
  const Real last = std::norm(psi[N]), prev = std::norm(psi[N - 1]);
  if (prev > 0.0 && last < prev) {
    const Real r = last / prev;  // geometric tail bound for the truncated sum
    total += last * r / (1.0 - r);
  }

  const Real lhs = mp[0].imag() / z.imag();
  const Real rhs = total / std::norm(w.a_at(0));
  return std::abs(lhs - rhs);
}

BoundaryRatio boundary_ratio(const HarperModel& model, Real E, Real epsilon, Index depth) {
  if (!(epsilon > 0.0)) throw std::invalid_argument("epsilon must be positive");
  check_depth(depth);
  const Complex m = m_plus(model, Complex(E, epsilon), depth).value;
  return {epsilon, m.imag() / epsilon};
}

std::vector<Real> singular_support_diagnostic(const HarperModel& model, Real E,
                                              std::span<const Real> eps_ladder, Index depth) {
  if (eps_ladder.empty()) throw std::invalid_argument("empty epsilon ladder");
  for (size_t i = 0; i + 1 < eps_ladder.size(); ++i)
    if (!(eps_ladder[i] > eps_ladder[i + 1]))
      throw std::invalid_argument("epsilon ladder must decrease");
  if (!(eps_ladder.back() > 0.0)) throw std::invalid_argument("epsilon must stay positive");

  std::vector<Real> out(eps_ladder.size());
  for (size_t i = 0; i < eps_ladder.size(); ++i) {
    const Complex zz(E, eps_ladder[i]);
    out[i] = green_entry(model, zz, 0, 0, depth).imag() +
             green_entry(model, zz, 1, 1, depth).imag();
  }
  return out;
}

}  // namespace harper
