#pragma once

// Shared test oracles. Everything here is deliberately independent of the
// library's own algorithms: dense Eigen factorizations, the characteristic
// polynomial recursion evaluated pointwise, exact dyadic orbit arithmetic,
// and closed forms for the constant-coefficient operator.

#include <Eigen/Dense>
#include <cmath>
#include <complex>
#include <cstdint>
#include <random>
#include <vector>

#include "harper/common.hpp"
#include "harper/model.hpp"
#include "harper/spectrum.hpp"

namespace oracle {

using harper::Complex;
using harper::Coupling;
using harper::HarperModel;
using harper::Index;
using harper::Real;

// Top 53 bits of the engine output, so draws do not depend on the standard
// library's distribution implementation.
inline Real uniform(std::mt19937_64& rng, Real lo, Real hi) {
  return lo + (hi - lo) * (static_cast<Real>(rng() >> 11) * 0x1.0p-53);
}

inline Coupling random_coupling(std::mt19937_64& rng, Real lo = 0.05, Real hi = 1.5) {
  return Coupling(uniform(rng, lo, hi), uniform(rng, lo, hi), uniform(rng, lo, hi));
}

inline HarperModel random_model(std::mt19937_64& rng) {
  return HarperModel(random_coupling(rng), harper::golden_mean(), uniform(rng, 0.0, 1.0));
}

// Random Hermitian tridiagonal section with off-diagonal bounded away from zero.
inline harper::TridiagonalOperator random_operator(std::mt19937_64& rng, Index n,
                                                   bool complex_offdiag = true) {
  harper::TridiagonalOperator op;
  op.start_index = 0;
  op.diag.resize(n);
  op.offdiag.resize(n > 0 ? n - 1 : 0);
  for (Index i = 0; i < n; ++i) op.diag[i] = uniform(rng, -2.0, 2.0);
  for (Index i = 0; i + 1 < n; ++i) {
    const Real mag = uniform(rng, 0.2, 1.5);
    const Real phase = complex_offdiag ? uniform(rng, 0.0, harper::kTwoPi) : 0.0;
    op.offdiag[i] = std::polar(mag, phase);
  }
  return op;
}

// Herglotz root of m^2 + z m + 1 = 0, the constant-coefficient (a = 1, b = 0)
// half-line Weyl function.
inline Complex free_m(Complex z) {
  const Complex root = std::sqrt(z * z - 4.0);
  Complex m = (-z + root) / 2.0;
  if (m.imag() < 0.0) m = (-z - root) / 2.0;
  return m;
}

inline Eigen::MatrixXcd dense_matrix(const harper::TridiagonalOperator& op) {
  const Index n = op.size();
  Eigen::MatrixXcd h = Eigen::MatrixXcd::Zero(n, n);
  for (Index i = 0; i < n; ++i) {
    h(i, i) = op.diag[i];
    if (i + 1 < n) {
      h(i, i + 1) = op.offdiag[i];
      h(i + 1, i) = std::conj(op.offdiag[i]);
    }
  }
  return h;
}

inline Eigen::VectorXd dense_eigenvalues(const harper::TridiagonalOperator& op) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(dense_matrix(op),
                                                         Eigen::EigenvaluesOnly);
  return solver.eigenvalues();
}

// Column m of (H - z)^{-1} by dense partial-pivot LU.
inline Eigen::VectorXcd dense_resolvent_column(const harper::TridiagonalOperator& op, Complex z,
                                               Index m) {
  const Index n = op.size();
  Eigen::MatrixXcd shifted = dense_matrix(op);
  shifted.diagonal().array() -= z;
  Eigen::VectorXcd rhs = Eigen::VectorXcd::Zero(n);
  rhs[m] = 1.0;
  return shifted.partialPivLu().solve(rhs);
}

// Characteristic polynomial det(H - x) evaluated by the three-term recursion
// p_k = (d_k - x) p_{k-1} - |e_{k-1}|^2 p_{k-2}. Fine for small sections.
inline Real charpoly_value(const harper::TridiagonalOperator& op, Real x) {
  Real pm2 = 1.0;
  Real pm1 = op.diag[0] - x;
  for (Index k = 1; k < op.size(); ++k) {
    const Real p = (op.diag[k] - x) * pm1 - std::norm(op.offdiag[k - 1]) * pm2;
    pm2 = pm1;
    pm1 = p;
  }
  return pm1;
}

// Number of eigenvalues below x by counting the real roots of the characteristic
// polynomial under x with a sign-change scan. Independent of the Sturm count: it
// looks only at det(H - t) as a scalar function of t.
inline Index charpoly_count_below(const harper::TridiagonalOperator& op, Real x,
                                  Index scan = 20000) {
  Real lo = op.diag[0], hi = op.diag[0];
  for (Index i = 0; i < op.size(); ++i) {
    Real radius = 0.0;
    if (i > 0) radius += std::abs(op.offdiag[i - 1]);
    if (i + 1 < op.size()) radius += std::abs(op.offdiag[i]);
    lo = std::min(lo, op.diag[i] - radius);
    hi = std::max(hi, op.diag[i] + radius);
  }
  lo -= 1e-6;
  const Real top = std::min(x, hi + 1e-6);
  if (top <= lo) return 0;
  Index crossings = 0;
  Real prev = charpoly_value(op, lo);
  for (Index i = 1; i <= scan; ++i) {
    const Real t = lo + (top - lo) * static_cast<Real>(i) / static_cast<Real>(scan);
    const Real cur = charpoly_value(op, t);
    if ((prev < 0.0 && cur > 0.0) || (prev > 0.0 && cur < 0.0)) ++crossings;
    prev = cur;
  }
  return crossings;
}

// All eigenvalues of a small section, each bracketed by a sign change of the
// characteristic polynomial and polished by bisection. Returns fewer than
// size() roots if the scan cannot separate a near-degenerate pair; callers
// assert the count.
inline std::vector<Real> charpoly_eigenvalues(const harper::TridiagonalOperator& op,
                                              Index scan = 400000) {
  Real lo = op.diag[0], hi = op.diag[0];
  for (Index i = 0; i < op.size(); ++i) {
    Real radius = 0.0;
    if (i > 0) radius += std::abs(op.offdiag[i - 1]);
    if (i + 1 < op.size()) radius += std::abs(op.offdiag[i]);
    lo = std::min(lo, op.diag[i] - radius);
    hi = std::max(hi, op.diag[i] + radius);
  }
  lo -= 1e-6;
  hi += 1e-6;
  std::vector<Real> roots;
  Real prev_t = lo;
  Real prev = charpoly_value(op, lo);
  for (Index i = 1; i <= scan; ++i) {
    const Real t = lo + (hi - lo) * static_cast<Real>(i) / static_cast<Real>(scan);
    const Real cur = charpoly_value(op, t);
    if (cur == 0.0) {
      roots.push_back(t);
    } else if ((prev < 0.0 && cur > 0.0) || (prev > 0.0 && cur < 0.0)) {
      Real a = prev_t, b = t, fa = prev;
      for (int iter = 0; iter < 200; ++iter) {
        const Real mid = 0.5 * (a + b);
        if (mid == a || mid == b) break;
        const Real fm = charpoly_value(op, mid);
        if (fm == 0.0) {
          a = b = mid;
          break;
        }
        if ((fa < 0.0) == (fm < 0.0)) {
          a = mid;
          fa = fm;
        } else {
          b = mid;
        }
      }
      roots.push_back(0.5 * (a + b));
    }
    prev_t = t;
    prev = cur;
  }
  return roots;
}

// Dirichlet eigenvalues of the constant a = 1, b = 0 section: 2 cos(k pi / (N+1)).
inline Eigen::VectorXd free_dirichlet_eigenvalues(Index n) {
  Eigen::VectorXd vals(n);
  const Real pi = harper::kTwoPi / 2.0;
  for (Index k = 1; k <= n; ++k)
    vals[n - k] = 2.0 * std::cos(static_cast<Real>(k) * pi / static_cast<Real>(n + 1));
  return vals;
}

// Exact orbit of x -> x + alpha mod 1 for dyadic alpha = anum / 2^53 and
// theta = tnum / 2^53. Both are exactly representable doubles, and the orbit
// stays on the dyadic grid, so every orbit point is an exact double too.
class DyadicOrbit {
 public:
  static constexpr std::uint64_t kDenom = std::uint64_t(1) << 53;

  DyadicOrbit(std::uint64_t theta_num, std::uint64_t alpha_num)
      : theta_(theta_num % kDenom), alpha_(alpha_num % kDenom), cur_(theta_) {}

  Real alpha() const { return static_cast<Real>(alpha_) * 0x1.0p-53; }
  Real theta() const { return static_cast<Real>(theta_) * 0x1.0p-53; }
  Real value() const { return static_cast<Real>(cur_) * 0x1.0p-53; }

  void advance() { cur_ = (cur_ + alpha_) % kDenom; }

  Real value_at(std::int64_t n) const {
    const std::uint64_t hop = alpha_ % kDenom;
    std::uint64_t off = static_cast<std::uint64_t>(
        (static_cast<unsigned __int128>(hop) * static_cast<unsigned __int128>(std::llabs(n))) %
        kDenom);
    std::uint64_t v;
    if (n >= 0)
      v = (theta_ + off) % kDenom;
    else
      v = (theta_ + (kDenom - off)) % kDenom;
    return static_cast<Real>(v) * 0x1.0p-53;
  }

 private:
  std::uint64_t theta_;
  std::uint64_t alpha_;
  std::uint64_t cur_;
};

}  // namespace oracle
