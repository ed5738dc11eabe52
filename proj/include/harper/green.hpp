#pragma once

#include <span>
#include <utility>
#include <vector>

#include "harper/common.hpp"
#include "harper/model.hpp"

namespace harper {

// Value of a Herglotz function: maps the upper half plane into itself.
struct HerglotzValue {
  Complex value;
  Real imag() const { return value.imag(); }
};

struct BoundaryRatio {
  Real epsilon = 0.0;
  Real ratio = 0.0;  // Im m_+(E + i eps) / eps
};

// Half-line Weyl function at `site`, from the downward continued-fraction recursion
//   m_{n-1} = 1 / ((b_n - z) - |a_n|^2 m_n)
// seeded with zero at site + depth. Strictly Herglotz for Im z > 0.
HerglotzValue m_plus(const HarperModel& model, Complex z, Index depth, Index site = 0);
HerglotzValue m_plus(const CoefficientWindow& window, Complex z, Index depth, Index site = 0);

// Mirror object for the left half line, seeded at site - depth:
//   m_{n+1} = 1 / ((b_n - z) - |a_{n-1}|^2 m_n).
HerglotzValue m_minus(const HarperModel& model, Complex z, Index depth, Index site = 0);
HerglotzValue m_minus(const CoefficientWindow& window, Complex z, Index depth, Index site = 0);

// Independent route to m_+: <delta_1, (H_N - z)^{-1} delta_1> where H_N is the
// N-site truncation onto sites 1..N, solved by tridiagonal LU.
Complex m_from_resolvent(const HarperModel& model, Complex z, Index N);
Complex m_from_resolvent(const CoefficientWindow& window, Complex z, Index N);

// Two-sided Green's function entry G(n, m; z) assembled from the decaying solutions:
// G = psi_-(min) psi_+(max) / (a_m W_m[psi_-, psi_+]).
Complex green_entry(const HarperModel& model, Complex z, Index n, Index m, Index depth);

// Residuals of the two diagonal resolvent identities
//   -G(0,0)^{-1} = |a_0|^2 m_+ + |a_-1|^2 m_- + z - b_0
//    G(1,1)^{-1} = m_+^{-1} + |a_0|^2 (|a_-1|^2 m_- + z - b_0)^{-1}.
std::pair<Real, Real> green_diag_residuals(const HarperModel& model, Complex z, Index depth);

struct IdentityCheck {
  Real lhs = 0.0;
  Real rhs = 0.0;
  Real residual = 0.0;
};

// Phase-averaged identity tying the exponent to the Weyl function:
//   2 L(z) = E_theta log(1 + Im z / (|a_0|^2 Im m_+)).
// lhs uses a cocycle estimate, rhs a uniform phase grid of the given size.
IdentityCheck le_m_identity(const Coupling& coupling, Real alpha, Complex z, Index phases,
                            Index depth, Index cocycle_steps);

// Residual of Im m_+ / Im z = ||psi_+ restricted to n >= 1||^2 / (|a_0 psi_+(0)|^2),
// with the tail beyond N bounded by the observed geometric decay.
Real m_norm_identity_residual(const HarperModel& model, Complex z, Index N);

// Im m_+(E + i eps) / eps; diverges as eps -> 0 exactly on the singular part.
BoundaryRatio boundary_ratio(const HarperModel& model, Real E, Real epsilon, Index depth);

// Im G(0,0) + Im G(1,1) along a decreasing epsilon ladder; bounded sequences
// indicate E outside the singular support.
std::vector<Real> singular_support_diagnostic(const HarperModel& model, Real E,
                                              std::span<const Real> eps_ladder, Index depth);

}  // namespace harper
