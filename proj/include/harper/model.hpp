#pragma once

#include <Eigen/Dense>
#include <functional>
#include <stdexcept>
#include <vector>

#include "harper/common.hpp"

namespace harper {

// Coupling triple of the extended Harper model, restricted to the normalized cone:
// every component nonnegative and at least one strictly positive.
struct Coupling {
  Real lambda1 = 0.0;
  Real lambda2 = 0.0;
  Real lambda3 = 0.0;

  Coupling() = default;
  Coupling(Real l1, Real l2, Real l3);

  // lambda1 + lambda3, the combined next-nearest-neighbor weight.
  Real cross_sum() const { return lambda1 + lambda3; }
};

enum class RegionTag { I, II, III };

const char* to_string(RegionTag tag);

struct Region {
  RegionTag tag = RegionTag::I;
  bool on_boundary = false;
};

// Quasi-periodic sampling data: frequency alpha in (0,1), phase theta in [0,1).
struct HarperModel {
  Coupling coupling;
  Real alpha = kGoldenMean;
  Real theta = 0.0;

  HarperModel() = default;
  HarperModel(Coupling c, Real alpha_, Real theta_);
};

// Finite window of Jacobi coefficients a_n (hopping) and b_n (potential) for
// n = start_index .. start_index + size - 1. Indices with |a_n| at or below the
// singular threshold are listed in near_singular.
struct CoefficientWindow {
  Index start_index = 0;
  Eigen::VectorXcd a;
  Eigen::VectorXd b;
  std::vector<Index> near_singular;

  Index size() const { return a.size(); }
  bool contains(Index n) const { return n >= start_index && n < start_index + size(); }
  Complex a_at(Index n) const {
    if (!contains(n)) throw std::out_of_range("coefficient index outside window");
    return a[n - start_index];
  }
  Real b_at(Index n) const {
    if (!contains(n)) throw std::out_of_range("coefficient index outside window");
    return b[n - start_index];
  }
};

// Hopping symbol lambda3 e^{-2 pi i (x + alpha/2)} + lambda2 + lambda1 e^{2 pi i (x + alpha/2)}.
Complex sample_c(const Coupling& coupling, Real alpha, Real x);

// Potential symbol 2 cos(2 pi x).
Real sample_v(Real x);

// Samples a_n = c(theta + alpha n), b_n = v(theta + alpha n) for n = start .. start+length-1.
// Orbit phases are accumulated by compensated addition mod 1, not by forming n*alpha.
CoefficientWindow coefficients(const HarperModel& model, Index start, Index length);

// Constant-coefficient window, the main oracle substrate for cocycle and spectrum code.
CoefficientWindow constant_window(Index start, Index length, Complex a, Real b);

// Window with user-supplied samplers; fa/fb are evaluated at each integer index.
CoefficientWindow sampled_window(Index start, Index length, const std::function<Complex(Index)>& fa,
                                 const std::function<Real(Index)>& fb);

// Coupling-space classification. Ties within tol resolve in the order I, II, III;
// on_boundary marks couplings within tol of any defining inequality of the chosen region.
Region classify_region(const Coupling& coupling, Real tol = kRegionTol);

// Duality map (lambda3/lambda2, 1/lambda2, lambda1/lambda2); requires lambda2 > 0.
Coupling sigma_dual(const Coupling& coupling);

// Mean of log|c| over one period, by the explicit case table. The tie between the
// case families at lambda2 = lambda1 + lambda3 is resolved with the same tolerance
// as classify_region (both branches agree there analytically).
Real jensen_log_integral_closed(const Coupling& coupling, Real tol = kRegionTol);

// Same integral by adaptive quadrature with |c|-zero detection; the value is
// independent of alpha. Throws accuracy_error when the node budget is exhausted.
Real jensen_log_integral_quadrature(const Coupling& coupling, Real alpha, Real tol);

// True when |sin(2 pi j alpha)| > b / j^r for all 1 <= j <= j_max. Requires r > 1,
// b > 0, j_max >= 1.
bool diophantine_witness(Real alpha, Real r, Real b, Index j_max);

// Compensated mod-1 accumulator for the orbit theta + alpha n. The phase is kept as
// an unevaluated double-double sum so that millions of steps lose no orbit accuracy.
class PhaseOrbit {
 public:
  PhaseOrbit(Real theta, Real alpha);

  Real value() const;
  Index position() const { return position_; }
  void advance();
  void retreat();
  void seek(Index n);

 private:
  void add(Real delta);

  Real alpha_;
  Real hi_;
  Real lo_;
  Index position_ = 0;
};

}  // namespace harper
