#pragma once

#include <Eigen/Dense>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "harper/common.hpp"
#include "harper/model.hpp"

namespace harper {

using TransferMatrix = Eigen::Matrix2cd;

// One-step transfer matrix (1/a_n) [[b_n - z, -conj(a_prev)], [a_n, 0]].
// det = conj(a_prev) / a_n. Throws singular_step_error when |a_n| is singular.
TransferMatrix transfer_matrix(Complex a_prev, Complex a_cur, Real b_cur, Complex z);

struct LyapunovOptions {
  int blocks = 20;                 // block count for the standard-error estimate
  bool keep_trace = false;         // record partial averages of the log growth
  Index trace_stride = 0;          // 0 -> about 1000 trace points
  Real singular_threshold = kSingularThreshold;
  Real skip_fraction_limit = 1e-3; // more skipped steps than this aborts the estimate
};

struct CocycleResult {
  Real le_estimate = 0.0;     // raw estimate clamped at zero
  Real raw_estimate = 0.0;    // (total accumulated log norm) / steps, sign preserved
  Real stderr_estimate = 0.0; // spread of per-block growth rates / sqrt(blocks)
  Index steps = 0;            // steps entering the average (skips excluded)
  Index skipped = 0;          // singular steps treated as the identity
  std::vector<Real> log_growth_trace;  // partial averages when requested
};

// Norm growth rate of the product B_n ... B_1 read off the window (indices
// window.start_index+1 .. end), renormalizing by the max-abs entry every step.
CocycleResult lyapunov_exponent(const CoefficientWindow& window, Complex z,
                                const LyapunovOptions& options = {});

// Convenience overload: samples the model on [0, steps] first.
CocycleResult lyapunov_exponent(const HarperModel& model, Complex z, Index steps,
                                const LyapunovOptions& options = {});

struct LyapunovPoint {
  Complex z;
  std::optional<CocycleResult> result;
  std::string error;  // nonempty when this energy failed
};

// Batch evaluation over one shared coefficient window. Per-energy accumulation is
// sequential, so results do not depend on scheduling; failures are recorded per entry.
std::vector<LyapunovPoint> lyapunov_curve(const CoefficientWindow& window,
                                          std::span<const Complex> energies,
                                          const LyapunovOptions& options = {});
std::vector<LyapunovPoint> lyapunov_curve(const HarperModel& model,
                                          std::span<const Complex> energies, Index steps,
                                          const LyapunovOptions& options = {});

struct SolutionWindow {
  Index start_index = 0;
  Eigen::VectorXcd values;

  Index size() const { return values.size(); }
  bool contains(Index n) const { return n >= start_index && n < start_index + size(); }
  Complex at(Index n) const { return values[n - start_index]; }
};

enum class Direction { forward, backward };

// Propagates the three-term recursion across the window. The seed pair occupies the
// two lowest indices (forward) or the two highest (backward); the returned window
// spans the same index range as the input coefficients.
SolutionWindow propagate_solution(const CoefficientWindow& window, Complex z, Complex psi0,
                                  Complex psi1, Direction direction);

// u_n v_{n+1} - u_{n+1} v_n; both solutions must contain n and n+1.
Complex wronskian(const SolutionWindow& u, const SolutionWindow& v, Index n);

}  // namespace harper
