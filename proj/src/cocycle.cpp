#include "harper/cocycle.hpp"

#include <cmath>
#include <stdexcept>

#include "harper/errors.hpp"
#include "harper/parallel.hpp"

namespace harper {

TransferMatrix transfer_matrix(Complex a_prev, Complex a_cur, Real b_cur, Complex z) {
  const Real mag = std::abs(a_cur);
  if (mag <= kSingularThreshold) throw singular_step_error(0, mag);
  TransferMatrix B;
  B(0, 0) = (b_cur - z) / a_cur;
  B(0, 1) = -std::conj(a_prev) / a_cur;
  B(1, 0) = Complex(1.0, 0.0);
  B(1, 1) = Complex(0.0, 0.0);
  return B;
}

CocycleResult lyapunov_exponent(const CoefficientWindow& w, Complex z,
                                const LyapunovOptions& opt) {
  const Index total_steps = w.size() - 1;
  if (total_steps < 1) throw std::invalid_argument("window too short for a cocycle step");
  const int blocks = std::max(1, opt.blocks);

  CocycleResult res;
  const Index stride =
      opt.trace_stride > 0 ? opt.trace_stride : std::max<Index>(1, total_steps / 1000);

  Eigen::Matrix2cd P = Eigen::Matrix2cd::Identity();
  std::vector<Real> block_total(blocks, 0.0);
  std::vector<Index> block_count(blocks, 0);
  Real total = 0.0;
  Index counted = 0;

  for (Index k = 1; k <= total_steps; ++k) {
    const Complex a_prev = w.a[k - 1];
    const Complex a_cur = w.a[k];
    const Real b_cur = w.b[k];
    if (std::abs(a_cur) <= opt.singular_threshold) {
      ++res.skipped;
      continue;
    }
    Eigen::Matrix2cd B;
    B(0, 0) = (b_cur - z) / a_cur;
    B(0, 1) = -std::conj(a_prev) / a_cur;
    B(1, 0) = Complex(1.0, 0.0);
    B(1, 1) = Complex(0.0, 0.0);
    P = (B * P).eval();
    const Real s = P.cwiseAbs().maxCoeff();
    if (!(s > 0.0) || !std::isfinite(s))
      throw std::runtime_error("cocycle product collapsed or overflowed");
    P /= s;
    const Real step_log = std::log(s);
    total += step_log;
    ++counted;
    const int blk = static_cast<int>(((k - 1) * blocks) / total_steps);
    block_total[blk] += step_log;
    ++block_count[blk];
    if (opt.keep_trace && (counted % stride == 0 || k == total_steps))
      res.log_growth_trace.push_back(total / static_cast<Real>(counted));
  }

  if (res.skipped > opt.skip_fraction_limit * static_cast<Real>(total_steps))
    throw degenerate_orbit_error(res.skipped, total_steps);
  if (counted == 0) throw degenerate_orbit_error(res.skipped, total_steps);

  res.steps = counted;
  res.raw_estimate = total / static_cast<Real>(counted);
  res.le_estimate = std::max(0.0, res.raw_estimate);

  int used = 0;
  Real mean = 0.0;
  std::vector<Real> rates;
  rates.reserve(blocks);
  for (int b = 0; b < blocks; ++b) {
    if (block_count[b] == 0) continue;
    rates.push_back(block_total[b] / static_cast<Real>(block_count[b]));
    mean += rates.back();
    ++used;
  }
  if (used > 1) {
    mean /= used;
    Real var = 0.0;
    for (Real r : rates) var += (r - mean) * (r - mean);
    var /= (used - 1);
    res.stderr_estimate = std::sqrt(var / used);
  }
  return res;
}

CocycleResult lyapunov_exponent(const HarperModel& model, Complex z, Index steps,
                                const LyapunovOptions& opt) {
  if (steps < 1) throw std::invalid_argument("step count must be positive");
  return lyapunov_exponent(coefficients(model, 0, steps + 1), z, opt);
}

std::vector<LyapunovPoint> lyapunov_curve(const CoefficientWindow& window,
                                          std::span<const Complex> energies,
                                          const LyapunovOptions& options) {
  std::vector<LyapunovPoint> out(energies.size());
  parallel_for(static_cast<Index>(energies.size()), [&](Index i) {
    out[i].z = energies[i];
    try {
      out[i].result = lyapunov_exponent(window, energies[i], options);
    } catch (const std::exception& e) {
      out[i].error = e.what();
    }
  });
  return out;
}

std::vector<LyapunovPoint> lyapunov_curve(const HarperModel& model,
                                          std::span<const Complex> energies, Index steps,
                                          const LyapunovOptions& options) {
  if (steps < 1) throw std::invalid_argument("step count must be positive");
  const CoefficientWindow w = coefficients(model, 0, steps + 1);
  return lyapunov_curve(w, energies, options);
}

SolutionWindow propagate_solution(const CoefficientWindow& w, Complex z, Complex psi0,
                                  Complex psi1, Direction direction) {
  const Index n = w.size();
  if (n < 2) throw std::invalid_argument("window too short to propagate");
  SolutionWindow s;
  s.start_index = w.start_index;
  s.values.resize(n);

  if (direction == Direction::forward) {
    s.values[0] = psi0;
    s.values[1] = psi1;
    // psi_{k+1} = ((z - b_k) psi_k - conj(a_{k-1}) psi_{k-1}) / a_k
    for (Index k = 1; k + 1 < n; ++k) {
      const Real mag = std::abs(w.a[k]);
      if (mag <= kSingularThreshold) throw singular_step_error(w.start_index + k, mag);
      s.values[k + 1] =
          ((z - w.b[k]) * s.values[k] - std::conj(w.a[k - 1]) * s.values[k - 1]) / w.a[k];
    }
  } else {
    s.values[n - 2] = psi0;
    s.values[n - 1] = psi1;
    // psi_{k-1} = ((z - b_k) psi_k - a_k psi_{k+1}) / conj(a_{k-1})
    for (Index k = n - 2; k >= 1; --k) {
      const Real mag = std::abs(w.a[k - 1]);
      if (mag <= kSingularThreshold) throw singular_step_error(w.start_index + k - 1, mag);
      s.values[k - 1] =
          ((z - w.b[k]) * s.values[k] - w.a[k] * s.values[k + 1]) / std::conj(w.a[k - 1]);
    }
  }
  return s;
}

Complex wronskian(const SolutionWindow& u, const SolutionWindow& v, Index n) {
  if (!u.contains(n) || !u.contains(n + 1) || !v.contains(n) || !v.contains(n + 1))
    throw std::out_of_range("wronskian index outside the solution windows");
  return u.at(n) * v.at(n + 1) - u.at(n + 1) * v.at(n);
}

}  // namespace harper
