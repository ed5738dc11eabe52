#pragma once

#include <Eigen/Dense>
#include <vector>

#include "harper/common.hpp"
#include "harper/model.hpp"

namespace harper {

// Hermitian tridiagonal section: diagonal b_n, first superdiagonal a_n (the
// subdiagonal is its conjugate), n = start_index .. start_index + size - 1.
struct TridiagonalOperator {
  Index start_index = 0;
  Eigen::VectorXd diag;
  Eigen::VectorXcd offdiag;  // size() - 1 entries

  Index size() const { return diag.size(); }
  bool offdiag_is_real() const;
};

// Dirichlet truncation onto sites start .. start + N - 1.
TridiagonalOperator truncate(const HarperModel& model, Index N, Index start = 0);
TridiagonalOperator truncate(const CoefficientWindow& window);

struct GaugedOperator {
  TridiagonalOperator op;      // same diagonal, off-diagonal |a_n| >= 0
  Eigen::VectorXd phases;      // site rotations e^{i phase_n} realizing the gauge
};

// Diagonal unitary conjugation making the off-diagonal real nonnegative. Zero
// entries split the operator into blocks; the gauge continues through them.
GaugedOperator gauge_to_real(const TridiagonalOperator& op);

// Number of eigenvalues strictly below x, via the Sturm sign-count recursion.
// Requires a real off-diagonal (gauge first).
Index sturm_count(const TridiagonalOperator& op, Real x);

// All size() eigenvalues, ascending, each located by bisection on the Sturm count
// within Gerschgorin brackets. tol is the absolute bracket width target.
Eigen::VectorXd eigenvalues_sturm(const TridiagonalOperator& op, Real tol = 1e-10);

struct DosEstimate {
  Eigen::VectorXd eigenvalues;  // pooled, sorted, weight 1/(N*M) each
  Eigen::VectorXd bin_edges;    // bins + 1 edges spanning the padded hull
  Eigen::VectorXd masses;       // per-bin mass, sums to 1
  Index truncation_size = 0;    // N
  Index phase_count = 0;        // M
};

// Pools eigenvalues of the given sections with equal weight.
DosEstimate dos_from_operators(const std::vector<TridiagonalOperator>& ops, Index bins,
                               Real eig_tol = 1e-10);

// Integrated density of states from M phase draws theta_j = j/M, each truncated to N sites.
DosEstimate dos_estimate(const Coupling& coupling, Real alpha, Index N, Index M,
                         Index bins = 256);

// Right-continuous empirical distribution of the pooled eigenvalues.
Real dos_cdf(const DosEstimate& dos, Real energy);

// count energies drawn evenly by rank from the pooled eigenvalues.
Eigen::VectorXd spectrum_samples(const DosEstimate& dos, Index count);
Eigen::VectorXd spectrum_samples(const Coupling& coupling, Real alpha, Index N, Index M,
                                 Index count);

// Exact two-sample Kolmogorov distance between sorted pools.
Real kolmogorov_distance(const Eigen::VectorXd& sorted_a, const Eigen::VectorXd& sorted_b);

// Solves (T - z) x = rhs by tridiagonal LU (top-down elimination, no pivoting;
// intended for z off the real axis, where the pivots are bounded away from zero).
Eigen::VectorXcd solve_shifted_tridiagonal(const TridiagonalOperator& op, Complex z,
                                           const Eigen::VectorXcd& rhs);

}  // namespace harper
