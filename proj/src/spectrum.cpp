#include "harper/spectrum.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "harper/parallel.hpp"

namespace harper {

bool TridiagonalOperator::offdiag_is_real() const {
  for (Index i = 0; i < offdiag.size(); ++i)
    if (offdiag[i].imag() != 0.0) return false;
  return true;
}

TridiagonalOperator truncate(const HarperModel& model, Index N, Index start) {
  if (N < 1) throw std::invalid_argument("truncation size must be positive");
  return truncate(coefficients(model, start, N));
}

TridiagonalOperator truncate(const CoefficientWindow& w) {
  if (w.size() < 1) throw std::invalid_argument("empty coefficient window");
  TridiagonalOperator op;
  op.start_index = w.start_index;
  op.diag = w.b;
  op.offdiag = w.a.head(w.size() - 1);
  return op;
}

GaugedOperator gauge_to_real(const TridiagonalOperator& op) {
  GaugedOperator g;
  g.op.start_index = op.start_index;
  g.op.diag = op.diag;
  g.op.offdiag.resize(op.offdiag.size());
  g.phases = Eigen::VectorXd::Zero(op.size());
  Real phi = 0.0;
  for (Index i = 0; i < op.offdiag.size(); ++i) {
    g.phases[i] = phi;
    const Real mag = std::abs(op.offdiag[i]);
    g.op.offdiag[i] = Complex(mag, 0.0);
    // e^{i phi_n} a_n e^{-i phi_{n+1}} = |a_n|; blocks split by a zero entry keep
    // the running phase, which leaves each block gauged independently.
    if (mag > 0.0) phi += std::arg(op.offdiag[i]);
  }
  if (op.size() > 0) g.phases[op.size() - 1] = phi;
  return g;
}

namespace {

void require_real_offdiag(const TridiagonalOperator& op) {
  if (!op.offdiag_is_real())
    throw std::invalid_argument("operator has a complex off-diagonal; gauge_to_real first");
}

Index count_below(const Eigen::VectorXd& d, const Eigen::VectorXd& e2, Real pivmin, Real x) {
  // Nonpositive pivots are counted and near-zero ones forced to -pivmin before
  // the next division; a pivot of exactly zero marks an eigenvalue of a leading
  // section sitting at x and must not be dropped from the count.
  Index count = 0;
  Real q = d[0] - x;
  if (std::abs(q) < pivmin) q = -pivmin;
  if (q <= 0.0) ++count;
  for (Index i = 1; i < d.size(); ++i) {
    q = (d[i] - x) - e2[i - 1] / q;
    if (std::abs(q) < pivmin) q = -pivmin;
    if (q <= 0.0) ++count;
  }
  return count;
}

}  // namespace

Index sturm_count(const TridiagonalOperator& op, Real x) {
  require_real_offdiag(op);
  const Index n = op.size();
  Eigen::VectorXd e2(std::max<Index>(0, n - 1));
  Real max_e2 = 0.0;
  for (Index i = 0; i + 1 < n; ++i) {
    e2[i] = op.offdiag[i].real() * op.offdiag[i].real();
    max_e2 = std::max(max_e2, e2[i]);
  }
  const Real eps = std::numeric_limits<Real>::epsilon();
  const Real pivmin = std::max(std::numeric_limits<Real>::min() / eps, max_e2 * eps * eps);
  return count_below(op.diag, e2, pivmin, x);
}

Eigen::VectorXd eigenvalues_sturm(const TridiagonalOperator& op, Real tol) {
  require_real_offdiag(op);
  if (!(tol > 0.0)) throw std::invalid_argument("bisection tolerance must be positive");
  const Index n = op.size();
  Eigen::VectorXd e2(std::max<Index>(0, n - 1));
  Real max_e2 = 0.0;
  for (Index i = 0; i + 1 < n; ++i) {
    e2[i] = op.offdiag[i].real() * op.offdiag[i].real();
    max_e2 = std::max(max_e2, e2[i]);
  }
  const Real eps = std::numeric_limits<Real>::epsilon();
  const Real pivmin = std::max(std::numeric_limits<Real>::min() / eps, max_e2 * eps * eps);

  // Gerschgorin bracket for the whole spectrum.
  Real lo = std::numeric_limits<Real>::infinity();
  Real hi = -lo;
  for (Index i = 0; i < n; ++i) {
    Real radius = 0.0;
    if (i > 0) radius += std::abs(op.offdiag[i - 1].real());
    if (i + 1 < n) radius += std::abs(op.offdiag[i].real());
    lo = std::min(lo, op.diag[i] - radius);
    hi = std::max(hi, op.diag[i] + radius);
  }
  const Real pad = tol + eps * std::max(std::abs(lo), std::abs(hi));
  lo -= pad;
  hi += pad;

  Eigen::VectorXd eigs(n);
  for (Index k = 0; k < n; ++k) {
    Real a = lo, b = hi;
    // Invariant: count(a) <= k < count(b); the k-th eigenvalue lies in (a, b].
    while (b - a > tol + eps * std::max(std::abs(a), std::abs(b))) {
      const Real mid = 0.5 * (a + b);
      if (count_below(op.diag, e2, pivmin, mid) > k)
        b = mid;
      else
        a = mid;
    }
    eigs[k] = 0.5 * (a + b);
    lo = a;  // eigenvalues are extracted in ascending order
  }
  return eigs;
}

DosEstimate dos_from_operators(const std::vector<TridiagonalOperator>& ops, Index bins,
                               Real eig_tol) {
  if (ops.empty()) throw std::invalid_argument("no operators to pool");
  if (bins < 1) throw std::invalid_argument("bin count must be positive");
  const Index N = ops.front().size();
  for (const auto& op : ops)
    if (op.size() != N) throw std::invalid_argument("pooled operators must share one size");

  const Index M = static_cast<Index>(ops.size());
  DosEstimate dos;
  dos.truncation_size = N;
  dos.phase_count = M;
  dos.eigenvalues.resize(N * M);

  parallel_for(M, [&](Index j) {
    const GaugedOperator g = gauge_to_real(ops[static_cast<size_t>(j)]);
    dos.eigenvalues.segment(j * N, N) = eigenvalues_sturm(g.op, eig_tol);
  });
  std::sort(dos.eigenvalues.data(), dos.eigenvalues.data() + dos.eigenvalues.size());

  const Real lo = dos.eigenvalues[0] - 0.1;
  const Real hi = dos.eigenvalues[N * M - 1] + 0.1;
  dos.bin_edges.resize(bins + 1);
  for (Index i = 0; i <= bins; ++i)
    dos.bin_edges[i] = lo + (hi - lo) * static_cast<Real>(i) / static_cast<Real>(bins);

  Eigen::VectorXd counts = Eigen::VectorXd::Zero(bins);
  const Real width = (hi - lo) / static_cast<Real>(bins);
  for (Index i = 0; i < N * M; ++i) {
    Index b = static_cast<Index>((dos.eigenvalues[i] - lo) / width);
    b = std::clamp<Index>(b, 0, bins - 1);
    counts[b] += 1.0;
  }
  dos.masses = counts / static_cast<Real>(N * M);
  return dos;
}

DosEstimate dos_estimate(const Coupling& coupling, Real alpha, Index N, Index M, Index bins) {
  if (N < 1 || M < 1) throw std::invalid_argument("N and M must be positive");
  std::vector<TridiagonalOperator> ops(static_cast<size_t>(M));
  for (Index j = 0; j < M; ++j) {
    const Real theta = static_cast<Real>(j) / static_cast<Real>(M);
    ops[static_cast<size_t>(j)] = truncate(HarperModel(coupling, alpha, theta), N, 0);
  }
  return dos_from_operators(ops, bins);
}

Real dos_cdf(const DosEstimate& dos, Real energy) {
  const auto& ev = dos.eigenvalues;
  const Index n = ev.size();
  if (n == 0) throw std::invalid_argument("empty eigenvalue pool");
  const Index k = std::upper_bound(ev.data(), ev.data() + n, energy) - ev.data();
  return static_cast<Real>(k) / static_cast<Real>(n);
}

Eigen::VectorXd spectrum_samples(const DosEstimate& dos, Index count) {
  const Index pool = dos.eigenvalues.size();
  if (count < 1 || count > pool)
    throw std::invalid_argument("sample count must lie in [1, pool size]");
  Eigen::VectorXd out(count);
  for (Index k = 0; k < count; ++k) {
    const Index rank = std::min<Index>(pool - 1, (2 * k + 1) * pool / (2 * count));
    out[k] = dos.eigenvalues[rank];
  }
  return out;
}

Eigen::VectorXd spectrum_samples(const Coupling& coupling, Real alpha, Index N, Index M,
                                 Index count) {
  return spectrum_samples(dos_estimate(coupling, alpha, N, M), count);
}

Real kolmogorov_distance(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
  const Index na = a.size(), nb = b.size();
  if (na == 0 || nb == 0) throw std::invalid_argument("empty sample in distance");
  Real d = 0.0;
  Index i = 0, j = 0;
  while (i < na && j < nb) {
    // Consume every copy of the smallest unprocessed value from both pools
    // before comparing; evaluating inside a run of ties would compare the CDFs
    // at a point that is not a valid sup location.
    const Real v = std::min(a[i], b[j]);
    while (i < na && a[i] == v) ++i;
    while (j < nb && b[j] == v) ++j;
    d = std::max(d, std::abs(static_cast<Real>(i) / na - static_cast<Real>(j) / nb));
  }
  return d;
}

Eigen::VectorXcd solve_shifted_tridiagonal(const TridiagonalOperator& op, Complex z,
                                           const Eigen::VectorXcd& rhs) {
  const Index n = op.size();
  if (rhs.size() != n) throw std::invalid_argument("right-hand side size mismatch");
  Eigen::VectorXcd u(n), y(n);
  u[0] = op.diag[0] - z;
  y[0] = rhs[0];
  for (Index i = 1; i < n; ++i) {
    if (u[i - 1] == Complex(0.0, 0.0)) throw std::runtime_error("zero pivot in tridiagonal solve");
    const Complex l = std::conj(op.offdiag[i - 1]) / u[i - 1];
    u[i] = (op.diag[i] - z) - l * op.offdiag[i - 1];
    y[i] = rhs[i] - l * y[i - 1];
  }
  Eigen::VectorXcd x(n);
  if (u[n - 1] == Complex(0.0, 0.0)) throw std::runtime_error("zero pivot in tridiagonal solve");
  x[n - 1] = y[n - 1] / u[n - 1];
  for (Index i = n - 2; i >= 0; --i) x[i] = (y[i] - op.offdiag[i] * x[i + 1]) / u[i];
  return x;
}

}  // namespace harper
