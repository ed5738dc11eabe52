#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <complex>
#include <random>
#include <stdexcept>
#include <vector>

#include "harper/cocycle.hpp"
#include "harper/errors.hpp"
#include "harper/model.hpp"
#include "harper/spectrum.hpp"
#include "oracles.hpp"

using namespace harper;

namespace {

// Log spectral radius of a 2x2 matrix via the quadratic formula, the exact
// Lyapunov exponent of a constant cocycle.
Real log_spectral_radius(const TransferMatrix& B) {
  const Complex tr = B(0, 0) + B(1, 1);
  const Complex det = B(0, 0) * B(1, 1) - B(0, 1) * B(1, 0);
  const Complex root = std::sqrt(tr * tr - 4.0 * det);
  const Real r1 = std::abs((tr + root) / 2.0);
  const Real r2 = std::abs((tr - root) / 2.0);
  return std::log(std::max(r1, r2));
}

}  // namespace

TEST_CASE("transfer matrix pinned entries") {
  const TransferMatrix free_E0 = transfer_matrix(1.0, 1.0, 0.0, 0.0);
  CHECK(std::abs(free_E0(0, 0)) == 0.0);
  CHECK(std::abs(free_E0(0, 1) - Complex(-1.0, 0.0)) == 0.0);
  CHECK(std::abs(free_E0(1, 0) - Complex(1.0, 0.0)) == 0.0);
  CHECK(std::abs(free_E0(1, 1)) == 0.0);

  const TransferMatrix B = transfer_matrix(1.0, 1.0, 2.0, 1.0);
  CHECK(std::abs(B(0, 0) - Complex(1.0, 0.0)) == 0.0);
  CHECK(std::abs(B(0, 1) - Complex(-1.0, 0.0)) == 0.0);

  const Complex det = transfer_matrix(Complex(0.0, 2.0), 1.0, 0.0, 0.0).determinant();
  CHECK(std::abs(det - Complex(0.0, -2.0)) <= 1e-15);

  CHECK_THROWS_AS(transfer_matrix(1.0, Complex(0.0, 0.0), 0.0, 0.0), singular_step_error);
  CHECK_THROWS_AS(transfer_matrix(1.0, Complex(1e-13, 0.0), 0.0, 0.0), singular_step_error);
}

TEST_CASE("transfer matrix determinant identity over random inputs") {
  std::mt19937_64 rng(0x5eed1001);
  for (int k = 0; k < 10000; ++k) {
    const Complex a_prev = std::polar(oracle::uniform(rng, 0.1, 2.0),
                                      oracle::uniform(rng, 0.0, kTwoPi));
    const Complex a_cur = std::polar(oracle::uniform(rng, 0.1, 2.0),
                                     oracle::uniform(rng, 0.0, kTwoPi));
    const Real b = oracle::uniform(rng, -3.0, 3.0);
    const Complex z(oracle::uniform(rng, -3.0, 3.0), oracle::uniform(rng, -1.0, 1.0));
    const Complex expected = std::conj(a_prev) / a_cur;
    const Complex det = transfer_matrix(a_prev, a_cur, b, z).determinant();
    CAPTURE(k);
    CHECK(std::abs(det - expected) <= 1e-12 * std::abs(expected));
  }
}

TEST_CASE("constant cocycle reproduces the closed-form growth rate") {
  const auto window = constant_window(0, 100001, Complex(1.0, 0.0), 0.0);

  SUBCASE("hyperbolic real energy") {
    const auto r = lyapunov_exponent(window, Complex(3.0, 0.0));
    CHECK(std::abs(r.le_estimate - std::log((3.0 + std::sqrt(5.0)) / 2.0)) <= 1e-4);
    CHECK(r.steps == 100000);
    CHECK(r.skipped == 0);
  }

  SUBCASE("off-axis energy") {
    const auto r = lyapunov_exponent(window, Complex(0.0, 3.0));
    CHECK(std::abs(r.le_estimate - std::log((3.0 + std::sqrt(13.0)) / 2.0)) <= 1e-4);
  }

  SUBCASE("elliptic energies give zero growth") {
    for (const Real E : {0.0, 1.0, -1.3}) {
      const auto r = lyapunov_exponent(window, Complex(E, 0.0));
      CAPTURE(E);
      CHECK(r.le_estimate <= 1e-3);
      CHECK(r.le_estimate >= 0.0);
      CHECK(r.le_estimate == std::max(0.0, r.raw_estimate));
    }
  }

  SUBCASE("band edge grows polynomially, rate still tends to zero") {
    const auto r = lyapunov_exponent(window, Complex(2.0, 0.0));
    CHECK(r.le_estimate <= 2e-3);
  }
}

TEST_CASE("constant cocycle matches the 2x2 spectral radius oracle") {
  std::mt19937_64 rng(0x5eed1002);
  for (int k = 0; k < 20; ++k) {
    const Complex a = std::polar(oracle::uniform(rng, 0.3, 1.5),
                                 oracle::uniform(rng, 0.0, kTwoPi));
    const Real b = oracle::uniform(rng, -2.0, 2.0);
    const Complex z(oracle::uniform(rng, -3.0, 3.0), oracle::uniform(rng, 0.5, 1.5));
    const auto window = constant_window(0, 100001, a, b);
    const auto r = lyapunov_exponent(window, z);
    const Real expected = log_spectral_radius(transfer_matrix(a, a, b, z));
    CAPTURE(k);
    CHECK(std::abs(r.le_estimate - expected) <= 2e-4);
  }
}

TEST_CASE("exponent at a truncation eigenvalue of the nearest-neighbor chain") {
  // Half-strength hopping, no cross terms: the exponent on the spectrum is log 2.
  const HarperModel model(Coupling(0, 0.5, 0), golden_mean(), 0.4);
  const auto op = truncate(model, 500);
  const auto evals = eigenvalues_sturm(gauge_to_real(op).op);
  for (const Index idx : {Index(50), Index(250), Index(450)}) {
    const auto r = lyapunov_exponent(model, Complex(evals[idx], 0.0), 100000);
    CAPTURE(idx);
    CHECK(std::abs(r.le_estimate - std::log(2.0)) <= 0.02);
  }
}

TEST_CASE("exponent off the real axis dominates the on-axis value") {
  const HarperModel model(Coupling(0.3, 0.5, 0.2), golden_mean(), kDefaultTheta);
  for (int i = 0; i < 21; ++i) {
    const Real E = -3.0 + 6.0 * i / 20.0;
    const auto on_axis = lyapunov_exponent(model, Complex(E, 0.0), 30000);
    const auto off_axis = lyapunov_exponent(model, Complex(E, 0.5), 30000);
    CAPTURE(E);
    CHECK(off_axis.le_estimate >= on_axis.le_estimate - 2e-2);
  }
}

TEST_CASE("doubling the orbit moves the estimate within its error bars") {
  std::mt19937_64 rng(0x5eed1003);
  for (int k = 0; k < 20; ++k) {
    const HarperModel model(oracle::random_coupling(rng, 0.05, 1.2), golden_mean(),
                            oracle::uniform(rng, 0.0, 1.0));
    const Complex z(oracle::uniform(rng, -3.0, 3.0), 0.0);
    const auto r1 = lyapunov_exponent(model, z, 100000);
    const auto r2 = lyapunov_exponent(model, z, 200000);
    CAPTURE(k);
    CHECK(std::abs(r1.le_estimate - r2.le_estimate) <=
          3.0 * (r1.stderr_estimate + r2.stderr_estimate) + 1e-6);
  }
}

TEST_CASE("swapping the cross weights leaves the exponent curve unchanged") {
  const HarperModel direct(Coupling(0.3, 0.5, 0.2), golden_mean(), kDefaultTheta);
  const HarperModel swapped(Coupling(0.2, 0.5, 0.3), golden_mean(), kDefaultTheta);
  for (const Real E : {-2.4, -1.2, 0.0, 0.6, 1.8, 3.0}) {
    const auto r1 = lyapunov_exponent(direct, Complex(E, 0.0), 30000);
    const auto r2 = lyapunov_exponent(swapped, Complex(E, 0.0), 30000);
    CAPTURE(E);
    CHECK(std::abs(r1.le_estimate - r2.le_estimate) <= 2e-2);
  }
}

TEST_CASE("singular steps are skipped and counted") {
  auto make_window = [](const std::vector<Index>& zeros) {
    return sampled_window(
        0, 10001,
        [&zeros](Index n) {
          for (Index zi : zeros)
            if (n == zi) return Complex(0.0, 0.0);
          return Complex(1.0, 0.0);
        },
        [](Index) { return 0.0; });
  };

  SUBCASE("a few singular sites shift nothing") {
    const auto r = lyapunov_exponent(make_window({100, 200, 300}), Complex(3.0, 0.0));
    CHECK(r.skipped == 3);
    CHECK(r.steps == 9997);
    CHECK(std::abs(r.le_estimate - std::log((3.0 + std::sqrt(5.0)) / 2.0)) <= 5e-3);
  }

  SUBCASE("too many singular sites abort the average") {
    std::vector<Index> zeros;
    for (Index n = 100; n < 120; ++n) zeros.push_back(n);
    try {
      lyapunov_exponent(make_window(zeros), Complex(3.0, 0.0));
      FAIL("expected a degenerate orbit error");
    } catch (const degenerate_orbit_error& e) {
      CHECK(e.skipped() == 20);
      CHECK(e.total() == 10000);
    }
  }

  SUBCASE("raising the skip budget lets the same window through") {
    std::vector<Index> zeros;
    for (Index n = 100; n < 120; ++n) zeros.push_back(n);
    LyapunovOptions opt;
    opt.skip_fraction_limit = 0.01;
    const auto r = lyapunov_exponent(make_window(zeros), Complex(3.0, 0.0), opt);
    CHECK(r.skipped == 20);
    CHECK(r.steps == 9980);
  }
}

TEST_CASE("growth trace records partial averages") {
  const auto window = constant_window(0, 10001, Complex(1.0, 0.0), 0.0);
  LyapunovOptions opt;
  opt.keep_trace = true;
  opt.trace_stride = 1000;
  const auto r = lyapunov_exponent(window, Complex(3.0, 0.0), opt);
  REQUIRE(r.log_growth_trace.size() == 10);
  CHECK(r.log_growth_trace.back() == r.raw_estimate);
  // Partial averages of a constant hyperbolic cocycle settle monotonically fast;
  // every recorded point is already near the limit.
  for (const Real v : r.log_growth_trace)
    CHECK(std::abs(v - std::log((3.0 + std::sqrt(5.0)) / 2.0)) <= 1e-2);

  const auto bare = lyapunov_exponent(window, Complex(3.0, 0.0));
  CHECK(bare.log_growth_trace.empty());
}

TEST_CASE("input validation") {
  const HarperModel model(Coupling(0.3, 0.5, 0.2), golden_mean(), 0.1);
  CHECK_THROWS_AS(lyapunov_exponent(model, Complex(0.0, 0.0), 0), std::invalid_argument);
  CHECK_THROWS_AS(lyapunov_exponent(constant_window(0, 1, 1.0, 0.0), Complex(0.0, 0.0)),
                  std::invalid_argument);
}

TEST_CASE("curve evaluation matches pointwise evaluation") {
  const HarperModel model(Coupling(0.3, 0.5, 0.2), golden_mean(), kDefaultTheta);
  const std::vector<Complex> one{Complex(1.5, 0.0)};
  const auto curve = lyapunov_curve(model, one, 20000);
  REQUIRE(curve.size() == 1);
  REQUIRE(curve[0].result.has_value());
  CHECK(curve[0].error.empty());
  const auto direct = lyapunov_exponent(model, one[0], 20000);
  CHECK(curve[0].result->le_estimate == direct.le_estimate);
  CHECK(curve[0].result->stderr_estimate == direct.stderr_estimate);
}

TEST_CASE("free exponent curve is symmetric under energy negation") {
  const auto window = constant_window(0, 30001, Complex(1.0, 0.0), 0.0);
  std::vector<Complex> grid;
  for (int i = 0; i <= 10; ++i) grid.emplace_back(-3.0 + 0.6 * i, 0.0);
  const auto curve = lyapunov_curve(window, grid);
  REQUIRE(curve.size() == 11);
  for (int i = 0; i <= 5; ++i) {
    REQUIRE(curve[i].result.has_value());
    REQUIRE(curve[10 - i].result.has_value());
    CHECK(std::abs(curve[i].result->le_estimate - curve[10 - i].result->le_estimate) <= 2e-3);
  }
}

TEST_CASE("curve records per-energy failures without aborting") {
  const auto window = constant_window(0, 101, Complex(0.0, 0.0), 1.0);
  const std::vector<Complex> grid{Complex(0.0, 0.0), Complex(1.0, 0.0)};
  const auto curve = lyapunov_curve(window, grid);
  REQUIRE(curve.size() == 2);
  for (const auto& pt : curve) {
    CHECK_FALSE(pt.result.has_value());
    CHECK_FALSE(pt.error.empty());
  }
  CHECK(curve[1].z == Complex(1.0, 0.0));
}

TEST_CASE("solution propagation closed forms") {
  const auto window = constant_window(0, 6, Complex(1.0, 0.0), 0.0);

  SUBCASE("constant solution of the band-edge equation") {
    const auto s = propagate_solution(window, Complex(2.0, 0.0), 1.0, 1.0, Direction::forward);
    for (Index n = 0; n < 6; ++n) CHECK(std::abs(s.at(n) - Complex(1.0, 0.0)) <= 1e-14);
  }

  SUBCASE("linearly growing solution of the band-edge equation") {
    const auto s = propagate_solution(window, Complex(2.0, 0.0), 1.0, 2.0, Direction::forward);
    for (Index n = 0; n < 6; ++n)
      CHECK(std::abs(s.at(n) - Complex(static_cast<Real>(n + 1), 0.0)) <= 1e-13);
  }

  SUBCASE("the same solution reached backward") {
    const auto s = propagate_solution(window, Complex(2.0, 0.0), 5.0, 6.0, Direction::backward);
    for (Index n = 0; n < 6; ++n)
      CHECK(std::abs(s.at(n) - Complex(static_cast<Real>(n + 1), 0.0)) <= 1e-13);
  }

  SUBCASE("zero seed stays zero") {
    const auto s = propagate_solution(window, Complex(1.3, 0.2), 0.0, 0.0, Direction::forward);
    for (Index n = 0; n < 6; ++n) CHECK(std::abs(s.at(n)) == 0.0);
  }
}

TEST_CASE("propagation satisfies the recursion and is reversible") {
  const HarperModel model(Coupling(0.3, 0.5, 0.2), golden_mean(), 0.15);

  SUBCASE("three-term recursion residual") {
    const auto w = coefficients(model, -10, 40);
    const Complex z(0.4, 0.7);
    const auto s = propagate_solution(w, z, Complex(1.0, 0.0), Complex(0.3, -0.2),
                                      Direction::forward);
    CHECK(s.start_index == -10);
    Real scale = 0.0;
    for (Index n = -10; n < 30; ++n) scale = std::max(scale, std::abs(s.at(n)));
    for (Index n = -9; n < 29; ++n) {
      const Complex lhs = w.b_at(n) * s.at(n) + w.a_at(n) * s.at(n + 1) +
                          std::conj(w.a_at(n - 1)) * s.at(n - 1);
      CAPTURE(n);
      CHECK(std::abs(lhs - z * s.at(n)) <= 1e-10 * scale);
    }
  }

  SUBCASE("forward then backward reproduces the window") {
    // Mildly hyperbolic constant case: short enough that the downward pass
    // cannot amplify rounding past the tolerance.
    const auto w = constant_window(0, 10, Complex(1.0, 0.0), 0.0);
    const Complex z(2.2, 0.0);
    const auto fwd = propagate_solution(w, z, Complex(1.0, 0.5), Complex(-0.3, 0.1),
                                        Direction::forward);
    const auto back = propagate_solution(w, z, fwd.at(8), fwd.at(9), Direction::backward);
    Real scale = 0.0;
    for (Index n = 0; n < 10; ++n) scale = std::max(scale, std::abs(fwd.at(n)));
    for (Index n = 0; n < 10; ++n) CHECK(std::abs(back.at(n) - fwd.at(n)) <= 1e-10 * scale);
  }

  SUBCASE("elliptic quasi-periodic reversibility") {
    // Hopping-dominated model at an energy inside its absolutely continuous
    // spectrum: the solutions stay bounded, so the downward pass is stable.
    const auto w = coefficients(HarperModel(Coupling(0, 2, 0), golden_mean(), 0.2), 0, 40);
    const Complex z(0.5, 0.0);
    const auto fwd = propagate_solution(w, z, Complex(0.7, 0.0), Complex(0.1, 0.4),
                                        Direction::forward);
    const auto back = propagate_solution(w, z, fwd.at(38), fwd.at(39), Direction::backward);
    Real scale = 0.0;
    for (Index n = 0; n < 40; ++n) scale = std::max(scale, std::abs(fwd.at(n)));
    for (Index n = 0; n < 40; ++n) CHECK(std::abs(back.at(n) - fwd.at(n)) <= 1e-10 * scale);
  }

  SUBCASE("singular site on the path") {
    const auto w = sampled_window(
        0, 10, [](Index n) { return n == 5 ? Complex(0.0, 0.0) : Complex(1.0, 0.0); },
        [](Index) { return 0.0; });
    CHECK_THROWS_AS(propagate_solution(w, Complex(0.3, 0.0), 1.0, 0.5, Direction::forward),
                    singular_step_error);
  }
}

TEST_CASE("wronskian basics and conservation") {
  SUBCASE("pinned values") {
    SolutionWindow u;
    u.start_index = 0;
    u.values.resize(2);
    u.values << Complex(1.0, 0.0), Complex(0.0, 0.0);
    SolutionWindow v;
    v.start_index = 0;
    v.values.resize(2);
    v.values << Complex(0.0, 0.0), Complex(1.0, 0.0);
    CHECK(std::abs(wronskian(u, v, 0) - Complex(1.0, 0.0)) == 0.0);
    CHECK(std::abs(wronskian(u, u, 0)) == 0.0);
    CHECK(std::abs(wronskian(v, u, 0) + Complex(1.0, 0.0)) == 0.0);
    CHECK_THROWS_AS(wronskian(u, v, 1), std::out_of_range);
    CHECK_THROWS_AS(wronskian(u, v, -1), std::out_of_range);
  }

  SUBCASE("conservation along quasi-periodic windows") {
    const HarperModel model(Coupling(0.3, 0.5, 0.2), golden_mean(), 0.37);
    const auto w = coefficients(model, 0, 102);
    for (const Complex z : {Complex(0.7, 0.0), Complex(0.5, 0.8)}) {
      const auto u = propagate_solution(w, z, Complex(1.0, 0.0), Complex(0.3, -0.2),
                                        Direction::forward);
      const auto v = propagate_solution(w, z, Complex(0.2, 0.1), Complex(1.0, 0.0),
                                        Direction::forward);
      for (Index n = 1; n <= 100; ++n) {
        const Complex lhs = std::conj(w.a_at(n - 1)) * wronskian(u, v, n - 1);
        const Complex rhs = w.a_at(n) * wronskian(u, v, n);
        const Real scale = std::max(
            {std::abs(u.at(n)) * std::abs(v.at(n + 1)), std::abs(u.at(n + 1)) * std::abs(v.at(n)),
             std::abs(u.at(n - 1)) * std::abs(v.at(n)), std::abs(u.at(n)) * std::abs(v.at(n - 1)),
             1.0});
        CAPTURE(n);
        CAPTURE(z);
        CHECK(std::abs(lhs - rhs) <= 1e-12 * scale);
      }
    }
  }
}
