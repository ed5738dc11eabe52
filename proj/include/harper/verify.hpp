#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "harper/common.hpp"
#include "harper/model.hpp"

namespace harper {

// Outcome of one named cross-check: the same quantity measured two independent
// ways, with the worst discrepancy held against a pinned tolerance.
struct CheckReport {
  std::string name;
  std::map<std::string, Real> inputs;  // scalar parameters the check ran with
  std::vector<Real> measured;
  std::vector<Real> expected;          // same length as measured
  Real max_abs_residual = 0.0;
  Real tolerance = 0.0;
  bool passed = false;                 // always max_abs_residual <= tolerance
  Real runtime_seconds = 0.0;
  std::uint64_t seed = 0;              // stream seed for randomized draws, 0 if none
  std::string note;                    // free-form diagnostics (skip counts, errors)
};

// Registered check names, the default execution order, and the pinned default
// tolerance for each check.
const std::vector<std::string>& registered_checks();
const std::vector<std::string>& default_battery();
Real default_tolerance(const std::string& check);

// Shared budget for the check battery. Defaults are sized so the full default
// battery finishes in well under two minutes on a few cores.
struct VerificationConfig {
  Coupling coupling{0.3, 0.5, 0.2};
  Real alpha = golden_mean();
  Real theta = kDefaultTheta;
  Index truncation = 1000;    // sites per truncated operator (N)
  Index phases = 50;          // phase-grid resolution for eigenvalue pooling (M)
  Index steps = 100000;       // cocycle iteration count
  Index depth = 2000;         // continued-fraction recursion depth
  Index energy_count = 10;    // spectrum samples per exponent comparison
  std::map<std::string, Real> tolerances;       // per-check overrides (>= 0)
  std::vector<std::string> battery = default_battery();  // checks to run, in order
  std::string output_path;                      // consumed by the CLI, not here
  std::string format = "csv";                   // "csv" or "json", consumed by the CLI
};

// Throws std::invalid_argument naming every offending field (sizes must be
// positive, tolerances nonnegative, battery names registered, format known).
void validate_config(const VerificationConfig& config);

// Closed-form Lyapunov exponent on the spectrum, constant in energy.
// Region II: exactly zero. Region I: log((1+sqrt(1-4 l1 l3)) / (2 max(l1,l3)))
// when l2 <= l1+l3, and log((1+sqrt(1-4 l1 l3)) / (l2+sqrt(l2^2-4 l1 l3)))
// when l2 >= l1+l3; the two branches agree on the seam l2 = l1+l3.
// Region III has no known formula and throws unsupported_region_error.
Real closed_form_le(const Coupling& coupling, Real tol = kRegionTol);

// Measured Lyapunov exponents on spectrum samples versus closed_form_le.
// Propagates unsupported_region_error for region III couplings.
CheckReport closed_form_le_check(const Coupling& coupling, Real alpha, Index n_energies,
                                 Index steps, Index N, Index M, Real tolerance = -1.0);

// Cocycle exponent at E versus the log-potential of the pooled eigenvalue
// distribution minus the hopping log-mean. Pool members closer to E than 1e-8
// are excluded from the log sum and counted in the note.
CheckReport thouless_check(const Coupling& coupling, Real alpha, Complex E, Index N, Index M,
                           Index steps, Real tolerance = -1.0);

// Kolmogorov distance between the eigenvalue distribution of the coupling and
// the l2-rescaled distribution of its dual.
CheckReport duality_dos_check(const Coupling& coupling, Real alpha, Index N, Index M,
                              Real tolerance = -1.0);

// Exponent curves for (l1,l2,l3) and (l3,l2,l1) on matched spectrum samples.
CheckReport lambda_swap_check(const Coupling& coupling, Real alpha, Index n_energies,
                              Index steps, Index N, Index M, Real tolerance = -1.0);

// Runs one registered check under the shared budget. Throws
// std::invalid_argument for unknown names; computational failures propagate.
CheckReport run_check(const std::string& name, const VerificationConfig& config);

// Runs the configured battery in order. Individual check failures (thrown or
// out of tolerance) are recorded in the returned reports, never rethrown.
// Expensive eigenvalue pools are shared between checks within one call.
std::vector<CheckReport> full_report(const VerificationConfig& config);

}  // namespace harper
