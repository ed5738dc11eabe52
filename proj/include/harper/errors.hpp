#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace harper {

// Division by a hopping coefficient whose modulus is at or below the singular threshold.
class singular_step_error : public std::runtime_error {
 public:
  singular_step_error(std::int64_t index, double magnitude)
      : std::runtime_error("singular hopping coefficient at index " + std::to_string(index) +
                           " (|a| = " + std::to_string(magnitude) + ")"),
        index_(index),
        magnitude_(magnitude) {}

  std::int64_t index() const noexcept { return index_; }
  double magnitude() const noexcept { return magnitude_; }

 private:
  std::int64_t index_;
  double magnitude_;
};

// An iterative estimate ran out of budget before reaching the requested tolerance.
// Carries the best estimate and the achieved error bound.
class accuracy_error : public std::runtime_error {
 public:
  accuracy_error(const std::string& what, double best_estimate, double error_bound)
      : std::runtime_error(what + " (best estimate " + std::to_string(best_estimate) +
                           ", error bound " + std::to_string(error_bound) + ")"),
        best_estimate_(best_estimate),
        error_bound_(error_bound) {}

  double best_estimate() const noexcept { return best_estimate_; }
  double error_bound() const noexcept { return error_bound_; }

 private:
  double best_estimate_;
  double error_bound_;
};

// Too many singular steps along an orbit for a meaningful cocycle average.
class degenerate_orbit_error : public std::runtime_error {
 public:
  degenerate_orbit_error(std::int64_t skipped, std::int64_t total)
      : std::runtime_error("degenerate orbit: " + std::to_string(skipped) + " of " +
                           std::to_string(total) + " steps singular"),
        skipped_(skipped),
        total_(total) {}

  std::int64_t skipped() const noexcept { return skipped_; }
  std::int64_t total() const noexcept { return total_; }

 private:
  std::int64_t skipped_;
  std::int64_t total_;
};

// Requested a closed-form value outside its supported coupling regions.
class unsupported_region_error : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

}  // namespace harper
