#pragma once

#include <complex>
#include <cstdint>

namespace harper {

using Real = double;
using Complex = std::complex<double>;
using Index = std::int64_t;

inline constexpr Real kTwoPi = 6.28318530717958647692528676655900577;

// Hopping coefficients with |a_n| at or below this value are treated as singular.
inline constexpr Real kSingularThreshold = 1e-12;

// Tie-break tolerance shared by region classification and the closed-form case tables.
inline constexpr Real kRegionTol = 1e-9;

// Frequency (sqrt(5)-1)/2, the default choice satisfying a Diophantine condition.
inline constexpr Real kGoldenMean = 0.61803398874989484820458683436563811772;

// Deterministic generic phase (sqrt(2)-1) used by checks that need a fixed orbit.
inline constexpr Real kDefaultTheta = 0.41421356237309504880168872420969808;

inline Real golden_mean() { return kGoldenMean; }

}  // namespace harper
