#pragma once

namespace hsm {

// Constants pinned from the calibration sweeps (`hsmoney run fixed-point-calibration`,
// `hsmoney run hybrid-calibration`, `hsmoney run amplify-calibration`).

/// c in 1 − exp(−c·T·ε²) for the measurement-alternation fixed-point search.
inline constexpr double kFixedPointC = 1.5;

/// K in queries ≤ K·log(1/δ)/(ε·δ²) for hybrid_search.
inline constexpr double kHybridK = 400.0;

/// K in queries ≤ K·log(1/δ)/(√ε(√ε + δ²)) for amplify_counterfeiter.
inline constexpr double kAmplifyK = 4.0;

}  // namespace hsm
