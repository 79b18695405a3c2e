#pragma once

namespace csgeo::tol {

// Geometric degeneracy thresholds.
inline constexpr double kSphere = 1e-9;            // | |z| - 1 | for on-sphere checks
inline constexpr double kTangent = 1e-9;           // |<X,z>| for tangency checks
inline constexpr double kDegenerateMetric = 1e-14; // EG - F^2 lower bound
inline constexpr double kContactAngleZero = 1e-8;  // sin(beta) below this is fatal
inline constexpr double kAlphaDegenerate = 1e-8;   // sin(alpha) below this: no e3/e4
inline constexpr double kLegendrian = 1e-8;        // |cos(beta)| below this: Legendrian gauge
inline constexpr double kCosAlphaTie = 1e-12;      // |cos(alpha)| tie-break threshold
inline constexpr double kTrigGuard = 1e-6;         // per-identity sin/cos guard
inline constexpr double kGaugeFlip = 0.5;          // aligned-frame mismatch above this is fatal

// Gates for identities with structural preconditions.
inline constexpr double kMinimalGate = 1e-4;       // max |H| for "minimal"
inline constexpr double kConstBetaGate = 1e-6;     // max |grad beta| for "constant beta"
inline constexpr double kDiagonalGauge = 1e-6;     // max |b| for the diagonal gauge
inline constexpr double kConstAGate = 1e-6;        // max |grad a| for "constant a"
inline constexpr double kFlatGate = 1e-3;          // max |K| for "flat"
inline constexpr double kAlphaRangeSlack = 1e-3;   // slack past pi/2 before AlphaOutOfRange

// Reconstruction.
inline constexpr double kNegativeDiscriminant = 1e-12; // f < -this is an error flag
inline constexpr double kSolverResidual = 1e-12;       // Codazzi residuals at a solved branch
inline constexpr double kCompatGate = 1e-8;            // ||[A,B] + cB|| gate for the exp path
inline constexpr double kPathIndependence = 1e-6;      // u-then-v vs v-then-u disagreement
inline constexpr double kReorthoDrift = 1e-12;         // ||F F^T - I|| that triggers reorthonormalization
inline constexpr double kFrameOrthogonality = 1e-10;   // invariant on integrated frames

}  // namespace csgeo::tol
