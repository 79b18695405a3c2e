#pragma once

#include "csgeo/jets.hpp"
#include "csgeo/surface.hpp"

namespace csgeo {

/// Orthonormal frame (z, e1, e2, e3, e4, e5) adapted to the contact structure
/// along the surface, plus the auxiliary direction v = J e1 within the
/// surface's "contact shadow". Conventions:
///   - e1 spans the intersection of the tangent plane with the contact
///     distribution (the characteristic direction), sign fixed so that
///     cos(alpha) >= 0, ties broken so the shape coefficient a >= 0;
///   - e2 completes (e1, e2) to an oriented tangent basis;
///   - cos(beta) = <iz, e2>, cos(alpha) = <i e1, v>;
///   - e3, e4 span the first normal directions, e5 completes the frame.
struct AdaptedFrame {
  Complex3 z, e1, e2, v, e3, e4, e5;
  double beta = 0.0;
  double alpha = 0.0;
  bool legendrian_gauge = false;  // |cos beta| below tolerance; e1 taken along d/du
  bool alpha_degenerate = false;  // sin(alpha) below tolerance; e3, e4 undefined (zero)
};

/// Builds the adapted frame from a 2-jet. Throws ContactAngleZero when the
/// Reeb field is tangent to the surface and HolomorphicAngleDegenerate when
/// sin(alpha) vanishes (e3/e4 undefined). NotOnSphere / DegenerateMetric
/// propagate from the input checks.
AdaptedFrame adapted_frame(const Jet2& jet);

/// Same construction, but a degenerate holomorphic angle is reported through
/// the alpha_degenerate flag (with e3 = e4 = 0) instead of an exception.
AdaptedFrame adapted_frame_tolerant(const Jet2& jet);

/// Residuals of the algebraic relations every adapted frame satisfies.
struct FrameConsistency {
  double v_relation = 0.0;    // v = sin(b) e2 - cos(b) e5
  double iv_relation = 0.0;   // iv = sin(a) e4 - cos(a) e1
  double xi_relation = 0.0;   // iz = cos(b) e2 + sin(b) e5
  double ie1_relation = 0.0;  // ie1 = cos(a) sin(b) e2 + sin(a) e3 - cos(a) cos(b) e5
  double ie2_relation = 0.0;  // ie2 = -cos(b) z - cos(a) sin(b) e1 + sin(a) sin(b) e4
  double orthonormality = 0.0;
  double max() const;
};

FrameConsistency frame_consistency(const AdaptedFrame& f);

/// Coefficients (p, q) with w = p zu + q zv for a tangent vector w.
std::pair<double, double> tangent_coefficients(const Complex3& w, const Jet2& jet);

/// Flips the sign gauge of `f` (legs e1 and/or e2 with their companions) to
/// match `ref`, adjusting the stored angles. Returns the largest leg-wise
/// distance between the two frames after alignment.
double align_frame(AdaptedFrame& f, const AdaptedFrame& ref);

}  // namespace csgeo
