#pragma once

#include <utility>
#include <vector>

#include "csgeo/jets.hpp"

namespace csgeo {

/// First fundamental form at a point.
struct Metric2 {
  double E = 0.0, F = 0.0, G = 0.0;
  double det() const { return E * G - F * F; }
};

/// Coefficients of the induced metric. Throws DegenerateMetric when
/// EG - F^2 falls below tolerance.
Metric2 first_fundamental(const Jet2& jet);

/// Trace of the second fundamental form of the surface in S^5:
/// g^{ij} P(z_ij) with P the projection onto the normal space inside the
/// sphere's tangent space. Vanishes exactly for minimal immersions.
Complex3 mean_curvature_vector(const Jet2& jet);

/// Rectangular parameter grid, row-major with u as the slow index.
/// On a periodic axis the points cover [x0, x0 + extent) with spacing
/// extent/n; on a non-periodic axis they cover [x0, x0 + extent] with
/// spacing extent/(n-1).
struct GridSpec {
  int nu = 0, nv = 0;
  double u0 = 0.0, v0 = 0.0;
  double extent_u = 0.0, extent_v = 0.0;
  bool periodic_u = true, periodic_v = true;

  double hu() const { return periodic_u ? extent_u / nu : extent_u / (nu - 1); }
  double hv() const { return periodic_v ? extent_v / nv : extent_v / (nv - 1); }
  double u(int i) const { return u0 + i * hu(); }
  double v(int j) const { return v0 + j * hv(); }
  int index(int i, int j) const { return i * nv + j; }
  int size() const { return nu * nv; }
  bool same_shape(const GridSpec& o) const;
};

/// One scalar sampled over a grid. Points where a quantity is undefined hold
/// quiet NaN and are skipped by the reductions below.
struct ScalarField {
  GridSpec grid;
  std::vector<double> values;

  ScalarField() = default;
  explicit ScalarField(const GridSpec& g, double fill = 0.0)
      : grid(g), values(static_cast<std::size_t>(g.size()), fill) {}

  double& at(int i, int j) { return values[static_cast<std::size_t>(grid.index(i, j))]; }
  double at(int i, int j) const { return values[static_cast<std::size_t>(grid.index(i, j))]; }
};

/// Second-order finite differences: centered in the interior, wrapped on
/// periodic axes, one-sided (still second order) at open edges.
ScalarField d_du(const ScalarField& f);
ScalarField d_dv(const ScalarField& f);
ScalarField d2_duu(const ScalarField& f);
ScalarField d2_dvv(const ScalarField& f);
ScalarField d2_dudv(const ScalarField& f);

/// Metric coefficients over a grid.
struct MetricGrid {
  ScalarField E, F, G;
};

/// Laplace-Beltrami operator in divergence form,
/// (1/sqrt(g)) d_i ( sqrt(g) g^{ij} d_j f ). Throws GridMismatch when the
/// field and metric grids disagree.
ScalarField surface_laplacian(const ScalarField& f, const MetricGrid& metric);

/// Intrinsic Gauss curvature from E, F, G alone (Brioschi formula).
ScalarField gauss_curvature_intrinsic(const MetricGrid& metric);

/// Tangent-frame coefficient fields: e_k = p_k d/du + q_k d/dv for k = 1, 2.
struct FrameCoefficients {
  ScalarField p1, q1, p2, q2;
};

/// Directional derivatives of f along the frame legs: (df(e1), df(e2)).
std::pair<ScalarField, ScalarField> frame_directional_derivatives(
    const ScalarField& f, const FrameCoefficients& coeffs);

/// Largest |value| over defined points; 0 when every point is NaN.
double field_max_abs(const ScalarField& f);
/// Mean of |value| over defined points; 0 when every point is NaN.
double field_mean_abs(const ScalarField& f);
/// Number of NaN entries.
int field_undefined_count(const ScalarField& f);

}  // namespace csgeo
