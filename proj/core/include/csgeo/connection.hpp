#pragma once

#include <string>
#include <vector>

#include "csgeo/frames.hpp"

namespace csgeo {

/// Connection forms of the adapted frame measured at one point, expanded in
/// the tangent coframe: theta_j^k = coeff[j][k][0] theta^1 + coeff[j][k][1]
/// theta^2. Row/column 0 is the position row z; rows 1..5 are e1..e5.
struct ConnectionTable {
  double coeff[6][6][2] = {};

  // Shape coefficients of theta_1^3 = a theta^1 + b theta^2.
  double a = 0.0, b = 0.0;

  // Angles at the center point and their frame-directional derivatives.
  double alpha = 0.0, beta = 0.0;
  double alpha1 = 0.0, alpha2 = 0.0;
  double beta1 = 0.0, beta2 = 0.0;

  bool legendrian_gauge = false;

  // Quality measures of the stencil differencing.
  double antisymmetry = 0.0;   // max |theta_j^k + theta_k^j|
  double ii_symmetry = 0.0;    // max |theta_1^k(e2) - theta_2^k(e1)|, k normal
  double alignment = 0.0;      // worst stencil-to-center frame distance
  double h = 0.0;
  bool richardson = false;

  double theta(int j, int k, int i) const { return coeff[j][k][i]; }
};

struct ConnectionOptions {
  double h = 1e-4;
  bool richardson = true;
};

/// Measures the connection table by central differencing of the adapted frame
/// field around (u, v), with optional Richardson extrapolation (h and h/2).
/// Stencil frames are sign-aligned to the center frame; GaugeFlip is raised
/// when alignment fails. Frame construction errors propagate.
ConnectionTable connection_table(const JetEvaluator& surf, double u, double v,
                                 const ConnectionOptions& options = {});

/// Same measurement, but the center frame is first sign-aligned to
/// `reference` so the table is expressed in the caller's gauge.
ConnectionTable connection_table(const JetEvaluator& surf, double u, double v,
                                 const ConnectionOptions& options,
                                 const AdaptedFrame& reference);

/// One checked relation between measured connection forms.
struct RelationResidual {
  std::string name;
  bool applicable = true;
  double residual = 0.0;  // max |coefficient mismatch| over theta^1, theta^2
  std::string guard;      // reason when not applicable
};

/// Residuals of the structure relations that hold for every adapted frame on
/// a surface with nowhere-vanishing angles (no minimality assumed): the
/// normal-leg relations plus the tangent relation
/// theta_2^1 = tan(beta) (d beta o J - 2 cos(alpha) theta^2).
std::vector<RelationResidual> check_intrinsic_relations(const ConnectionTable& t);

/// Residuals of the connection forms specific to minimal immersions:
/// theta_2^3, theta_1^4, theta_2^4, theta_1^5, theta_2^5 and the normal-bundle
/// forms theta_3^4, theta_3^5, theta_4^5. With `constant_beta` the simplified
/// forms (d beta = 0, b = 0) are used and the gates NonConstantBeta /
/// GaugeNotDiagonal apply. `minimality` is max |H| at the point; NotMinimal is
/// raised above tolerance.
std::vector<RelationResidual> check_minimal_connection_forms(
    const ConnectionTable& t, double minimality, bool constant_beta);

/// JSON text for a relation-residual list (deterministic key order).
std::string relations_to_json(const std::vector<RelationResidual>& relations,
                              double u, double v);

}  // namespace csgeo
