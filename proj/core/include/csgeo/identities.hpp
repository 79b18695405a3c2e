#pragma once

#include <map>
#include <string>
#include <vector>

#include "csgeo/surface.hpp"

namespace csgeo {

/// Everything the identity suite consumes, sampled over one grid. Fields hold
/// NaN where upstream guards fired; gate summaries are over defined points.
struct IdentityInputs {
  GridSpec grid;
  ScalarField alpha, beta, a, b;
  ScalarField alpha1, alpha2, beta1, beta2;  // frame-directional derivatives
  ScalarField a1, a2;                        // da(e1), da(e2)
  ScalarField lap_alpha, lap_beta;           // surface Laplacians
  ScalarField k_intrinsic;                   // metric-only Gauss curvature
  ScalarField minimality;                    // |mean curvature vector|

  // Gate summaries.
  double max_minimality = 0.0;
  double max_grad_beta = 0.0;
  double max_abs_b = 0.0;
  double max_grad_a = 0.0;
  double max_abs_k = 0.0;
};

struct IdentityOptions {
  // Folds the standalone additive term of the third Codazzi equation into the
  // following alpha_1 term instead (comparison mode for an ambiguous source).
  bool codazzi3_fold_paren = false;
};

/// Grid statistics of one identity residual.
struct IdentityStat {
  std::string name;
  bool applicable = true;
  std::string gate;          // structural precondition that failed, if any
  double max_abs = 0.0;      // raw residual
  double mean_abs = 0.0;
  double max_norm = 0.0;     // residual / largest |term| of the identity
  int evaluated_points = 0;
  int guarded_points = 0;
  double guarded_fraction = 0.0;
  std::map<std::string, int> guards;  // per-point guard tallies
  bool diagnostic = false;   // reported but excluded from pass/fail roll-ups
};

struct IdentityReport {
  std::vector<IdentityStat> stats;
  const IdentityStat* find(const std::string& name) const;
};

/// Curvature two ways against the intrinsic value. Throws NotMinimal.
std::vector<IdentityStat> curvature_report(const IdentityInputs& in);

/// Residual of the contact-angle Laplacian identity. Throws NotMinimal.
IdentityStat laplacian_beta_residual(const IdentityInputs& in);

/// The four reduced compatibility (Codazzi/Ricci) equations of the
/// constant-angle diagonal gauge. Throws NotMinimal / NonConstantBeta /
/// GaugeNotDiagonal.
std::vector<IdentityStat> codazzi_residuals(const IdentityInputs& in,
                                            const IdentityOptions& options = {});

/// Residual of the second-order PDE for the holomorphic angle at constant
/// contact angle. Throws NonConstantBeta.
IdentityStat theorem1_residual(const IdentityInputs& in);

/// Closed form for the shape coefficient from the angles and the alpha
/// derivatives, with its discriminant.
struct AFromAngles {
  double f = 0.0;
  double a_plus = 0.0;
  double a_minus = 0.0;
  bool negative_discriminant = false;
};
AFromAngles a_from_angles(double alpha, double beta, double alpha1, double alpha2);

/// Grid closure |a_from_angles - a_measured|. Throws NotMinimal /
/// NonConstantBeta / GaugeNotDiagonal.
IdentityStat a_closure_stat(const IdentityInputs& in);

/// The two first-order relations forced on flat examples with constant a;
/// reported as diagnostics. Throws NotFlat / NonConstantA / NonConstantBeta.
std::vector<IdentityStat> corollary1_relations(const IdentityInputs& in);

/// Full suite; structural gate failures become inapplicable rows instead of
/// exceptions. Row order is fixed.
IdentityReport evaluate_identities(const IdentityInputs& in,
                                   const IdentityOptions& options = {});

std::string identity_report_to_json(const IdentityReport& report);
std::string identity_report_to_csv(const IdentityReport& report);

}  // namespace csgeo
