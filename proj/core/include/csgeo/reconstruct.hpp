#pragma once

#include <array>
#include <string>
#include <vector>

#include "csgeo/ambient.hpp"
#include "csgeo/jets.hpp"
#include "csgeo/linalg.hpp"
#include "csgeo/surface.hpp"

namespace csgeo {

/// The constant invariants of a candidate surface: contact angle, holomorphic
/// angle, and the two second-fundamental-form coefficients of the
/// characteristic direction.
struct InvariantConstants {
  double beta = 0.0;
  double alpha = 0.0;
  double a = 0.0;
  double b = 0.0;

  /// Structure constant of the coframe: d(theta2) = -c theta1 ^ theta2.
  double c() const;
};

/// Residual of the circle relation tying (a, b) at a given contact angle:
/// a^2 + (b - b0)^2 - R^2 with b0 = cos(beta)/(1+sin^2(beta)) and
/// R = sqrt(2) sin^2(beta)/(1+sin^2(beta)).
double circle_membership(double beta, double a, double b);

struct CircleFamilyPoint {
  double beta = 0.0;
  double a = 0.0;
  double b = 0.0;
  bool kenmotsu = false;     // a == 0 branch
  bool new_family = false;   // b == 0 branch
  double membership_residual = 0.0;
};

/// n samples of the invariant circle at the given contact angle.
std::vector<CircleFamilyPoint> circle_family(double beta, int n);

/// One solution branch of the reduced compatibility system at constant
/// invariants with diagonal gauge (b = 0).
struct ConstantBranch {
  InvariantConstants constants;
  std::array<double, 4> residuals{};  // the four compatibility equations
  bool degenerate_a = false;          // |a| at the boundary of the family
};

/// All (alpha, a) branches with b = 0 at the given contact angle. Throws
/// DomainError for beta outside (0, pi/2), NoBranch when no real solution
/// exists.
std::vector<ConstantBranch> solve_constant_invariants(double beta);

/// Projects approximate constants onto the compatibility manifold at fixed
/// contact angle, refining (alpha, a). Throws GaugeNotDiagonal for b != 0,
/// DomainError for a degenerate angle, IncompatibleConnection when the
/// refinement does not converge to a branch.
ConstantBranch refine_constants(const InvariantConstants& guess);

/// Left-invariant derivative of the moving frame: dF = (A theta1 + B theta2) F
/// with A, B constant real antisymmetric 6x6 matrices acting on realified
/// frames.
struct MaurerCartan {
  Matrix6d A = Matrix6d::Zero();
  Matrix6d B = Matrix6d::Zero();
  double c = 0.0;
  double compat_residual = 0.0;  // ||A B - B A||_F
};

/// Builds the connection matrices from constant invariants (diagonal gauge).
/// Throws GaugeNotDiagonal if b != 0, DomainError on degenerate angles.
MaurerCartan assemble_maurer_cartan(const InvariantConstants& k);

/// Canonical initial frame at the base point: rows are the realified vectors
/// (z, e1, e2, e3, e4, e5) of an adapted frame with the given angles.
Matrix6d initial_adapted_frame(const InvariantConstants& k);

struct IntegrationOptions {
  enum class Method {
    Auto,          // exponential when the generators commute, else stepping
    Exponential,   // F(u,v) = exp(u A) exp(v B) F0; requires [A, B] = 0
    LineStepping,  // classical 4th-order one-step integration along grid lines
  };
  Method method = Method::Auto;
  int substeps = 24;  // one-step subdivisions per grid cell (stepping path)
  int threads = 0;    // workers for the per-row passes; 0 = hardware
};

struct IntegrationResult {
  GridSpec grid;
  std::vector<Matrix6d> frames;  // row-major, grid.index(i, j)
  std::string method;            // "exponential" or "line_stepping"
  int reortho_count = 0;
  double max_orthogonality_defect = 0.0;
  double max_sphere_residual = 0.0;   // max | |z| - 1 |
  double path_independence = 0.0;     // max two-edge-ordering discrepancy
  PeriodReport periods_u, periods_v;

  const Matrix6d& frame(int i, int j) const { return frames[grid.index(i, j)]; }
  Complex3 position(int i, int j) const;
};

/// Integrates dF = (A du + g(u) B dv) F over the grid with g(u) = exp(-c u),
/// starting from f0. Throws IncompatibleConnection when the per-cell
/// path-independence residual exceeds tolerance, or when the exponential
/// method is forced on non-commuting generators.
IntegrationResult integrate_frame(const MaurerCartan& mc, const Matrix6d& f0,
                                  const GridSpec& grid,
                                  const IntegrationOptions& options = {});

/// Exact 2-jet evaluator for a compatible constant-invariant connection:
/// F(u, v) = exp(v g(u) B) exp(u A) F0, z = first row.
class ReconstructedSurface final : public JetEvaluator {
 public:
  ReconstructedSurface(const MaurerCartan& mc, const Matrix6d& f0);
  Jet2 jet(double u, double v) const override;

 private:
  MaurerCartan mc_;
  Matrix6d f0_;
};

std::string family_to_csv(const std::vector<CircleFamilyPoint>& points);
std::string family_to_json(double beta,
                           const std::vector<CircleFamilyPoint>& points);
std::string branches_to_json(double beta,
                             const std::vector<ConstantBranch>& branches);
std::string immersion_to_csv(const IntegrationResult& result);
std::string immersion_to_json(const IntegrationResult& result);

}  // namespace csgeo
