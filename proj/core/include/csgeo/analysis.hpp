#pragma once

#include <map>
#include <string>
#include <vector>

#include "csgeo/connection.hpp"
#include "csgeo/frames.hpp"
#include "csgeo/identities.hpp"
#include "csgeo/jets.hpp"
#include "csgeo/reconstruct.hpp"
#include "csgeo/surface.hpp"

namespace csgeo {

struct AnalysisOptions {
  ConnectionOptions connection;
  IdentityOptions identities;
  int threads = 0;        // workers; 0 = hardware, CSGEO_THREADS caps
  bool relations = true;  // also check the per-point connection-form relations
};

/// Grid-wide roll-up of one per-point relation check.
struct RelationSummary {
  std::string name;
  int evaluated_points = 0;
  double max_residual = 0.0;
  std::map<std::string, int> guards;  // per-point analytic guards
  std::map<std::string, int> gates;   // per-point structural gates
};

/// Full per-grid analysis of an immersed surface.
struct AnalysisResult {
  GridSpec grid;

  // Point fields; NaN marks points where the quantity is undefined.
  ScalarField beta, alpha, a, b;
  ScalarField alpha1, alpha2, beta1, beta2;
  ScalarField h_norm;          // |mean curvature vector|
  ScalarField frame_residual;  // frame-consistency worst relation
  ScalarField k_intrinsic;

  std::vector<std::string> point_guard;  // per-point guard label, "" if clean
  std::map<std::string, int> guard_counts;

  int frame_points = 0;       // points with a usable adapted frame
  int connection_points = 0;  // points with a measured connection table
  bool any_legendrian = false;
  bool all_legendrian = false;

  double max_minimality = 0.0;
  double max_frame_residual = 0.0;
  double max_alignment = 0.0;  // worst stencil alignment inside tables
  double max_seam = 0.0;       // largest neighbor gauge distance in the sweep

  std::vector<RelationSummary> intrinsic_relations;
  std::vector<RelationSummary> minimal_relations;       // general minimal forms
  std::vector<RelationSummary> minimal_relations_cbeta;  // diagonal-gauge forms

  IdentityInputs identity_inputs;
  IdentityReport identities;

  const RelationSummary* find_relation(
      const std::vector<RelationSummary>& table, const std::string& name) const;
};

/// Analyzes the surface over the grid: adapted frames with a gauge-continuity
/// sweep, mean curvature, connection tables, relation checks, and the full
/// identity suite.
AnalysisResult analyze_surface(const JetEvaluator& surf, const GridSpec& grid,
                               const AnalysisOptions& options = {});

std::string analysis_points_csv(const AnalysisResult& r);
std::string analysis_report_json(const AnalysisResult& r);

/// Closed loop: assemble the connection from constants, integrate it, and
/// re-analyze the reconstructed surface.
struct RoundtripReport {
  InvariantConstants requested;
  double c = 0.0;
  double compat_residual = 0.0;

  std::string method;
  int reortho_count = 0;
  double max_orthogonality_defect = 0.0;
  double max_sphere_residual = 0.0;
  double path_independence = 0.0;
  PeriodReport periods_u, periods_v;

  // Largest deviation of the measured invariant fields from the request.
  double beta_dev = 0.0;
  double alpha_dev = 0.0;
  double a_dev = 0.0;  // compared through |a|: the sign is a gauge choice
  double b_dev = 0.0;
  double max_minimality = 0.0;

  AnalysisResult analysis;
};

RoundtripReport roundtrip_verify(const InvariantConstants& k,
                                 const GridSpec& grid,
                                 const AnalysisOptions& options = {});

std::string roundtrip_report_json(const RoundtripReport& r);

}  // namespace csgeo
