#include "csgeo/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include <nlohmann/json.hpp>

#include "csgeo/ambient.hpp"
#include "csgeo/errors.hpp"
#include "csgeo/io.hpp"
#include "csgeo/parallel.hpp"
#include "csgeo/tolerances.hpp"

namespace csgeo {
namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::string guard_label(const Error& e) {
  if (dynamic_cast<const NotOnSphere*>(&e)) return "not_on_sphere";
  if (dynamic_cast<const DegenerateMetric*>(&e)) return "degenerate_metric";
  if (dynamic_cast<const ContactAngleZero*>(&e)) return "contact_angle_zero";
  if (dynamic_cast<const NotTangent*>(&e)) return "not_tangent";
  if (dynamic_cast<const GaugeFlip*>(&e)) return "gauge_flip";
  if (dynamic_cast<const HolomorphicAngleDegenerate*>(&e))
    return "alpha_degenerate_stencil";
  if (dynamic_cast<const DomainError*>(&e)) return "domain_error";
  return "error";
}

std::string gate_label(const Error& e) {
  if (dynamic_cast<const NotMinimal*>(&e)) return "NotMinimal";
  if (dynamic_cast<const NonConstantBeta*>(&e)) return "NonConstantBeta";
  if (dynamic_cast<const GaugeNotDiagonal*>(&e)) return "GaugeNotDiagonal";
  return "Error";
}

const std::vector<std::string>& intrinsic_names() {
  static const std::vector<std::string> names = {
      "theta31", "theta32", "theta34", "theta43", "theta35",
      "theta41", "theta42", "theta45", "theta51", "theta52",
      "theta53", "theta54", "conex"};
  return names;
}

const std::vector<std::string>& minimal_names() {
  static const std::vector<std::string> names = {
      "theta23", "theta14", "theta24", "theta15",
      "theta25", "theta34", "theta35", "theta45"};
  return names;
}

void seed_rows(std::vector<RelationSummary>& table,
               const std::vector<std::string>& names) {
  for (const auto& n : names) {
    RelationSummary s;
    s.name = n;
    table.push_back(std::move(s));
  }
}

RelationSummary* row_by_name(std::vector<RelationSummary>& table,
                             const std::string& name) {
  for (auto& s : table) {
    if (s.name == name) return &s;
  }
  RelationSummary fresh;
  fresh.name = name;
  table.push_back(std::move(fresh));
  return &table.back();
}

void merge_relations(std::vector<RelationSummary>& table,
                     const std::vector<RelationResidual>& rels) {
  for (const auto& r : rels) {
    RelationSummary* row = row_by_name(table, r.name);
    if (r.applicable) {
      ++row->evaluated_points;
      row->max_residual = std::max(row->max_residual, r.residual);
    } else {
      ++row->guards[r.guard];
    }
  }
}

void merge_gate(std::vector<RelationSummary>& table,
                const std::vector<std::string>& names,
                const std::string& gate) {
  for (const auto& n : names) ++row_by_name(table, n)->gates[gate];
}

nlohmann::ordered_json grid_json(const GridSpec& g) {
  nlohmann::ordered_json out;
  out["nu"] = g.nu;
  out["nv"] = g.nv;
  out["u0"] = g.u0;
  out["v0"] = g.v0;
  out["extent_u"] = g.extent_u;
  out["extent_v"] = g.extent_v;
  out["periodic_u"] = g.periodic_u;
  out["periodic_v"] = g.periodic_v;
  return out;
}

nlohmann::ordered_json relation_table_json(
    const std::vector<RelationSummary>& table) {
  auto rows = nlohmann::ordered_json::array();
  for (const auto& s : table) {
    nlohmann::ordered_json row;
    row["name"] = s.name;
    row["evaluated_points"] = s.evaluated_points;
    if (s.evaluated_points > 0) row["max_residual"] = s.max_residual;
    if (!s.guards.empty()) {
      nlohmann::ordered_json g;
      for (const auto& [k, v] : s.guards) g[k] = v;
      row["guards"] = g;
    }
    if (!s.gates.empty()) {
      nlohmann::ordered_json g;
      for (const auto& [k, v] : s.gates) g[k] = v;
      row["gates"] = g;
    }
    rows.push_back(row);
  }
  return rows;
}

nlohmann::ordered_json periods_json(const PeriodReport& p) {
  nlohmann::ordered_json out;
  out["frequencies"] = p.frequencies;
  out["commensurable"] = p.commensurable;
  out["fundamental_period"] = p.fundamental_period;
  return out;
}

}  // namespace

const RelationSummary* AnalysisResult::find_relation(
    const std::vector<RelationSummary>& table, const std::string& name) const {
  for (const auto& s : table) {
    if (s.name == name) return &s;
  }
  return nullptr;
}

AnalysisResult analyze_surface(const JetEvaluator& surf, const GridSpec& grid,
                               const AnalysisOptions& options) {
  if (grid.nu < 2 || grid.nv < 2) {
    throw GridMismatch("analyze_surface: grid must be at least 2x2");
  }
  const int n = grid.size();

  AnalysisResult r;
  r.grid = grid;
  auto nan_field = [&grid] { return ScalarField(grid, kNaN); };
  r.beta = nan_field();
  r.alpha = nan_field();
  r.a = nan_field();
  r.b = nan_field();
  r.alpha1 = nan_field();
  r.alpha2 = nan_field();
  r.beta1 = nan_field();
  r.beta2 = nan_field();
  r.h_norm = nan_field();
  r.frame_residual = nan_field();
  r.point_guard.assign(static_cast<std::size_t>(n), std::string());

  MetricGrid metric{nan_field(), nan_field(), nan_field()};
  std::vector<Jet2> jets(static_cast<std::size_t>(n));
  std::vector<AdaptedFrame> frames(static_cast<std::size_t>(n));
  std::vector<unsigned char> has_frame(static_cast<std::size_t>(n), 0);
  std::vector<unsigned char> has_table(static_cast<std::size_t>(n), 0);

  // Pointwise pass: jets, metric, mean curvature, tolerant adapted frames.
  parallel_for(n, options.threads, [&](int idx) {
    const std::size_t s = static_cast<std::size_t>(idx);
    const int i = idx / grid.nv, j = idx % grid.nv;
    try {
      jets[s] = surf.jet(grid.u(i), grid.v(j));
    } catch (const Error& e) {
      r.point_guard[s] = guard_label(e);
      return;
    }
    if (!jets[s].finite()) {
      r.point_guard[s] = "non_finite_jet";
      return;
    }
    try {
      const Metric2 m = first_fundamental(jets[s]);
      metric.E.values[s] = m.E;
      metric.F.values[s] = m.F;
      metric.G.values[s] = m.G;
      r.h_norm.values[s] = mean_curvature_vector(jets[s]).norm();
    } catch (const Error& e) {
      r.point_guard[s] = guard_label(e);
      return;
    }
    try {
      frames[s] = adapted_frame_tolerant(jets[s]);
      has_frame[s] = 1;
      r.frame_residual.values[s] = frame_consistency(frames[s]).max();
      if (frames[s].alpha_degenerate) r.point_guard[s] = "alpha_degenerate";
    } catch (const Error& e) {
      r.point_guard[s] = guard_label(e);
    }
  });

  // Gauge-continuity sweep: align each frame's sign choices with an already
  // visited neighbor so grid fields never jump gauge across a seam.
  for (int i = 0; i < grid.nu; ++i) {
    for (int j = 0; j < grid.nv; ++j) {
      const std::size_t s = static_cast<std::size_t>(grid.index(i, j));
      if (!has_frame[s]) continue;
      int ref = -1;
      if (j > 0 && has_frame[static_cast<std::size_t>(grid.index(i, j - 1))]) {
        ref = grid.index(i, j - 1);
      } else if (i > 0 &&
                 has_frame[static_cast<std::size_t>(grid.index(i - 1, j))]) {
        ref = grid.index(i - 1, j);
      }
      if (ref >= 0) {
        double seam =
            align_frame(frames[s], frames[static_cast<std::size_t>(ref)]);
        r.max_seam = std::max(r.max_seam, seam);
      }
    }
  }

  // Frame fields and tangent-frame coefficients.
  FrameCoefficients coeffs{nan_field(), nan_field(), nan_field(), nan_field()};
  int legendrian_points = 0;
  for (std::size_t s = 0; s < static_cast<std::size_t>(n); ++s) {
    if (!has_frame[s]) continue;
    ++r.frame_points;
    r.beta.values[s] = frames[s].beta;
    r.alpha.values[s] = frames[s].alpha;
    if (frames[s].legendrian_gauge) {
      ++legendrian_points;
      r.any_legendrian = true;
    }
    const auto [p1, q1] = tangent_coefficients(frames[s].e1, jets[s]);
    const auto [p2, q2] = tangent_coefficients(frames[s].e2, jets[s]);
    coeffs.p1.values[s] = p1;
    coeffs.q1.values[s] = q1;
    coeffs.p2.values[s] = p2;
    coeffs.q2.values[s] = q2;
  }
  r.all_legendrian = r.frame_points > 0 && legendrian_points == r.frame_points;

  // Connection pass: stencil tables in the swept gauge, plus the per-point
  // relation checks.
  std::vector<std::vector<RelationResidual>> intr(static_cast<std::size_t>(n));
  std::vector<std::vector<RelationResidual>> ming(static_cast<std::size_t>(n));
  std::vector<std::vector<RelationResidual>> minc(static_cast<std::size_t>(n));
  std::vector<std::string> gate_general(static_cast<std::size_t>(n));
  std::vector<std::string> gate_cbeta(static_cast<std::size_t>(n));
  std::vector<double> alignments(static_cast<std::size_t>(n), 0.0);

  parallel_for(n, options.threads, [&](int idx) {
    const std::size_t s = static_cast<std::size_t>(idx);
    if (!has_frame[s] || frames[s].alpha_degenerate) return;
    const int i = idx / grid.nv, j = idx % grid.nv;
    try {
      const ConnectionTable t = connection_table(
          surf, grid.u(i), grid.v(j), options.connection, frames[s]);
      r.a.values[s] = t.a;
      r.b.values[s] = t.b;
      r.alpha1.values[s] = t.alpha1;
      r.alpha2.values[s] = t.alpha2;
      r.beta1.values[s] = t.beta1;
      r.beta2.values[s] = t.beta2;
      alignments[s] = t.alignment;
      has_table[s] = 1;
      if (options.relations) {
        intr[s] = check_intrinsic_relations(t);
        const double h_here = r.h_norm.values[s];
        try {
          ming[s] = check_minimal_connection_forms(t, h_here, false);
        } catch (const Error& e) {
          gate_general[s] = gate_label(e);
        }
        try {
          minc[s] = check_minimal_connection_forms(t, h_here, true);
        } catch (const Error& e) {
          gate_cbeta[s] = gate_label(e);
        }
      }
    } catch (const Error& e) {
      r.point_guard[s] = guard_label(e);
    }
  });

  for (std::size_t s = 0; s < static_cast<std::size_t>(n); ++s) {
    if (has_table[s]) ++r.connection_points;
    r.max_alignment = std::max(r.max_alignment, alignments[s]);
    if (!r.point_guard[s].empty()) ++r.guard_counts[r.point_guard[s]];
  }

  seed_rows(r.intrinsic_relations, intrinsic_names());
  seed_rows(r.minimal_relations, minimal_names());
  seed_rows(r.minimal_relations_cbeta, minimal_names());
  for (std::size_t s = 0; s < static_cast<std::size_t>(n); ++s) {
    merge_relations(r.intrinsic_relations, intr[s]);
    merge_relations(r.minimal_relations, ming[s]);
    merge_relations(r.minimal_relations_cbeta, minc[s]);
    if (!gate_general[s].empty())
      merge_gate(r.minimal_relations, minimal_names(), gate_general[s]);
    if (!gate_cbeta[s].empty())
      merge_gate(r.minimal_relations_cbeta, minimal_names(), gate_cbeta[s]);
  }

  // Derived grid fields and the identity suite.
  auto [a1, a2] = frame_directional_derivatives(r.a, coeffs);
  r.k_intrinsic = gauss_curvature_intrinsic(metric);
  r.max_minimality = field_max_abs(r.h_norm);
  r.max_frame_residual = field_max_abs(r.frame_residual);

  IdentityInputs in;
  in.grid = grid;
  in.alpha = r.alpha;
  in.beta = r.beta;
  in.a = r.a;
  in.b = r.b;
  in.alpha1 = r.alpha1;
  in.alpha2 = r.alpha2;
  in.beta1 = r.beta1;
  in.beta2 = r.beta2;
  in.a1 = a1;
  in.a2 = a2;
  in.lap_alpha = surface_laplacian(r.alpha, metric);
  in.lap_beta = surface_laplacian(r.beta, metric);
  in.k_intrinsic = r.k_intrinsic;
  in.minimality = r.h_norm;
  in.max_minimality = r.max_minimality;
  in.max_grad_beta =
      std::max(field_max_abs(r.beta1), field_max_abs(r.beta2));
  in.max_abs_b = field_max_abs(r.b);
  in.max_grad_a = std::max(field_max_abs(a1), field_max_abs(a2));
  in.max_abs_k = field_max_abs(r.k_intrinsic);

  r.identity_inputs = in;
  r.identities = evaluate_identities(in, options.identities);
  return r;
}

std::string analysis_points_csv(const AnalysisResult& r) {
  std::ostringstream out;
  out << "u,v,guard,beta,alpha,a,b,h_norm,frame_residual,k_intrinsic,"
         "alpha1,alpha2,beta1,beta2\n";
  for (int i = 0; i < r.grid.nu; ++i) {
    for (int j = 0; j < r.grid.nv; ++j) {
      const std::size_t s = static_cast<std::size_t>(r.grid.index(i, j));
      out << format_double(r.grid.u(i)) << ',' << format_double(r.grid.v(j))
          << ',' << r.point_guard[s];
      for (const ScalarField* f :
           {&r.beta, &r.alpha, &r.a, &r.b, &r.h_norm, &r.frame_residual,
            &r.k_intrinsic, &r.alpha1, &r.alpha2, &r.beta1, &r.beta2}) {
        out << ',' << format_double(f->values[s]);
      }
      out << '\n';
    }
  }
  return out.str();
}

std::string analysis_report_json(const AnalysisResult& r) {
  nlohmann::ordered_json root;
  root["grid"] = grid_json(r.grid);

  nlohmann::ordered_json summary;
  summary["frame_points"] = r.frame_points;
  summary["connection_points"] = r.connection_points;
  summary["any_legendrian"] = r.any_legendrian;
  summary["all_legendrian"] = r.all_legendrian;
  summary["max_minimality"] = r.max_minimality;
  summary["max_frame_residual"] = r.max_frame_residual;
  summary["max_alignment"] = r.max_alignment;
  summary["max_seam"] = r.max_seam;
  summary["max_grad_beta"] = r.identity_inputs.max_grad_beta;
  summary["max_abs_b"] = r.identity_inputs.max_abs_b;
  summary["max_grad_a"] = r.identity_inputs.max_grad_a;
  summary["max_abs_k"] = r.identity_inputs.max_abs_k;
  nlohmann::ordered_json guards = nlohmann::ordered_json::object();
  for (const auto& [k, v] : r.guard_counts) guards[k] = v;
  summary["guard_counts"] = guards;
  root["summary"] = summary;

  nlohmann::ordered_json relations;
  relations["intrinsic"] = relation_table_json(r.intrinsic_relations);
  relations["minimal"] = relation_table_json(r.minimal_relations);
  relations["minimal_constant_beta"] =
      relation_table_json(r.minimal_relations_cbeta);
  root["relations"] = relations;

  root["identities"] = nlohmann::ordered_json::parse(
      identity_report_to_json(r.identities))["identities"];
  return root.dump(2) + "\n";
}

RoundtripReport roundtrip_verify(const InvariantConstants& k,
                                 const GridSpec& grid,
                                 const AnalysisOptions& options) {
  RoundtripReport rep;
  rep.requested = k;

  const MaurerCartan mc = assemble_maurer_cartan(k);
  rep.c = mc.c;
  rep.compat_residual = mc.compat_residual;

  const Matrix6d f0 = initial_adapted_frame(k);
  IntegrationOptions iopt;
  iopt.threads = options.threads;
  const IntegrationResult integ = integrate_frame(mc, f0, grid, iopt);
  rep.method = integ.method;
  rep.reortho_count = integ.reortho_count;
  rep.max_orthogonality_defect = integ.max_orthogonality_defect;
  rep.max_sphere_residual = integ.max_sphere_residual;
  rep.path_independence = integ.path_independence;
  rep.periods_u = integ.periods_u;
  rep.periods_v = integ.periods_v;

  const ReconstructedSurface surf(mc, f0);
  rep.analysis = analyze_surface(surf, grid, options);

  const auto& a = rep.analysis;
  for (int idx = 0; idx < grid.size(); ++idx) {
    const std::size_t s = static_cast<std::size_t>(idx);
    if (std::isfinite(a.beta.values[s])) {
      rep.beta_dev =
          std::max(rep.beta_dev, std::abs(a.beta.values[s] - k.beta));
    }
    if (std::isfinite(a.alpha.values[s])) {
      rep.alpha_dev =
          std::max(rep.alpha_dev, std::abs(a.alpha.values[s] - k.alpha));
    }
    if (std::isfinite(a.a.values[s])) {
      rep.a_dev = std::max(
          rep.a_dev, std::abs(std::abs(a.a.values[s]) - std::abs(k.a)));
    }
    if (std::isfinite(a.b.values[s])) {
      rep.b_dev = std::max(rep.b_dev, std::abs(a.b.values[s] - k.b));
    }
  }
  rep.max_minimality = a.max_minimality;
  return rep;
}

std::string roundtrip_report_json(const RoundtripReport& r) {
  nlohmann::ordered_json root;
  nlohmann::ordered_json req;
  req["beta"] = r.requested.beta;
  req["alpha"] = r.requested.alpha;
  req["a"] = r.requested.a;
  req["b"] = r.requested.b;
  req["c"] = r.c;
  root["requested"] = req;
  root["compat_residual"] = r.compat_residual;

  nlohmann::ordered_json integ;
  integ["method"] = r.method;
  integ["reortho_count"] = r.reortho_count;
  integ["max_orthogonality_defect"] = r.max_orthogonality_defect;
  integ["max_sphere_residual"] = r.max_sphere_residual;
  integ["path_independence"] = r.path_independence;
  integ["periods_u"] = periods_json(r.periods_u);
  integ["periods_v"] = periods_json(r.periods_v);
  root["integration"] = integ;

  nlohmann::ordered_json dev;
  dev["beta"] = r.beta_dev;
  dev["alpha"] = r.alpha_dev;
  dev["a"] = r.a_dev;
  dev["b"] = r.b_dev;
  dev["max_minimality"] = r.max_minimality;
  root["deviations"] = dev;

  root["analysis"] = nlohmann::ordered_json::parse(
      analysis_report_json(r.analysis));
  return root.dump(2) + "\n";
}

}  // namespace csgeo
