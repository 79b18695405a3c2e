#include <algorithm>
#include <cmath>
#include <map>
#include <string>

#include <doctest.h>

#include <nlohmann/json.hpp>

#include "csgeo/analysis.hpp"
#include "csgeo/exprlang.hpp"
#include "csgeo/fixtures.hpp"
#include "csgeo/surface.hpp"

#include "helpers.hpp"

using namespace csgeo;

namespace {

// Each fixture is analyzed once and shared by every case in this suite.
const AnalysisResult& fixture_analysis(const std::string& name) {
  static std::map<std::string, AnalysisResult> cache;
  auto it = cache.find(name);
  if (it == cache.end()) {
    const Fixture& fx = fixture_by_name(name);
    expr::ExpressionSurface surf(fx.ast);
    it = cache.emplace(name, analyze_surface(surf, fx.grid)).first;
  }
  return it->second;
}

const IdentityStat& stat(const AnalysisResult& r, const std::string& name) {
  const IdentityStat* s = r.identities.find(name);
  REQUIRE(s != nullptr);
  return *s;
}

}  // namespace

TEST_SUITE("analysis") {

TEST_CASE("legendrian torus: every point carries a Legendrian frame") {
  const AnalysisResult& r = fixture_analysis("legendrian_torus");
  CHECK(r.any_legendrian);
  CHECK(r.all_legendrian);
  CHECK(r.frame_points == 48 * 48);
  CHECK(r.connection_points == 48 * 48);
  CHECK(r.guard_counts.empty());
  CHECK(field_undefined_count(r.beta) == 0);

  double beta_dev = 0.0;
  for (double x : r.beta.values)
    beta_dev = std::max(beta_dev, std::abs(x - tst::kPi / 2.0));
  CHECK(beta_dev < 1e-9);
  CHECK(r.max_minimality < 1e-6);
}

TEST_CASE("legendrian torus: the gauge makes b the constant -1/sqrt(2)") {
  const AnalysisResult& r = fixture_analysis("legendrian_torus");
  double dev = 0.0;
  for (double x : r.b.values)
    dev = std::max(dev, std::abs(x + 1.0 / std::sqrt(2.0)));
  CHECK(dev < 1e-6);
  // The sweep may still join charts of opposite handedness along a seam; the
  // seam size is reported, not hidden, and is allowed to be order one.
  CHECK(r.max_seam >= 0.0);
  CHECK(r.max_seam < 1.0);
}

TEST_CASE("legendrian torus: tan(beta) identities are gated, never NaN") {
  const AnalysisResult& r = fixture_analysis("legendrian_torus");

  const IdentityStat& kg = stat(r, "K_gauss_vs_intrinsic");
  CHECK(kg.applicable);
  CHECK(kg.max_abs < 1e-8);

  for (const char* name :
       {"K_conex_vs_intrinsic", "lapla_beta", "theorem1", "corollary_alpha1"}) {
    const IdentityStat& s = stat(r, name);
    CHECK_FALSE(s.applicable);
    CHECK(s.gate == "all points guarded: cos_beta_small");
  }
  for (const char* name :
       {"codazzi1", "codazzi2", "codazzi3", "codazzi4", "a_closure"}) {
    const IdentityStat& s = stat(r, name);
    CHECK_FALSE(s.applicable);
    CHECK(s.gate == "GaugeNotDiagonal");
  }

  const IdentityStat& c2 = stat(r, "corollary_alpha2");
  CHECK(c2.applicable);
  CHECK(c2.diagnostic);
  CHECK(c2.max_abs < 1e-9);

  for (const IdentityStat& s : r.identities.stats) {
    CHECK(std::isfinite(s.max_abs));
    CHECK(std::isfinite(s.mean_abs));
  }
}

TEST_CASE("legendrian torus: report JSON is deterministic and NaN-free") {
  const AnalysisResult& r = fixture_analysis("legendrian_torus");
  const std::string once = analysis_report_json(r);

  const Fixture& fx = fixture_by_name("legendrian_torus");
  expr::ExpressionSurface surf(fx.ast);
  AnalysisResult again = analyze_surface(surf, fx.grid);
  CHECK(analysis_report_json(again) == once);

  CHECK(once.find("nan") == std::string::npos);
  nlohmann::json parsed = nlohmann::json::parse(once);
  CHECK(parsed.is_object());
}

TEST_CASE("legendrian torus: per-point CSV has one row per grid node") {
  const AnalysisResult& r = fixture_analysis("legendrian_torus");
  const std::string csv = analysis_points_csv(r);
  CHECK(csv.rfind("u,v,guard,beta,", 0) == 0);
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 48 * 48 + 1);
}

TEST_CASE("clifford torus in S^3: the contact angle degenerates everywhere") {
  const AnalysisResult& r = fixture_analysis("clifford_s3");
  CHECK(r.frame_points == 0);
  CHECK(r.connection_points == 0);
  CHECK_FALSE(r.any_legendrian);
  REQUIRE(r.guard_counts.count("contact_angle_zero") == 1);
  CHECK(r.guard_counts.at("contact_angle_zero") == 48 * 48);
  CHECK(field_undefined_count(r.beta) == 48 * 48);
  // The surface is still minimal and intrinsically flat; both facts are
  // measured without a frame.
  CHECK(r.max_minimality < 1e-10);
  CHECK(field_max_abs(r.k_intrinsic) < 1e-8);
}

TEST_CASE("great sphere: frames exist but the holomorphic angle does not") {
  const AnalysisResult& r = fixture_analysis("great_sphere");
  const GridSpec& g = fixture_by_name("great_sphere").grid;
  CHECK(r.frame_points == g.size());
  CHECK(r.connection_points == 0);
  REQUIRE(r.guard_counts.count("alpha_degenerate") == 1);
  CHECK(r.guard_counts.at("alpha_degenerate") == g.size());

  // On this chart the contact angle equals the v coordinate exactly.
  double beta_dev = 0.0;
  for (int i = 0; i < g.nu; ++i)
    for (int j = 0; j < g.nv; ++j)
      beta_dev = std::max(beta_dev, std::abs(r.beta.at(i, j) - g.v(j)));
  CHECK(beta_dev < 1e-12);

  // Unit curvature away from the open edges, up to the stencil error.
  double k_dev = 0.0;
  for (int i = 0; i < g.nu; ++i)
    for (int j = 2; j + 2 < g.nv; ++j)
      k_dev = std::max(k_dev, std::abs(r.k_intrinsic.at(i, j) - 1.0));
  CHECK(k_dev < 5e-3);

  CHECK(r.max_minimality < 1e-10);
}

TEST_CASE("nonminimal product torus: the minimality gate closes") {
  const AnalysisResult& r = fixture_analysis("clifford_nonminimal");
  CHECK(std::abs(r.max_minimality - 2.0 / std::sqrt(3.0)) < 1e-13);
  CHECK(r.frame_points == 0);
  for (const char* name : {"K_gauss_vs_intrinsic", "codazzi2"}) {
    const IdentityStat& s = stat(r, name);
    CHECK_FALSE(s.applicable);
    CHECK(s.gate == "NotMinimal");
  }
}

TEST_CASE("reconstructed branch torus: every relation table closes") {
  const RoundtripReport& rt = tst::shared_roundtrip();
  const AnalysisResult& r = rt.analysis;
  CHECK(r.frame_points == 32 * 32);
  CHECK(r.connection_points == 32 * 32);
  CHECK(r.guard_counts.empty());
  for (const auto* table : {&r.intrinsic_relations, &r.minimal_relations,
                            &r.minimal_relations_cbeta}) {
    CHECK_FALSE(table->empty());
    for (const RelationSummary& s : *table) {
      INFO("relation ", s.name);
      CHECK(s.evaluated_points == 32 * 32);
      CHECK(s.max_residual < 1e-8);
    }
  }
}

}  // TEST_SUITE
