#include <cmath>

#include <doctest.h>

#include "csgeo/connection.hpp"
#include "csgeo/errors.hpp"
#include "csgeo/exprlang.hpp"
#include "csgeo/fixtures.hpp"
#include "helpers.hpp"

using namespace csgeo;

namespace {

const RelationResidual* find(const std::vector<RelationResidual>& rows,
                             const std::string& name) {
  for (const auto& r : rows)
    if (r.name == name) return &r;
  return nullptr;
}

ConnectionTable torus_table() {
  static const ConnectionTable t =
      connection_table(tst::torus_surface(), 0.5, 0.7);
  return t;
}

}  // namespace

TEST_SUITE("connection") {

TEST_CASE("the reconstructed torus measures its defining constants") {
  ConnectionTable t = torus_table();
  CHECK(t.beta == doctest::Approx(tst::kBetaStar).epsilon(1e-9));
  CHECK(t.alpha == doctest::Approx(tst::kAlphaStar).epsilon(1e-9));
  CHECK(std::abs(t.a) == doctest::Approx(tst::kAStar).epsilon(1e-9));
  CHECK(std::abs(t.b) < 1e-9);
  CHECK(std::abs(t.alpha1) < 1e-8);
  CHECK(std::abs(t.alpha2) < 1e-8);
  CHECK(std::abs(t.beta1) < 1e-8);
  CHECK(std::abs(t.beta2) < 1e-8);
}

TEST_CASE("every measured table is antisymmetric and II-symmetric") {
  CHECK(torus_table().antisymmetry < 1e-8);
  CHECK(torus_table().ii_symmetry < 1e-7);
  const Fixture& fx = fixture_by_name("legendrian_torus");
  expr::ExpressionSurface s(fx.ast);
  ConnectionTable t = connection_table(s, 0.9, 1.4);
  CHECK(t.antisymmetry < 1e-8);
  CHECK(t.legendrian_gauge);
}

TEST_CASE("the structure relations hold on the reconstructed torus") {
  auto rows = check_intrinsic_relations(torus_table());
  CHECK(rows.size() == 13);
  for (const auto& r : rows) {
    CAPTURE(r.name);
    CHECK(r.applicable);
    CHECK(r.residual < 1e-6);
  }
}

TEST_CASE("tan-beta relations are guarded on a contact-tangent surface") {
  const Fixture& fx = fixture_by_name("legendrian_torus");
  expr::ExpressionSurface s(fx.ast);
  ConnectionTable t = connection_table(s, 0.9, 1.4);
  auto rows = check_intrinsic_relations(t);
  const RelationResidual* conex = find(rows, "conex");
  REQUIRE(conex != nullptr);
  CHECK_FALSE(conex->applicable);
  CHECK(conex->guard == "cos_beta_small");
  // The cot-beta legs stay applicable: cot(pi/2) = 0 is harmless.
  for (const char* name : {"theta31", "theta35", "theta45", "theta53"}) {
    const RelationResidual* row = find(rows, name);
    REQUIRE(row != nullptr);
    CHECK(row->applicable);
    CHECK(row->residual < 1e-6);
  }
}

TEST_CASE("minimal connection forms hold in the diagonal gauge") {
  auto rows = check_minimal_connection_forms(torus_table(), 0.0, true);
  for (const auto& r : rows) {
    CAPTURE(r.name);
    CHECK(r.applicable);
    CHECK(r.residual < 1e-6);
  }
}

TEST_CASE("perturbing the shape coefficient shifts theta35 by a cot(beta)") {
  ConnectionTable t = torus_table();
  t.a += 0.1;
  auto rows = check_minimal_connection_forms(t, 0.0, true);
  const RelationResidual* row = find(rows, "theta35");
  REQUIRE(row != nullptr);
  const double expected = 0.1 / std::tan(t.beta);
  CHECK(row->residual == doctest::Approx(expected).epsilon(0.15));
}

TEST_CASE("the minimality gate rejects a non-minimal surface") {
  CHECK_THROWS_AS(check_minimal_connection_forms(torus_table(), 0.01, true),
                  NotMinimal);
}

TEST_CASE("the diagonal-gauge gate rejects b away from zero") {
  ConnectionTable t = torus_table();
  t.b = 0.2;
  CHECK_THROWS_AS(check_minimal_connection_forms(t, 0.0, true),
                  GaugeNotDiagonal);
}

TEST_CASE("without the constant-angle reduction the general forms still hold") {
  const Fixture& fx = fixture_by_name("legendrian_torus");
  expr::ExpressionSurface s(fx.ast);
  ConnectionTable t = connection_table(s, 0.9, 1.4);
  CHECK(std::abs(std::abs(t.b) - 1.0 / std::sqrt(2.0)) < 1e-6);
  CHECK_THROWS_AS(check_minimal_connection_forms(t, 0.0, true),
                  GaugeNotDiagonal);
  auto rows = check_minimal_connection_forms(t, 0.0, false);
  for (const auto& r : rows) {
    CAPTURE(r.name);
    if (!r.applicable) {
      CHECK(r.guard == "cos_beta_small");
      continue;
    }
    CHECK(r.residual < 1e-6);
  }
}

TEST_CASE("second fundamental form traces vanish on minimal surfaces") {
  const Fixture& fx = fixture_by_name("legendrian_torus");
  expr::ExpressionSurface s(fx.ast);
  ConnectionTable t = connection_table(s, 0.9, 1.4);
  for (int k = 3; k <= 5; ++k) {
    CAPTURE(k);
    CHECK(std::abs(t.theta(1, k, 0) + t.theta(2, k, 1)) < 1e-8);
  }
}

TEST_CASE("a reference frame pins the measurement gauge") {
  AdaptedFrame ref = adapted_frame(tst::torus_surface().jet(0.5, 0.7));
  ConnectionTable t =
      connection_table(tst::torus_surface(), 0.5, 0.7, {}, ref);
  ConnectionTable base = torus_table();
  CHECK(t.a == doctest::Approx(base.a).epsilon(1e-10));
  CHECK(t.beta == doctest::Approx(base.beta).epsilon(1e-12));
}

}  // TEST_SUITE
