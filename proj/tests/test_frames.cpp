#include <cmath>

#include <doctest.h>

#include "csgeo/errors.hpp"
#include "csgeo/exprlang.hpp"
#include "csgeo/fixtures.hpp"
#include "csgeo/frames.hpp"
#include "helpers.hpp"

using namespace csgeo;

namespace {

Jet2 apply_unitary(const Eigen::Matrix3cd& q, const Jet2& j) {
  Jet2 out = j;
  out.z = q * j.z;
  out.zu = q * j.zu;
  out.zv = q * j.zv;
  out.zuu = q * j.zuu;
  out.zuv = q * j.zuv;
  out.zvv = q * j.zvv;
  return out;
}

}  // namespace

TEST_SUITE("frames") {

TEST_CASE("the flat minimal torus is tangent to the contact planes") {
  const Fixture& fx = fixture_by_name("legendrian_torus");
  AdaptedFrame f = adapted_frame(expr::eval_jet2(fx.ast, 0.3, 0.8));
  CHECK(std::abs(f.beta - tst::kPi / 2.0) < 1e-9);
  CHECK(f.legendrian_gauge);
  CHECK(frame_consistency(f).max() < 1e-10);
}

TEST_CASE("a torus inside a great 3-sphere has the Reeb field tangent") {
  const Fixture& fx = fixture_by_name("clifford_s3");
  CHECK_THROWS_AS(adapted_frame(expr::eval_jet2(fx.ast, 1.0, 0.7)),
                  ContactAngleZero);
}

TEST_CASE("the meridian sphere chart degenerates the holomorphic angle") {
  const Fixture& fx = fixture_by_name("great_sphere");
  Jet2 j = expr::eval_jet2(fx.ast, 1.0, 0.7);
  CHECK_THROWS_AS(adapted_frame(j), HolomorphicAngleDegenerate);

  AdaptedFrame f = adapted_frame_tolerant(j);
  CHECK(f.alpha_degenerate);
  CHECK(f.beta == doctest::Approx(0.7).epsilon(1e-12));
  // e1 is the characteristic direction: here the normalized d/dv leg.
  Complex3 tv = j.zv / std::sqrt(real_inner(j.zv, j.zv));
  CHECK(std::abs(real_inner(f.e1, tv)) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(f.e3.norm() == 0.0);
  CHECK(f.e4.norm() == 0.0);
}

TEST_CASE("frames satisfy the algebraic frame relations") {
  for (double u : {0.4, 2.1}) {
    for (double v : {0.9, 4.0}) {
      AdaptedFrame f = adapted_frame(tst::torus_surface().jet(u, v));
      CHECK(frame_consistency(f).max() < 1e-10);
    }
  }
}

TEST_CASE("negating e5 breaks only the Reeb relation, by twice sin(beta)") {
  AdaptedFrame f = adapted_frame(tst::torus_surface().jet(0.4, 0.9));
  f.e5 = -f.e5;
  FrameConsistency c = frame_consistency(f);
  CHECK(c.xi_relation ==
        doctest::Approx(2.0 * std::sin(f.beta)).epsilon(1e-6));
}

TEST_CASE("the angles are invariant under the unitary symmetry group") {
  Eigen::Matrix3cd phases = Eigen::Matrix3cd::Zero();
  phases(0, 0) = std::polar(1.0, 0.3);
  phases(1, 1) = std::polar(1.0, -0.7);
  phases(2, 2) = std::polar(1.0, 0.4);
  Eigen::Matrix3cd rot = Eigen::Matrix3cd::Identity();
  const double t = 0.5;
  rot(0, 0) = std::cos(t);
  rot(0, 1) = -std::sin(t);
  rot(1, 0) = std::sin(t);
  rot(1, 1) = std::cos(t);
  const Eigen::Matrix3cd q = phases * rot;

  Jet2 j = tst::torus_surface().jet(1.3, 2.2);
  AdaptedFrame f0 = adapted_frame(j);
  AdaptedFrame f1 = adapted_frame(apply_unitary(q, j));
  CHECK(f1.beta == doctest::Approx(f0.beta).epsilon(1e-12));
  CHECK(f1.alpha == doctest::Approx(f0.alpha).epsilon(1e-12));
  CHECK(frame_consistency(f1).max() < 1e-10);
}

TEST_CASE("tangent coefficients invert the frame expansion") {
  Jet2 j = tst::torus_surface().jet(0.8, 1.1);
  Complex3 w = 0.3 * j.zu + 0.7 * j.zv;
  auto [p, q] = tangent_coefficients(w, j);
  CHECK(p == doctest::Approx(0.3).epsilon(1e-12));
  CHECK(q == doctest::Approx(0.7).epsilon(1e-12));
}

TEST_CASE("sign alignment undoes a characteristic-direction flip") {
  Jet2 j = tst::torus_surface().jet(0.8, 1.1);
  AdaptedFrame ref = adapted_frame(j);
  AdaptedFrame flipped = ref;
  flipped.e1 = -flipped.e1;
  flipped.e3 = -flipped.e3;
  flipped.alpha = tst::kPi - flipped.alpha;
  double dist = align_frame(flipped, ref);
  CHECK(dist < 1e-12);
  CHECK(flipped.alpha == doctest::Approx(ref.alpha).epsilon(1e-12));
  CHECK((flipped.e1 - ref.e1).norm() < 1e-12);
}

TEST_CASE("alignment of nearby frames reports a small distance") {
  AdaptedFrame ref = adapted_frame(tst::torus_surface().jet(0.8, 1.1));
  AdaptedFrame close = adapted_frame(tst::torus_surface().jet(0.8 + 1e-4, 1.1));
  double dist = align_frame(close, ref);
  CHECK(dist < 1e-3);
  CHECK(dist > 0.0);
}

}  // TEST_SUITE
