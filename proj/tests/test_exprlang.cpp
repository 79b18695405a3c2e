#include <cmath>
#include <map>
#include <string>
#include <vector>

#include <doctest.h>

#include "csgeo/errors.hpp"
#include "csgeo/exprlang.hpp"
#include "helpers.hpp"

using namespace csgeo;
using expr::NodeKind;

namespace {

const std::map<std::string, double> kNoParams;

double cdist(const Complex& a, const Complex& b) { return std::abs(a - b); }

}  // namespace

TEST_SUITE("exprlang") {

TEST_CASE("parses a product of a reciprocal square root and an exponential") {
  auto e = expr::parse_expression("(1/sqrt(3))*exp(i*u)", kNoParams);
  REQUIRE(e != nullptr);
  CHECK(e->kind == NodeKind::Mul);
  REQUIRE(e->lhs != nullptr);
  CHECK(e->lhs->kind == NodeKind::Div);
  CHECK(e->lhs->lhs->kind == NodeKind::Number);
  CHECK(e->lhs->rhs->kind == NodeKind::Call);
  CHECK(e->lhs->rhs->name == "sqrt");
  REQUIRE(e->rhs != nullptr);
  CHECK(e->rhs->kind == NodeKind::Call);
  CHECK(e->rhs->name == "exp");
  CHECK(e->rhs->lhs->kind == NodeKind::Mul);
  CHECK(e->rhs->lhs->lhs->kind == NodeKind::Imaginary);
  CHECK(e->rhs->lhs->rhs->kind == NodeKind::VarU);
}

TEST_CASE("unbalanced parenthesis fails at end of input expecting ')'") {
  const std::string text = "exp(i*(u+v)";
  bool threw = false;
  try {
    expr::parse_expression(text, kNoParams);
  } catch (const ParseError& e) {
    threw = true;
    CHECK(e.offset() == text.size());
    bool wants_close = false;
    for (const auto& tok : e.expected())
      if (tok.find(')') != std::string::npos) wants_close = true;
    CHECK(wants_close);
  }
  CHECK(threw);
}

TEST_CASE("an undeclared identifier is rejected by name and position") {
  bool threw = false;
  try {
    expr::parse_expression("u + w", kNoParams);
  } catch (const UnknownIdentifier& e) {
    threw = true;
    CHECK(e.name() == "w");
    CHECK(e.offset() == 4);
  }
  CHECK(threw);
}

TEST_CASE("a declared parameter is accepted where an identifier appears") {
  auto e = expr::parse_expression("cos(r)*exp(i*u)", {{"r", 0.5}});
  REQUIRE(e != nullptr);
  auto j = expr::eval_component(e, {{"r", 0.5}}, 0.0, 0.0);
  CHECK(cdist(j.f, Complex(std::cos(0.5), 0.0)) < 1e-15);
}

TEST_CASE("three-component surface spec loads with empty parameters") {
  auto ast = expr::load_surface_spec(
      R"x({"components":["cos(v)*exp(i*u)","sin(v)","0"],"params":{}})x");
  for (const auto& c : ast.components) REQUIRE(c != nullptr);
  CHECK(ast.params.empty());
  auto j = expr::eval_jet2(ast, 0.0, 0.0);
  CHECK(cdist(j.z[0], Complex(1.0, 0.0)) < 1e-15);
  CHECK(cdist(j.z[1], Complex(0.0, 0.0)) < 1e-15);
}

TEST_CASE("print-parse round trip is structurally stable on a corpus") {
  const std::map<std::string, double> params = {{"r", 0.5}, {"s", 2.0}};
  const std::vector<std::string> corpus = {
      "u",
      "v",
      "i",
      "pi",
      "1.5",
      "1.5e-3*u",
      "-u",
      "-u^2",
      "u+v",
      "u-v-1",
      "u*v/2",
      "2^3^2",
      "(u+v)^2",
      "u^-1",
      "exp(i*u)",
      "exp(-i*(u+v))",
      "sin(u)*cos(v)",
      "sqrt(3)/3",
      "log(2+u)",
      "cos(r)*exp(i*u)",
      "s*sin(v)",
      "(1/sqrt(3))*exp(i*u)",
      "1/(2+cos(v))",
      "u*v*i*pi",
      "sin(cos(exp(u)))",
      "-(u+v)*-(u-v)",
  };
  for (const auto& text : corpus) {
    CAPTURE(text);
    auto e0 = expr::parse_expression(text, params);
    const std::string printed = expr::to_string(e0);
    CAPTURE(printed);
    auto e1 = expr::parse_expression(printed, params);
    CHECK(expr::structurally_equal(e0, e1));
  }
}

TEST_CASE("surface spec serialization round trips") {
  auto ast = expr::load_surface_spec(
      R"x({"components":["cos(r)*exp(i*u)","sin(r)*exp(i*v)","0"],)x"
      R"x("params":{"r":0.5235987755982988}})x");
  auto again = expr::load_surface_spec(expr::surface_spec_to_json(ast));
  CHECK(expr::structurally_equal(ast, again));
}

TEST_CASE("exponential jet at u = 0: value 1, first derivative i, second -1") {
  auto e = expr::parse_expression("exp(i*u)", kNoParams);
  auto j = expr::eval_component(e, kNoParams, 0.0, 0.3);
  CHECK(cdist(j.f, Complex(1, 0)) < 1e-15);
  CHECK(cdist(j.fu, Complex(0, 1)) < 1e-15);
  CHECK(cdist(j.fuu, Complex(-1, 0)) < 1e-15);
  CHECK(cdist(j.fv, Complex(0, 0)) < 1e-15);
  CHECK(cdist(j.fuv, Complex(0, 0)) < 1e-15);
}

TEST_CASE("sine jet at v = 0: value 0, first derivative 1, second 0") {
  auto e = expr::parse_expression("sin(v)", kNoParams);
  auto j = expr::eval_component(e, kNoParams, 0.2, 0.0);
  CHECK(cdist(j.f, Complex(0, 0)) < 1e-15);
  CHECK(cdist(j.fv, Complex(1, 0)) < 1e-15);
  CHECK(cdist(j.fvv, Complex(0, 0)) < 1e-15);
  CHECK(cdist(j.fu, Complex(0, 0)) < 1e-15);
}

TEST_CASE("power jets: u^3 at u = 2") {
  auto e = expr::parse_expression("u^3", kNoParams);
  auto j = expr::eval_component(e, kNoParams, 2.0, 0.0);
  CHECK(cdist(j.f, Complex(8, 0)) < 1e-14);
  CHECK(cdist(j.fu, Complex(12, 0)) < 1e-14);
  CHECK(cdist(j.fuu, Complex(12, 0)) < 1e-14);
}

TEST_CASE("mixed second derivative of (u+v)^2 is 2") {
  auto e = expr::parse_expression("(u+v)^2", kNoParams);
  auto j = expr::eval_component(e, kNoParams, 0.7, -0.2);
  CHECK(cdist(j.fuv, Complex(2, 0)) < 1e-14);
}

TEST_CASE("pi is the usual constant") {
  auto e = expr::parse_expression("cos(pi)", kNoParams);
  auto j = expr::eval_component(e, kNoParams, 0.0, 0.0);
  CHECK(cdist(j.f, Complex(-1, 0)) < 1e-15);
}

TEST_CASE("corner jet of the flat minimal torus matches hand differentiation") {
  const Fixture& fx = fixture_by_name("legendrian_torus");
  auto j = expr::eval_jet2(fx.ast, 0.0, 0.0);
  const double s = 1.0 / std::sqrt(3.0);
  CHECK(cdist(j.z[0], Complex(s, 0)) < 1e-15);
  CHECK(cdist(j.z[1], Complex(s, 0)) < 1e-15);
  CHECK(cdist(j.z[2], Complex(s, 0)) < 1e-15);
  CHECK(cdist(j.zu[0], Complex(0, s)) < 1e-15);
  CHECK(cdist(j.zu[1], Complex(0, 0)) < 1e-15);
  CHECK(cdist(j.zu[2], Complex(0, -s)) < 1e-15);
}

TEST_CASE("evaluator matches hand-coded jets of every built-in example") {
  const double us[] = {0.0, 0.4, 1.9, 4.4};
  const double vs[] = {0.35, 0.8, 1.1};
  for (const Fixture& fx : builtin_fixtures()) {
    CAPTURE(fx.name);
    for (double u : us) {
      for (double v : vs) {
        auto got = expr::eval_jet2(fx.ast, u, v);
        auto want = tst::hand_jet(fx, u, v);
        CHECK(tst::jet_rel_dev(got, want) < 1e-12);
      }
    }
  }
}

TEST_CASE("jet derivatives agree with finite differences of values") {
  const Fixture& fx = fixture_by_name("legendrian_torus");
  const double u = 0.7, v = 0.4, h = 1e-4;
  auto at = [&](double uu, double vv) { return expr::eval_jet2(fx.ast, uu, vv); };
  auto c = at(u, v);
  auto up = at(u + h, v), um = at(u - h, v);
  auto vp = at(u, v + h), vm = at(u, v - h);
  auto uvpp = at(u + h, v + h), uvpm = at(u + h, v - h);
  auto uvmp = at(u - h, v + h), uvmm = at(u - h, v - h);
  for (int k = 0; k < 3; ++k) {
    CHECK(cdist((up.z[k] - um.z[k]) / (2 * h), c.zu[k]) < 1e-7);
    CHECK(cdist((vp.z[k] - vm.z[k]) / (2 * h), c.zv[k]) < 1e-7);
    CHECK(cdist((up.z[k] - 2.0 * c.z[k] + um.z[k]) / (h * h), c.zuu[k]) < 1e-6);
    CHECK(cdist((vp.z[k] - 2.0 * c.z[k] + vm.z[k]) / (h * h), c.zvv[k]) < 1e-6);
    CHECK(cdist((uvpp.z[k] - uvpm.z[k] - uvmp.z[k] + uvmm.z[k]) / (4 * h * h),
                c.zuv[k]) < 1e-6);
  }
}

TEST_CASE("division by zero at the evaluation point is a domain error") {
  auto e = expr::parse_expression("1/u", kNoParams);
  CHECK_THROWS_AS(expr::eval_component(e, kNoParams, 0.0, 0.3), DomainError);
}

TEST_CASE("sqrt and log reject the branch cut; pow rejects negative bases") {
  CHECK_THROWS_AS(expr::eval_component(
                      expr::parse_expression("sqrt(u-1)", kNoParams),
                      kNoParams, 0.0, 0.0),
                  DomainError);
  CHECK_THROWS_AS(expr::eval_component(
                      expr::parse_expression("log(u)", kNoParams),
                      kNoParams, 0.0, 0.0),
                  DomainError);
  CHECK_THROWS_AS(expr::eval_component(
                      expr::parse_expression("(0-2)^0.5", kNoParams),
                      kNoParams, 0.0, 0.0),
                  DomainError);
}

}  // TEST_SUITE
