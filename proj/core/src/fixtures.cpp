#include "csgeo/fixtures.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

#include "csgeo/errors.hpp"

namespace csgeo {
namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kTwoPi = 2.0 * std::numbers::pi;

Fixture make(const std::string& name, const std::string& summary,
             const std::array<std::string, 3>& components,
             const std::map<std::string, double>& params,
             const GridSpec& grid) {
  Fixture f;
  f.name = name;
  f.summary = summary;
  f.ast.params = params;
  for (int k = 0; k < 3; ++k) {
    f.ast.components[static_cast<std::size_t>(k)] =
        expr::parse_expression(components[static_cast<std::size_t>(k)], params);
  }
  f.grid = grid;
  return f;
}

std::vector<Fixture> build_all() {
  std::vector<Fixture> out;

  GridSpec torus;
  torus.nu = torus.nv = 48;
  torus.u0 = torus.v0 = 0.0;
  torus.extent_u = torus.extent_v = kTwoPi;
  torus.periodic_u = torus.periodic_v = true;

  out.push_back(make(
      "legendrian_torus",
      "flat minimal torus tangent to the contact distribution everywhere",
      {"exp(i*u)/sqrt(3)", "exp(i*v)/sqrt(3)", "exp(-i*(u+v))/sqrt(3)"}, {},
      torus));

  out.push_back(make(
      "clifford_s3",
      "minimal Clifford torus contained in a great 3-sphere; the Reeb field "
      "is everywhere tangent",
      {"cos(r)*exp(i*u)", "sin(r)*exp(i*v)", "0"}, {{"r", kPi / 4.0}}, torus));

  GridSpec band;
  band.nu = 48;
  band.nv = 33;
  band.u0 = 0.0;
  band.v0 = 0.3;
  band.extent_u = kTwoPi;
  band.extent_v = 0.9;
  band.periodic_u = true;
  band.periodic_v = false;

  out.push_back(make(
      "great_sphere",
      "totally geodesic 2-sphere band; the holomorphic angle degenerates",
      {"cos(v)*exp(i*u)", "sin(v)", "0"}, {}, band));

  out.push_back(make(
      "clifford_nonminimal",
      "non-minimal product torus inside a great 3-sphere",
      {"cos(r)*exp(i*u)", "sin(r)*exp(i*v)", "0"}, {{"r", kPi / 6.0}}, torus));

  return out;
}

}  // namespace

const std::vector<Fixture>& builtin_fixtures() {
  static const std::vector<Fixture> all = build_all();
  return all;
}

const Fixture& fixture_by_name(const std::string& name) {
  for (const Fixture& f : builtin_fixtures()) {
    if (f.name == name) return f;
  }
  std::ostringstream os;
  os << "unknown fixture '" << name << "'; available:";
  for (const Fixture& f : builtin_fixtures()) os << ' ' << f.name;
  throw ConfigError(os.str());
}

}  // namespace csgeo
