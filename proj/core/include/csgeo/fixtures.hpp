#pragma once

#include <string>
#include <vector>

#include "csgeo/exprlang.hpp"
#include "csgeo/surface.hpp"

namespace csgeo {

/// A named example surface with its natural analysis window.
struct Fixture {
  std::string name;
  std::string summary;
  expr::SurfaceAst ast;
  GridSpec grid;
};

/// The built-in examples, in a fixed order:
///   legendrian_torus     - flat minimal torus tangent to the contact planes
///   clifford_s3          - minimal Clifford torus inside a great 3-sphere
///   great_sphere         - totally geodesic 2-sphere
///   clifford_nonminimal  - non-minimal product torus inside a great 3-sphere
const std::vector<Fixture>& builtin_fixtures();

/// Lookup by name; throws ConfigError listing the valid names.
const Fixture& fixture_by_name(const std::string& name);

}  // namespace csgeo
