#pragma once

#include "csgeo/ambient.hpp"

namespace csgeo {

/// Exact 2-jet of an immersion R^2 -> C^3 at one parameter point.
struct Jet2 {
  Complex3 z, zu, zv, zuu, zuv, zvv;

  bool finite() const {
    for (const Complex3* p : {&z, &zu, &zv, &zuu, &zuv, &zvv})
      for (int j = 0; j < 3; ++j)
        if (!std::isfinite((*p)[j].real()) || !std::isfinite((*p)[j].imag()))
          return false;
    return true;
  }
};

/// Source of exact 2-jets anywhere on the parameter plane. Implemented by the
/// expression evaluator and by reconstructed surfaces.
class JetEvaluator {
public:
  virtual ~JetEvaluator() = default;
  virtual Jet2 jet(double u, double v) const = 0;
};

}  // namespace csgeo
