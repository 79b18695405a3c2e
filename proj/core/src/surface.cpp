#include "csgeo/surface.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include "csgeo/tolerances.hpp"

namespace csgeo {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

void require_same_shape(const GridSpec& a, const GridSpec& b, const char* where) {
  if (!a.same_shape(b)) {
    std::ostringstream os;
    os << where << ": grids disagree (" << a.nu << "x" << a.nv << " vs " << b.nu
       << "x" << b.nv << ")";
    throw GridMismatch(os.str());
  }
}

// One-dimensional derivative along the u axis at (i, j).
double du1(const ScalarField& f, int i, int j) {
  const GridSpec& g = f.grid;
  const double h = g.hu();
  if (g.periodic_u) {
    const int ip = (i + 1) % g.nu, im = (i - 1 + g.nu) % g.nu;
    return (f.at(ip, j) - f.at(im, j)) / (2.0 * h);
  }
  if (i == 0)
    return (-3.0 * f.at(0, j) + 4.0 * f.at(1, j) - f.at(2, j)) / (2.0 * h);
  if (i == g.nu - 1)
    return (3.0 * f.at(i, j) - 4.0 * f.at(i - 1, j) + f.at(i - 2, j)) / (2.0 * h);
  return (f.at(i + 1, j) - f.at(i - 1, j)) / (2.0 * h);
}

double dv1(const ScalarField& f, int i, int j) {
  const GridSpec& g = f.grid;
  const double h = g.hv();
  if (g.periodic_v) {
    const int jp = (j + 1) % g.nv, jm = (j - 1 + g.nv) % g.nv;
    return (f.at(i, jp) - f.at(i, jm)) / (2.0 * h);
  }
  if (j == 0)
    return (-3.0 * f.at(i, 0) + 4.0 * f.at(i, 1) - f.at(i, 2)) / (2.0 * h);
  if (j == g.nv - 1)
    return (3.0 * f.at(i, j) - 4.0 * f.at(i, j - 1) + f.at(i, j - 2)) / (2.0 * h);
  return (f.at(i, j + 1) - f.at(i, j - 1)) / (2.0 * h);
}

double du2(const ScalarField& f, int i, int j) {
  const GridSpec& g = f.grid;
  const double h2 = g.hu() * g.hu();
  if (g.periodic_u) {
    const int ip = (i + 1) % g.nu, im = (i - 1 + g.nu) % g.nu;
    return (f.at(ip, j) - 2.0 * f.at(i, j) + f.at(im, j)) / h2;
  }
  if (i == 0)
    return (2.0 * f.at(0, j) - 5.0 * f.at(1, j) + 4.0 * f.at(2, j) - f.at(3, j)) / h2;
  if (i == g.nu - 1)
    return (2.0 * f.at(i, j) - 5.0 * f.at(i - 1, j) + 4.0 * f.at(i - 2, j) -
            f.at(i - 3, j)) / h2;
  return (f.at(i + 1, j) - 2.0 * f.at(i, j) + f.at(i - 1, j)) / h2;
}

double dv2(const ScalarField& f, int i, int j) {
  const GridSpec& g = f.grid;
  const double h2 = g.hv() * g.hv();
  if (g.periodic_v) {
    const int jp = (j + 1) % g.nv, jm = (j - 1 + g.nv) % g.nv;
    return (f.at(i, jp) - 2.0 * f.at(i, j) + f.at(i, jm)) / h2;
  }
  if (j == 0)
    return (2.0 * f.at(i, 0) - 5.0 * f.at(i, 1) + 4.0 * f.at(i, 2) - f.at(i, 3)) / h2;
  if (j == g.nv - 1)
    return (2.0 * f.at(i, j) - 5.0 * f.at(i, j - 1) + 4.0 * f.at(i, j - 2) -
            f.at(i, j - 3)) / h2;
  return (f.at(i, j + 1) - 2.0 * f.at(i, j) + f.at(i, j - 1)) / h2;
}

template <typename Op>
ScalarField map_grid(const GridSpec& g, Op&& op) {
  ScalarField out(g);
  for (int i = 0; i < g.nu; ++i)
    for (int j = 0; j < g.nv; ++j) out.at(i, j) = op(i, j);
  return out;
}

}  // namespace

bool GridSpec::same_shape(const GridSpec& o) const {
  return nu == o.nu && nv == o.nv && u0 == o.u0 && v0 == o.v0 &&
         extent_u == o.extent_u && extent_v == o.extent_v &&
         periodic_u == o.periodic_u && periodic_v == o.periodic_v;
}

Metric2 first_fundamental(const Jet2& jet) {
  Metric2 m;
  m.E = real_inner(jet.zu, jet.zu);
  m.F = real_inner(jet.zu, jet.zv);
  m.G = real_inner(jet.zv, jet.zv);
  if (m.det() <= tol::kDegenerateMetric) {
    std::ostringstream os;
    os << "first_fundamental: EG - F^2 = " << m.det() << " is not positive";
    throw DegenerateMetric(os.str());
  }
  return m;
}

Complex3 mean_curvature_vector(const Jet2& jet) {
  const Metric2 m = first_fundamental(jet);

  // Orthonormal basis of the space to project out: position and tangent plane.
  Complex3 t1 = jet.zu / std::sqrt(m.E);
  Complex3 t2 = jet.zv - real_inner(jet.zv, t1) * t1;
  t2 /= std::sqrt(real_inner(t2, t2));
  const Complex3 zn = jet.z / std::sqrt(real_inner(jet.z, jet.z));

  auto normal_part = [&](const Complex3& w) -> Complex3 {
    return w - real_inner(w, zn) * zn - real_inner(w, t1) * t1 - real_inner(w, t2) * t2;
  };

  const Complex3 nuu = normal_part(jet.zuu);
  const Complex3 nuv = normal_part(jet.zuv);
  const Complex3 nvv = normal_part(jet.zvv);
  return (m.G * nuu - 2.0 * m.F * nuv + m.E * nvv) / m.det();
}

ScalarField d_du(const ScalarField& f) {
  return map_grid(f.grid, [&](int i, int j) { return du1(f, i, j); });
}

ScalarField d_dv(const ScalarField& f) {
  return map_grid(f.grid, [&](int i, int j) { return dv1(f, i, j); });
}

ScalarField d2_duu(const ScalarField& f) {
  return map_grid(f.grid, [&](int i, int j) { return du2(f, i, j); });
}

ScalarField d2_dvv(const ScalarField& f) {
  return map_grid(f.grid, [&](int i, int j) { return dv2(f, i, j); });
}

ScalarField d2_dudv(const ScalarField& f) { return d_du(d_dv(f)); }

ScalarField surface_laplacian(const ScalarField& f, const MetricGrid& metric) {
  require_same_shape(f.grid, metric.E.grid, "surface_laplacian");
  require_same_shape(f.grid, metric.F.grid, "surface_laplacian");
  require_same_shape(f.grid, metric.G.grid, "surface_laplacian");

  const GridSpec& g = f.grid;
  const ScalarField fu = d_du(f), fv = d_dv(f);
  ScalarField p(g), q(g), sqrtg(g);
  for (int i = 0; i < g.nu; ++i) {
    for (int j = 0; j < g.nv; ++j) {
      const double E = metric.E.at(i, j), F = metric.F.at(i, j), G = metric.G.at(i, j);
      const double det = E * G - F * F;
      if (!(det > tol::kDegenerateMetric)) {
        p.at(i, j) = q.at(i, j) = sqrtg.at(i, j) = kNaN;
        continue;
      }
      const double s = std::sqrt(det);
      sqrtg.at(i, j) = s;
      p.at(i, j) = (G * fu.at(i, j) - F * fv.at(i, j)) / s;
      q.at(i, j) = (E * fv.at(i, j) - F * fu.at(i, j)) / s;
    }
  }
  const ScalarField pu = d_du(p), qv = d_dv(q);
  return map_grid(g, [&](int i, int j) {
    return (pu.at(i, j) + qv.at(i, j)) / sqrtg.at(i, j);
  });
}

ScalarField gauss_curvature_intrinsic(const MetricGrid& metric) {
  require_same_shape(metric.E.grid, metric.F.grid, "gauss_curvature_intrinsic");
  require_same_shape(metric.E.grid, metric.G.grid, "gauss_curvature_intrinsic");
  const GridSpec& g = metric.E.grid;

  const ScalarField Eu = d_du(metric.E), Ev = d_dv(metric.E), Evv = d2_dvv(metric.E);
  const ScalarField Fu = d_du(metric.F), Fv = d_dv(metric.F), Fuv = d2_dudv(metric.F);
  const ScalarField Gu = d_du(metric.G), Gv = d_dv(metric.G), Guu = d2_duu(metric.G);

  return map_grid(g, [&](int i, int j) {
    const double E = metric.E.at(i, j), F = metric.F.at(i, j), G = metric.G.at(i, j);
    const double det = E * G - F * F;
    if (!(det > tol::kDegenerateMetric)) return kNaN;

    Eigen::Matrix3d m1, m2;
    m1 << -0.5 * Evv.at(i, j) + Fuv.at(i, j) - 0.5 * Guu.at(i, j),
        0.5 * Eu.at(i, j), Fu.at(i, j) - 0.5 * Ev.at(i, j),
        Fv.at(i, j) - 0.5 * Gu.at(i, j), E, F,
        0.5 * Gv.at(i, j), F, G;
    m2 << 0.0, 0.5 * Ev.at(i, j), 0.5 * Gu.at(i, j),
        0.5 * Ev.at(i, j), E, F,
        0.5 * Gu.at(i, j), F, G;
    return (m1.determinant() - m2.determinant()) / (det * det);
  });
}

std::pair<ScalarField, ScalarField> frame_directional_derivatives(
    const ScalarField& f, const FrameCoefficients& coeffs) {
  require_same_shape(f.grid, coeffs.p1.grid, "frame_directional_derivatives");
  require_same_shape(f.grid, coeffs.q1.grid, "frame_directional_derivatives");
  require_same_shape(f.grid, coeffs.p2.grid, "frame_directional_derivatives");
  require_same_shape(f.grid, coeffs.q2.grid, "frame_directional_derivatives");

  const ScalarField fu = d_du(f), fv = d_dv(f);
  const GridSpec& g = f.grid;
  ScalarField f1(g), f2(g);
  for (int i = 0; i < g.nu; ++i) {
    for (int j = 0; j < g.nv; ++j) {
      f1.at(i, j) = coeffs.p1.at(i, j) * fu.at(i, j) + coeffs.q1.at(i, j) * fv.at(i, j);
      f2.at(i, j) = coeffs.p2.at(i, j) * fu.at(i, j) + coeffs.q2.at(i, j) * fv.at(i, j);
    }
  }
  return {std::move(f1), std::move(f2)};
}

double field_max_abs(const ScalarField& f) {
  double m = 0.0;
  bool any = false;
  for (double x : f.values) {
    if (std::isnan(x)) continue;
    any = true;
    m = std::max(m, std::abs(x));
  }
  return any ? m : 0.0;
}

double field_mean_abs(const ScalarField& f) {
  double s = 0.0;
  int n = 0;
  for (double x : f.values) {
    if (std::isnan(x)) continue;
    s += std::abs(x);
    ++n;
  }
  return n > 0 ? s / n : 0.0;
}

int field_undefined_count(const ScalarField& f) {
  int n = 0;
  for (double x : f.values)
    if (std::isnan(x)) ++n;
  return n;
}

}  // namespace csgeo
