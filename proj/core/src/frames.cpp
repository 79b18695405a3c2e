#include "csgeo/frames.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <vector>

#include "csgeo/tolerances.hpp"

namespace csgeo {

namespace {

const Complex kI{0.0, 1.0};

Complex3 normal_projection(const Jet2& jet, const Complex3& w, const Complex3& t1,
                           const Complex3& t2) {
  return w - real_inner(w, jet.z) * jet.z - real_inner(w, t1) * t1 -
         real_inner(w, t2) * t2;
}

AdaptedFrame build(const Jet2& jet, bool tolerant) {
  const Metric2 m = first_fundamental(jet);
  const Complex3 xi = reeb(jet.z);  // validates |z| = 1

  // Orthonormal tangent basis, t1 along zu.
  const Complex3 t1 = jet.zu / std::sqrt(m.E);
  Complex3 t2 = jet.zv - real_inner(jet.zv, t1) * t1;
  t2 /= std::sqrt(real_inner(t2, t2));

  // Tangential part of the Reeb field. sin(beta) is the norm of the normal
  // part, computed directly: the 1 - cos^2 route cancels catastrophically
  // right where the degeneracy guard has to decide.
  const double c1 = real_inner(xi, t1), c2 = real_inner(xi, t2);
  const Complex3 xi_tan = c1 * t1 + c2 * t2;
  const Complex3 xi_nor = xi - xi_tan;
  const double cos_beta_mag = std::sqrt(c1 * c1 + c2 * c2);
  const double sin_beta = std::sqrt(real_inner(xi_nor, xi_nor));
  if (sin_beta < tol::kContactAngleZero) {
    std::ostringstream os;
    os << "adapted_frame: Reeb field tangent to the surface (sin beta = "
       << sin_beta << ")";
    throw ContactAngleZero(os.str());
  }

  AdaptedFrame f;
  f.z = jet.z;

  if (cos_beta_mag < tol::kLegendrian) {
    // Legendrian gauge: the tangent plane sits inside the contact
    // distribution and every tangent direction is characteristic. Pin e1 to
    // the normalized d/du direction for determinism.
    f.legendrian_gauge = true;
    f.e1 = t1;
    f.e2 = t2;
  } else {
    f.e2 = xi_tan / cos_beta_mag;
    Complex3 e1 = t1 - real_inner(t1, f.e2) * f.e2;
    double n = std::sqrt(real_inner(e1, e1));
    if (n < 1e-6) {
      e1 = t2 - real_inner(t2, f.e2) * f.e2;
      n = std::sqrt(real_inner(e1, e1));
    }
    f.e1 = e1 / n;
  }

  const double cos_beta = real_inner(xi, f.e2);
  f.beta = std::atan2(sin_beta, cos_beta);
  const double sb = sin_beta;
  f.v = (f.e2 - cos_beta * xi) / sb;

  double cos_alpha = real_inner(kI * f.e1, f.v);

  // Sign gauge of e1: cos(alpha) >= 0, ties broken by a >= 0, then by
  // alignment with the coordinate directions.
  if (cos_alpha < -tol::kCosAlphaTie) {
    f.e1 = -f.e1;
    cos_alpha = -cos_alpha;
  } else if (std::abs(cos_alpha) <= tol::kCosAlphaTie) {
    const auto [p, q] = tangent_coefficients(f.e1, jet);
    const Complex3 dde1 =
        p * p * jet.zuu + 2.0 * p * q * jet.zuv + q * q * jet.zvv;
    const Complex3 ii = normal_projection(jet, dde1, t1, t2);
    // e3 direction up to normalization; its sign flips with e1.
    const Complex3 e3_dir = kI * f.e1 - cos_alpha * f.v;
    const double a_sign = real_inner(ii, e3_dir);
    if (a_sign < -tol::kCosAlphaTie) {
      f.e1 = -f.e1;
      cos_alpha = -cos_alpha;
    } else if (std::abs(a_sign) <= tol::kCosAlphaTie) {
      const double along_u = real_inner(f.e1, t1);
      if (along_u < -1e-6 ||
          (std::abs(along_u) <= 1e-6 && real_inner(f.e1, t2) < 0.0)) {
        f.e1 = -f.e1;
        cos_alpha = -cos_alpha;
      }
    }
  }

  // Same cancellation story for sin(alpha): measure it as the norm of the
  // residual that e3 normalizes, which the identity |i e1 - cos(alpha) v| =
  // sin(alpha) makes exact.
  const Complex3 e3_residual = kI * f.e1 - cos_alpha * f.v;
  const double sin_alpha = std::sqrt(real_inner(e3_residual, e3_residual));
  f.alpha = std::atan2(sin_alpha, cos_alpha);
  f.e5 = (xi - cos_beta * f.e2) / sb;

  if (sin_alpha < tol::kAlphaDegenerate) {
    if (!tolerant) {
      std::ostringstream os;
      os << "adapted_frame: sin alpha = " << sin_alpha
         << "; normal legs e3, e4 are undefined";
      throw HolomorphicAngleDegenerate(os.str());
    }
    f.alpha_degenerate = true;
    f.e3.setZero();
    f.e4.setZero();
    return f;
  }

  f.e3 = e3_residual / sin_alpha;
  f.e4 = (cos_alpha * f.e1 + kI * f.v) / sin_alpha;
  return f;
}

}  // namespace

AdaptedFrame adapted_frame(const Jet2& jet) { return build(jet, false); }

AdaptedFrame adapted_frame_tolerant(const Jet2& jet) { return build(jet, true); }

double FrameConsistency::max() const {
  return std::max({v_relation, iv_relation, xi_relation, ie1_relation,
                   ie2_relation, orthonormality});
}

FrameConsistency frame_consistency(const AdaptedFrame& f) {
  const double sb = std::sin(f.beta), cb = std::cos(f.beta);
  const double sa = std::sin(f.alpha), ca = std::cos(f.alpha);
  const Complex3 xi = kI * f.z;

  auto norm = [](const Complex3& w) { return std::sqrt(real_inner(w, w)); };

  FrameConsistency r;
  r.v_relation = norm(f.v - (sb * f.e2 - cb * f.e5));
  r.iv_relation = norm(kI * f.v - (sa * f.e4 - ca * f.e1));
  r.xi_relation = norm(xi - (cb * f.e2 + sb * f.e5));
  r.ie1_relation = norm(kI * f.e1 - (ca * sb * f.e2 + sa * f.e3 - ca * cb * f.e5));
  r.ie2_relation =
      norm(kI * f.e2 - (-cb * f.z - ca * sb * f.e1 + sa * sb * f.e4));

  // Orthonormality over the defined legs (e3, e4 drop out when degenerate).
  std::vector<const Complex3*> legs = {&f.z, &f.e1, &f.e2, &f.e5};
  if (!f.alpha_degenerate) {
    legs.push_back(&f.e3);
    legs.push_back(&f.e4);
  }
  double ortho = 0.0;
  for (std::size_t p = 0; p < legs.size(); ++p)
    for (std::size_t q = p; q < legs.size(); ++q)
      ortho = std::max(ortho, std::abs(real_inner(*legs[p], *legs[q]) -
                                       (p == q ? 1.0 : 0.0)));
  r.orthonormality = ortho;
  return r;
}

std::pair<double, double> tangent_coefficients(const Complex3& w, const Jet2& jet) {
  const Metric2 m = first_fundamental(jet);
  const double wu = real_inner(w, jet.zu), wv = real_inner(w, jet.zv);
  const double det = m.det();
  return {(m.G * wu - m.F * wv) / det, (m.E * wv - m.F * wu) / det};
}

double align_frame(AdaptedFrame& f, const AdaptedFrame& ref) {
  const double s1 = real_inner(f.e1, ref.e1) < 0.0 ? -1.0 : 1.0;
  const double s2 = real_inner(f.e2, ref.e2) < 0.0 ? -1.0 : 1.0;
  if (s1 < 0.0) {
    f.e1 = -f.e1;
    f.e3 = -f.e3;
  }
  if (s2 < 0.0) {
    f.e2 = -f.e2;
    f.v = -f.v;
    f.e4 = -f.e4;
    f.beta = M_PI - f.beta;
  }
  if (s1 * s2 < 0.0) f.alpha = M_PI - f.alpha;

  auto norm = [](const Complex3& w) { return std::sqrt(real_inner(w, w)); };
  double worst = std::max({norm(f.z - ref.z), norm(f.e1 - ref.e1),
                           norm(f.e2 - ref.e2), norm(f.v - ref.v),
                           norm(f.e5 - ref.e5)});
  if (!f.alpha_degenerate && !ref.alpha_degenerate)
    worst = std::max({worst, norm(f.e3 - ref.e3), norm(f.e4 - ref.e4)});
  return worst;
}

}  // namespace csgeo
