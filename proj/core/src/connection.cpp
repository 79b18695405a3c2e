#include "csgeo/connection.hpp"

#include <array>
#include <cmath>
#include <sstream>

#include <nlohmann/json.hpp>

#include "csgeo/tolerances.hpp"

namespace csgeo {

namespace {

using Vec2 = Eigen::Vector2d;

struct RawTable {
  double coeff[6][6][2] = {};
  double alpha = 0.0, beta = 0.0;
  double alpha1 = 0.0, alpha2 = 0.0;
  double beta1 = 0.0, beta2 = 0.0;
  double alignment = 0.0;
};

std::array<const Complex3*, 6> rows(const AdaptedFrame& f) {
  return {&f.z, &f.e1, &f.e2, &f.e3, &f.e4, &f.e5};
}

RawTable measure(const JetEvaluator& surf, double u, double v, double h,
                 const AdaptedFrame& center, const Jet2& jet_center) {
  AdaptedFrame fup = adapted_frame(surf.jet(u + h, v));
  AdaptedFrame fum = adapted_frame(surf.jet(u - h, v));
  AdaptedFrame fvp = adapted_frame(surf.jet(u, v + h));
  AdaptedFrame fvm = adapted_frame(surf.jet(u, v - h));

  RawTable raw;
  raw.alpha = center.alpha;
  raw.beta = center.beta;
  for (AdaptedFrame* f : {&fup, &fum, &fvp, &fvm})
    raw.alignment = std::max(raw.alignment, align_frame(*f, center));
  if (raw.alignment > tol::kGaugeFlip) {
    std::ostringstream os;
    os << "connection_table: stencil frame differs from center by "
       << raw.alignment << " after sign alignment (h = " << h << ")";
    throw GaugeFlip(os.str());
  }

  const auto [p1, q1] = tangent_coefficients(center.e1, jet_center);
  const auto [p2, q2] = tangent_coefficients(center.e2, jet_center);

  const auto rup = rows(fup), rum = rows(fum), rvp = rows(fvp), rvm = rows(fvm);
  const auto rc = rows(center);
  const double inv2h = 1.0 / (2.0 * h);
  for (int j = 0; j < 6; ++j) {
    const Complex3 dj_du = (*rup[j] - *rum[j]) * inv2h;
    const Complex3 dj_dv = (*rvp[j] - *rvm[j]) * inv2h;
    const Complex3 dj_e1 = p1 * dj_du + q1 * dj_dv;
    const Complex3 dj_e2 = p2 * dj_du + q2 * dj_dv;
    for (int k = 0; k < 6; ++k) {
      raw.coeff[j][k][0] = real_inner(dj_e1, *rc[k]);
      raw.coeff[j][k][1] = real_inner(dj_e2, *rc[k]);
    }
  }

  const double da_du = (fup.alpha - fum.alpha) * inv2h;
  const double da_dv = (fvp.alpha - fvm.alpha) * inv2h;
  const double db_du = (fup.beta - fum.beta) * inv2h;
  const double db_dv = (fvp.beta - fvm.beta) * inv2h;
  raw.alpha1 = p1 * da_du + q1 * da_dv;
  raw.alpha2 = p2 * da_du + q2 * da_dv;
  raw.beta1 = p1 * db_du + q1 * db_dv;
  raw.beta2 = p2 * db_du + q2 * db_dv;
  return raw;
}

RawTable richardson_combine(const RawTable& coarse, const RawTable& fine) {
  RawTable out = fine;
  for (int j = 0; j < 6; ++j)
    for (int k = 0; k < 6; ++k)
      for (int i = 0; i < 2; ++i)
        out.coeff[j][k][i] =
            (4.0 * fine.coeff[j][k][i] - coarse.coeff[j][k][i]) / 3.0;
  out.alpha1 = (4.0 * fine.alpha1 - coarse.alpha1) / 3.0;
  out.alpha2 = (4.0 * fine.alpha2 - coarse.alpha2) / 3.0;
  out.beta1 = (4.0 * fine.beta1 - coarse.beta1) / 3.0;
  out.beta2 = (4.0 * fine.beta2 - coarse.beta2) / 3.0;
  out.alignment = std::max(coarse.alignment, fine.alignment);
  return out;
}

Vec2 th(const ConnectionTable& t, int j, int k) {
  return Vec2(t.coeff[j][k][0], t.coeff[j][k][1]);
}

void push(std::vector<RelationResidual>& out, const std::string& name,
          const Vec2& lhs, const Vec2& rhs) {
  RelationResidual r;
  r.name = name;
  r.residual = (lhs - rhs).cwiseAbs().maxCoeff();
  out.push_back(std::move(r));
}

void push_guarded(std::vector<RelationResidual>& out, const std::string& name,
                  const std::string& guard) {
  RelationResidual r;
  r.name = name;
  r.applicable = false;
  r.guard = guard;
  out.push_back(std::move(r));
}

}  // namespace

namespace {

ConnectionTable connection_table_impl(const JetEvaluator& surf, double u,
                                      double v, const ConnectionOptions& options,
                                      const AdaptedFrame* reference) {
  const Jet2 jet_center = surf.jet(u, v);
  AdaptedFrame center = adapted_frame(jet_center);
  if (reference != nullptr) align_frame(center, *reference);

  const RawTable coarse = measure(surf, u, v, options.h, center, jet_center);
  RawTable raw = coarse;
  if (options.richardson) {
    const RawTable fine = measure(surf, u, v, options.h / 2.0, center, jet_center);
    raw = richardson_combine(coarse, fine);
  }

  ConnectionTable t;
  for (int j = 0; j < 6; ++j)
    for (int k = 0; k < 6; ++k)
      for (int i = 0; i < 2; ++i) t.coeff[j][k][i] = raw.coeff[j][k][i];
  t.alpha = raw.alpha;
  t.beta = raw.beta;
  t.alpha1 = raw.alpha1;
  t.alpha2 = raw.alpha2;
  t.beta1 = raw.beta1;
  t.beta2 = raw.beta2;
  t.a = t.coeff[1][3][0];
  t.b = t.coeff[1][3][1];
  t.legendrian_gauge = center.legendrian_gauge;
  t.alignment = raw.alignment;
  t.h = options.h;
  t.richardson = options.richardson;

  double antisym = 0.0;
  for (int j = 0; j < 6; ++j)
    for (int k = j; k < 6; ++k)
      for (int i = 0; i < 2; ++i)
        antisym = std::max(antisym,
                           std::abs(t.coeff[j][k][i] + t.coeff[k][j][i]));
  t.antisymmetry = antisym;

  double sym = 0.0;
  for (int k = 3; k <= 5; ++k)
    sym = std::max(sym, std::abs(t.coeff[1][k][1] - t.coeff[2][k][0]));
  t.ii_symmetry = sym;
  return t;
}

}  // namespace

ConnectionTable connection_table(const JetEvaluator& surf, double u, double v,
                                 const ConnectionOptions& options) {
  return connection_table_impl(surf, u, v, options, nullptr);
}

ConnectionTable connection_table(const JetEvaluator& surf, double u, double v,
                                 const ConnectionOptions& options,
                                 const AdaptedFrame& reference) {
  return connection_table_impl(surf, u, v, options, &reference);
}

std::vector<RelationResidual> check_intrinsic_relations(const ConnectionTable& t) {
  const double sa = std::sin(t.alpha), ca = std::cos(t.alpha);
  const double sb = std::sin(t.beta), cb = std::cos(t.beta);
  const bool alpha_ok = std::abs(sa) > tol::kTrigGuard;
  const bool beta_csc_ok = std::abs(sb) > tol::kTrigGuard;
  const bool beta_tan_ok = std::abs(cb) > tol::kTrigGuard;

  const Vec2 e1cov(1.0, 0.0), e2cov(0.0, 1.0);
  const Vec2 da(t.alpha1, t.alpha2);
  const Vec2 db(t.beta1, t.beta2);
  const Vec2 daJ(t.alpha2, -t.alpha1);
  const Vec2 dbJ(t.beta2, -t.beta1);

  std::vector<RelationResidual> out;
  if (!beta_csc_ok) {
    for (const char* name :
         {"theta31", "theta32", "theta34", "theta35", "theta41", "theta42",
          "theta43", "theta45", "theta51", "theta52", "theta53", "theta54"})
      push_guarded(out, name, "sin_beta_small");
  } else {
    const double csc_b = 1.0 / sb, cot_b = cb / sb;
    push(out, "theta31", th(t, 3, 1), -th(t, 1, 3));
    push(out, "theta32", th(t, 3, 2),
         sb * (da + th(t, 4, 1)) - cb * sa * e1cov);
    if (alpha_ok) {
      const double cot_a = ca / sa;
      push(out, "theta34", th(t, 3, 4),
           csc_b * th(t, 1, 2) - cot_a * (th(t, 1, 3) + csc_b * th(t, 2, 4)));
      push(out, "theta43", th(t, 4, 3),
           csc_b * th(t, 2, 1) + cot_a * (th(t, 1, 3) + csc_b * th(t, 2, 4)));
    } else {
      push_guarded(out, "theta34", "sin_alpha_small");
      push_guarded(out, "theta43", "sin_alpha_small");
    }
    push(out, "theta35", th(t, 3, 5), cot_b * th(t, 2, 3) - csc_b * sa * e1cov);
    push(out, "theta41", th(t, 4, 1),
         -da - csc_b * th(t, 2, 3) + sa * cot_b * e1cov);
    push(out, "theta42", th(t, 4, 2), -th(t, 2, 4));
    push(out, "theta45", th(t, 4, 5), cot_b * th(t, 2, 4) - sa * e2cov);
    push(out, "theta51", th(t, 5, 1), -ca * e2cov - cot_b * th(t, 2, 1));
    push(out, "theta52", th(t, 5, 2), db + ca * e1cov);
    push(out, "theta53", th(t, 5, 3), -cot_b * th(t, 2, 3) + csc_b * sa * e1cov);
    push(out, "theta54", th(t, 5, 4), -cot_b * th(t, 2, 4) + sa * e2cov);
  }

  if (beta_tan_ok) {
    const double tan_b = sb / cb;
    push(out, "conex", th(t, 2, 1), tan_b * (dbJ - 2.0 * ca * e2cov));
  } else {
    push_guarded(out, "conex", "cos_beta_small");
  }
  return out;
}

std::vector<RelationResidual> check_minimal_connection_forms(
    const ConnectionTable& t, double minimality, bool constant_beta) {
  if (minimality > tol::kMinimalGate) {
    std::ostringstream os;
    os << "check_minimal_connection_forms: |H| = " << minimality
       << " exceeds the minimality gate " << tol::kMinimalGate;
    throw NotMinimal(os.str());
  }
  double b1 = t.beta1, b2 = t.beta2, b = t.b;
  if (constant_beta) {
    const double grad_beta = std::max(std::abs(t.beta1), std::abs(t.beta2));
    if (grad_beta > tol::kConstBetaGate) {
      std::ostringstream os;
      os << "check_minimal_connection_forms: |grad beta| = " << grad_beta
         << " exceeds the constant-angle gate " << tol::kConstBetaGate;
      throw NonConstantBeta(os.str());
    }
    if (std::abs(t.b) > tol::kDiagonalGauge) {
      std::ostringstream os;
      os << "check_minimal_connection_forms: b = " << t.b
         << " exceeds the diagonal-gauge gate " << tol::kDiagonalGauge;
      throw GaugeNotDiagonal(os.str());
    }
    b1 = b2 = 0.0;
    b = 0.0;
  }

  const double sa = std::sin(t.alpha), ca = std::cos(t.alpha);
  const double sb = std::sin(t.beta), cb = std::cos(t.beta);
  const bool alpha_ok = std::abs(sa) > tol::kTrigGuard;
  const bool beta_csc_ok = std::abs(sb) > tol::kTrigGuard;
  const bool beta_tan_ok = std::abs(cb) > tol::kTrigGuard;
  const double a = t.a;

  std::vector<RelationResidual> out;
  push(out, "theta23", th(t, 2, 3), Vec2(b, -a));
  if (!beta_csc_ok) {
    for (const char* name : {"theta14", "theta24", "theta15", "theta25",
                             "theta34", "theta35", "theta45"})
      push_guarded(out, name, "sin_beta_small");
    return out;
  }
  const double csc_b = 1.0 / sb, cot_b = cb / sb;

  push(out, "theta14", th(t, 1, 4),
       Vec2(t.alpha1 + b * csc_b - sa * cot_b, t.alpha2 - a * csc_b));
  push(out, "theta24", th(t, 2, 4),
       Vec2(t.alpha2 - a * csc_b, -t.alpha1 - b * csc_b + sa * cot_b));
  push(out, "theta15", th(t, 1, 5), Vec2(b2, -b1 - ca));
  push(out, "theta25", th(t, 2, 5), Vec2(-b1 - ca, -b2));

  if (alpha_ok && beta_tan_ok) {
    const double cot_a = ca / sa, sec_b = 1.0 / cb;
    push(out, "theta34", th(t, 3, 4),
         Vec2(-sec_b * b2 - cot_a * csc_b * t.alpha2 + a * cot_a * cot_b * cot_b,
              sec_b * b1 + cot_a * csc_b * t.alpha1 + b * cot_a * cot_b * cot_b -
                  ca * cot_b * csc_b + 2.0 * sec_b * ca));
  } else {
    push_guarded(out, "theta34",
                 alpha_ok ? "cos_beta_small" : "sin_alpha_small");
  }
  push(out, "theta35", th(t, 3, 5),
       Vec2(b * cot_b - csc_b * sa, -a * cot_b));
  push(out, "theta45", th(t, 4, 5),
       Vec2(cot_b * t.alpha2 - a * cot_b * csc_b,
            -cot_b * t.alpha1 - b * csc_b * cot_b + sa * (cot_b * cot_b - 1.0)));
  return out;
}

std::string relations_to_json(const std::vector<RelationResidual>& relations,
                              double u, double v) {
  nlohmann::ordered_json doc;
  doc["point"] = {u, v};
  auto& rel = doc["relations"];
  rel = nlohmann::ordered_json::object();
  for (const auto& r : relations) {
    nlohmann::ordered_json entry;
    entry["applicable"] = r.applicable;
    if (r.applicable)
      entry["residual"] = r.residual;
    else
      entry["guard"] = r.guard;
    rel[r.name] = std::move(entry);
  }
  return doc.dump(2);
}

}  // namespace csgeo
