#include "csgeo/identities.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <initializer_list>
#include <sstream>

#include <nlohmann/json.hpp>

#include "csgeo/errors.hpp"
#include "csgeo/io.hpp"
#include "csgeo/tolerances.hpp"

namespace csgeo {
namespace {

// Values of one grid point pulled out of the field bundle, with the common
// trigonometric quantities precomputed.
struct PointValues {
  double alpha = 0, beta = 0, a = 0, b = 0;
  double alpha1 = 0, alpha2 = 0, beta1 = 0, beta2 = 0;
  double a1 = 0, a2 = 0;
  double lap_alpha = 0, lap_beta = 0;
  double k = 0, h = 0;
  double sa = 0, ca = 0, sb = 0, cb = 0;
};

bool gather(const IdentityInputs& in, int i, int j, PointValues& p) {
  p.alpha = in.alpha.at(i, j);
  p.beta = in.beta.at(i, j);
  p.a = in.a.at(i, j);
  p.b = in.b.at(i, j);
  p.alpha1 = in.alpha1.at(i, j);
  p.alpha2 = in.alpha2.at(i, j);
  p.beta1 = in.beta1.at(i, j);
  p.beta2 = in.beta2.at(i, j);
  p.a1 = in.a1.at(i, j);
  p.a2 = in.a2.at(i, j);
  p.lap_alpha = in.lap_alpha.at(i, j);
  p.lap_beta = in.lap_beta.at(i, j);
  p.k = in.k_intrinsic.at(i, j);
  p.h = in.minimality.at(i, j);
  for (double x : {p.alpha, p.beta, p.a, p.b, p.alpha1, p.alpha2, p.beta1,
                   p.beta2, p.a1, p.a2, p.lap_alpha, p.lap_beta, p.k}) {
    if (!std::isfinite(x)) return false;
  }
  p.sa = std::sin(p.alpha);
  p.ca = std::cos(p.alpha);
  p.sb = std::sin(p.beta);
  p.cb = std::cos(p.beta);
  return true;
}

// Accumulates per-point residuals into an IdentityStat.
class StatAcc {
 public:
  explicit StatAcc(std::string name) { stat_.name = std::move(name); }

  void add(double residual, double scale) {
    double r = std::abs(residual);
    stat_.max_abs = std::max(stat_.max_abs, r);
    sum_ += r;
    stat_.max_norm = std::max(stat_.max_norm, r / std::max(scale, 1e-300));
    ++stat_.evaluated_points;
  }

  void guard(const std::string& reason) {
    ++stat_.guards[reason];
    ++stat_.guarded_points;
  }

  IdentityStat finish() {
    if (stat_.evaluated_points > 0) {
      stat_.mean_abs = sum_ / stat_.evaluated_points;
    } else {
      stat_.applicable = false;
      if (!stat_.guards.empty()) {
        auto dominant = std::max_element(
            stat_.guards.begin(), stat_.guards.end(),
            [](const auto& x, const auto& y) { return x.second < y.second; });
        stat_.gate = "all points guarded: " + dominant->first;
      } else {
        stat_.gate = "no points";
      }
    }
    int total = stat_.evaluated_points + stat_.guarded_points;
    stat_.guarded_fraction =
        total > 0 ? static_cast<double>(stat_.guarded_points) / total : 0.0;
    return stat_;
  }

 private:
  IdentityStat stat_;
  double sum_ = 0.0;
};

double max_abs_of(std::initializer_list<double> terms) {
  double m = 0.0;
  for (double t : terms) m = std::max(m, std::abs(t));
  return m;
}

// Walks the grid, classifying each point and handing defined ones to `eval`,
// which returns (residual, scale) or records a guard itself.
using PointEval = std::function<void(const PointValues&, StatAcc&)>;

IdentityStat run_pointwise(const IdentityInputs& in, const std::string& name,
                           const PointEval& eval) {
  StatAcc acc(name);
  for (int i = 0; i < in.grid.nu; ++i) {
    for (int j = 0; j < in.grid.nv; ++j) {
      PointValues p;
      if (!gather(in, i, j, p)) {
        acc.guard("undefined");
        continue;
      }
      eval(p, acc);
    }
  }
  return acc.finish();
}

void require_minimal(const IdentityInputs& in) {
  if (in.max_minimality > tol::kMinimalGate) {
    throw NotMinimal("surface is not minimal: max |H| = " +
                     format_double(in.max_minimality));
  }
}

void require_constant_beta(const IdentityInputs& in) {
  if (in.max_grad_beta > tol::kConstBetaGate) {
    throw NonConstantBeta("contact angle is not constant: max |grad beta| = " +
                          format_double(in.max_grad_beta));
  }
}

void require_diagonal_gauge(const IdentityInputs& in) {
  if (in.max_abs_b > tol::kDiagonalGauge) {
    throw GaugeNotDiagonal("second fundamental form is not diagonal: max |b| = " +
                           format_double(in.max_abs_b));
  }
}

}  // namespace

const IdentityStat* IdentityReport::find(const std::string& name) const {
  for (const auto& s : stats) {
    if (s.name == name) return &s;
  }
  return nullptr;
}

std::vector<IdentityStat> curvature_report(const IdentityInputs& in) {
  require_minimal(in);

  IdentityStat gauss = run_pointwise(
      in, "K_gauss_vs_intrinsic", [](const PointValues& p, StatAcc& acc) {
        if (std::abs(p.sb) <= tol::kTrigGuard) {
          acc.guard("sin_beta_small");
          return;
        }
        double cscb = 1.0 / p.sb;
        double cotb = p.cb / p.sb;
        double t1 = 1.0;
        double t2 = -(1.0 + cscb * cscb) * (p.a * p.a + p.b * p.b);
        double t3 = -2.0 * p.b * cscb * (p.alpha1 - p.sa * cotb);
        double t4 = 2.0 * p.a * cscb * p.alpha2;
        double db1 = p.beta1 + p.ca;  // grad beta + cos(alpha) e1, e1-part
        double t5 = -(db1 * db1 + p.beta2 * p.beta2);
        double da1 = p.alpha1 - p.sa * cotb;
        double t6 = -(da1 * da1 + p.alpha2 * p.alpha2);
        double k_formula = t1 + t2 + t3 + t4 + t5 + t6;
        acc.add(k_formula - p.k, max_abs_of({t1, t2, t3, t4, t5, t6, p.k}));
      });

  IdentityStat conex = run_pointwise(
      in, "K_conex_vs_intrinsic", [](const PointValues& p, StatAcc& acc) {
        if (std::abs(p.cb) <= tol::kTrigGuard) {
          acc.guard("cos_beta_small");
          return;
        }
        double tb = p.sb / p.cb;
        double t1 = -(1.0 + tb * tb) * (p.beta1 * p.beta1 + p.beta2 * p.beta2);
        double t2 = -tb * p.lap_beta;
        double t3 = -2.0 * p.ca * (1.0 + 2.0 * tb * tb) * p.beta1;
        double t4 = 2.0 * tb * p.sa * p.alpha1;
        double t5 = -4.0 * tb * tb * p.ca * p.ca;
        double k_formula = t1 + t2 + t3 + t4 + t5;
        acc.add(k_formula - p.k, max_abs_of({t1, t2, t3, t4, t5, p.k}));
      });

  return {gauss, conex};
}

IdentityStat laplacian_beta_residual(const IdentityInputs& in) {
  require_minimal(in);

  return run_pointwise(
      in, "lapla_beta", [](const PointValues& p, StatAcc& acc) {
        if (std::abs(p.sb) <= tol::kTrigGuard) {
          acc.guard("sin_beta_small");
          return;
        }
        if (std::abs(p.cb) <= tol::kTrigGuard) {
          acc.guard("cos_beta_small");
          return;
        }
        double tb = p.sb / p.cb;
        double cotb = p.cb / p.sb;
        double cscb = 1.0 / p.sb;
        double lhs = tb * p.lap_beta;
        double t1 = (1.0 + cscb * cscb) * (p.a * p.a + p.b * p.b);
        double t2 = 2.0 * p.b * cscb * (p.alpha1 - p.sa * cotb);
        double t3 = -2.0 * p.a * cscb * p.alpha2;
        double g1 = p.beta1 + 2.0 * p.ca;
        double w1 = cotb * p.alpha1 + p.sa * (1.0 - cotb * cotb);
        double w2 = cotb * p.alpha2;
        double t4 = -tb * tb * (g1 * g1 + p.beta2 * p.beta2 - (w1 * w1 + w2 * w2));
        double t5 = p.sa * p.sa * (1.0 - tb * tb);
        double rhs = t1 + t2 + t3 + t4 + t5;
        acc.add(lhs - rhs, max_abs_of({lhs, t1, t2, t3, t4, t5}));
      });
}

std::vector<IdentityStat> codazzi_residuals(const IdentityInputs& in,
                                            const IdentityOptions& options) {
  require_minimal(in);
  require_constant_beta(in);
  require_diagonal_gauge(in);

  auto codazzi1 = run_pointwise(
      in, "codazzi1", [](const PointValues& p, StatAcc& acc) {
        if (std::abs(p.sa) <= tol::kTrigGuard) {
          acc.guard("sin_alpha_small");
          return;
        }
        if (std::abs(p.sb) <= tol::kTrigGuard) {
          acc.guard("sin_beta_small");
          return;
        }
        if (std::abs(p.cb) <= tol::kTrigGuard) {
          acc.guard("cos_beta_small");
          return;
        }
        double cota = p.ca / p.sa;
        double cscb = 1.0 / p.sb;
        double cotb = p.cb / p.sb;
        double tb = p.sb / p.cb;
        double t1 = -p.a2;
        double t2 = p.a * p.a * cota * cscb * cotb * cotb;
        double t3 = -p.a * cota * (cscb * cscb + cotb * cotb) * p.alpha2;
        double t4 = -p.ca * cscb *
                    (2.0 * (cotb - tb) * p.alpha1 - p.sa * (cotb * cotb - 3.0));
        double t5 = cota * cscb * (p.alpha1 * p.alpha1 + p.alpha2 * p.alpha2);
        acc.add(t1 + t2 + t3 + t4 + t5, max_abs_of({t1, t2, t3, t4, t5}));
      });

  auto codazzi2 = run_pointwise(
      in, "codazzi2", [](const PointValues& p, StatAcc& acc) {
        if (std::abs(p.sa) <= tol::kTrigGuard) {
          acc.guard("sin_alpha_small");
          return;
        }
        if (std::abs(p.cb) <= tol::kTrigGuard) {
          acc.guard("cos_beta_small");
          return;
        }
        double cota = p.ca / p.sa;
        double tb = p.sb / p.cb;
        double secb = 1.0 / p.cb;
        double t1 = p.a1;
        double t2 = p.a * (cota * p.alpha1 + 6.0 * tb * p.ca);
        double t3 = -2.0 * secb * p.ca * p.alpha2;
        acc.add(t1 + t2 + t3, max_abs_of({t1, t2, t3}));
      });

  bool fold = options.codazzi3_fold_paren;
  auto codazzi3 = run_pointwise(
      in, "codazzi3", [fold](const PointValues& p, StatAcc& acc) {
        if (std::abs(p.sa) <= tol::kTrigGuard) {
          acc.guard("sin_alpha_small");
          return;
        }
        if (std::abs(p.sb) <= tol::kTrigGuard) {
          acc.guard("sin_beta_small");
          return;
        }
        if (std::abs(p.cb) <= tol::kTrigGuard) {
          acc.guard("cos_beta_small");
          return;
        }
        double cota = p.ca / p.sa;
        double cotb = p.cb / p.sb;
        double tb = p.sb / p.cb;
        double t1 = p.a2;
        double t2 = -p.a * p.a * cota * p.sb * cotb * cotb;
        double t3 = p.a * cota * p.alpha2;
        double standalone = 2.0 * p.ca * (cotb - 3.0 * tb);
        double grad_term = 2.0 * p.ca * p.sb * (cotb - tb) * p.alpha1;
        double t4, t5;
        if (fold) {
          t4 = standalone * grad_term;
          t5 = 0.0;
        } else {
          t4 = standalone;
          t5 = grad_term;
        }
        double t6 = p.sa * p.ca * p.sb * (5.0 - cotb * cotb);
        double t7 = p.sb * p.lap_alpha;
        acc.add(t1 + t2 + t3 + t4 + t5 + t6 + t7,
                max_abs_of({t1, t2, t3, t4, t5, t6, t7}));
      });

  auto codazzi4 = run_pointwise(
      in, "codazzi4", [](const PointValues& p, StatAcc& acc) {
        if (std::abs(p.sb) <= tol::kTrigGuard) {
          acc.guard("sin_beta_small");
          return;
        }
        if (std::abs(p.cb) <= tol::kTrigGuard) {
          acc.guard("cos_beta_small");
          return;
        }
        double cscb = 1.0 / p.sb;
        double cotb = p.cb / p.sb;
        double tb = p.sb / p.cb;
        double t1 = p.a * p.a * (1.0 + cscb * cscb);
        double t2 = -2.0 * p.a * cscb * p.alpha2;
        double t3 = p.alpha1 * p.alpha1 + p.alpha2 * p.alpha2;
        double t4 = 2.0 * p.sa * (tb - cotb) * p.alpha1;
        double t5 = -4.0 * tb * tb * p.ca * p.ca;
        double t6 = -p.sa * p.sa * (1.0 - cotb * cotb);
        acc.add(t1 + t2 + t3 + t4 + t5 + t6,
                max_abs_of({t1, t2, t3, t4, t5, t6}));
      });

  return {codazzi1, codazzi2, codazzi3, codazzi4};
}

IdentityStat theorem1_residual(const IdentityInputs& in) {
  require_constant_beta(in);

  return run_pointwise(
      in, "theorem1", [](const PointValues& p, StatAcc& acc) {
        if (std::abs(p.sa) <= tol::kTrigGuard) {
          acc.guard("sin_alpha_small");
          return;
        }
        if (std::abs(p.sb) <= tol::kTrigGuard) {
          acc.guard("sin_beta_small");
          return;
        }
        if (std::abs(p.cb) <= tol::kTrigGuard) {
          acc.guard("cos_beta_small");
          return;
        }
        if (p.alpha < -tol::kAlphaRangeSlack ||
            p.alpha > 3.141592653589793 / 2.0 + tol::kAlphaRangeSlack) {
          acc.guard("alpha_out_of_range");
          return;
        }
        double cota = p.ca / p.sa;
        double cscb = 1.0 / p.sb;
        double cotb = p.cb / p.sb;
        double tb = p.sb / p.cb;
        double t1 = p.lap_alpha;
        double t2 = -cota * cscb * cscb * cscb *
                    (p.alpha1 * p.alpha1 + p.alpha2 * p.alpha2);
        double t3 = -p.a * p.a * cota * cotb * cotb * cotb * cotb;
        double t4 = 2.0 * p.a * cota * cscb * cotb * cotb * p.alpha2;
        double t5 = 2.0 * p.ca * (cotb - tb) * tb * tb * p.alpha1;
        double t6 = -p.sa * p.ca *
                    (5.0 - cotb * cotb * cotb * cotb - 3.0 * cscb * cscb);
        acc.add(t1 + t2 + t3 + t4 + t5 + t6,
                max_abs_of({t1, t2, t3, t4, t5, t6}));
      });
}

AFromAngles a_from_angles(double alpha, double beta, double alpha1,
                          double alpha2) {
  double sa = std::sin(alpha);
  double ca = std::cos(alpha);
  double sb = std::sin(beta);
  double cb = std::cos(beta);
  if (std::abs(sb) <= tol::kTrigGuard || std::abs(cb) <= tol::kTrigGuard) {
    throw DomainError("a_from_angles: contact angle too close to 0 or pi/2");
  }
  double cscb = 1.0 / sb;
  double cotb = cb / sb;
  double tb = sb / cb;
  double m = 1.0 + cscb * cscb;
  AFromAngles out;
  out.f = 4.0 * alpha2 * alpha2 * cotb * cotb - 4.0 * m * alpha1 * alpha1 -
          4.0 * m *
              (2.0 * sa * (tb - cotb) * alpha1 - 4.0 * tb * tb * ca * ca -
               sa * sa * (1.0 - cotb * cotb));
  if (out.f < 0.0) {
    out.negative_discriminant = out.f < -tol::kNegativeDiscriminant;
    double root = std::sqrt(std::max(out.f, 0.0));
    out.a_plus = (2.0 * cscb * alpha2 + root) / (2.0 * m);
    out.a_minus = (2.0 * cscb * alpha2 - root) / (2.0 * m);
    return out;
  }
  double root = std::sqrt(out.f);
  out.a_plus = (2.0 * cscb * alpha2 + root) / (2.0 * m);
  out.a_minus = (2.0 * cscb * alpha2 - root) / (2.0 * m);
  return out;
}

IdentityStat a_closure_stat(const IdentityInputs& in) {
  require_minimal(in);
  require_constant_beta(in);
  require_diagonal_gauge(in);

  return run_pointwise(
      in, "a_closure", [](const PointValues& p, StatAcc& acc) {
        if (std::abs(p.sb) <= tol::kTrigGuard) {
          acc.guard("sin_beta_small");
          return;
        }
        if (std::abs(p.cb) <= tol::kTrigGuard) {
          acc.guard("cos_beta_small");
          return;
        }
        AFromAngles roots =
            a_from_angles(p.alpha, p.beta, p.alpha1, p.alpha2);
        if (roots.negative_discriminant) {
          acc.guard("negative_discriminant");
          return;
        }
        double r = std::min(std::abs(roots.a_plus - p.a),
                            std::abs(roots.a_minus - p.a));
        acc.add(r, max_abs_of({roots.a_plus, roots.a_minus, p.a, 1.0}));
      });
}

std::vector<IdentityStat> corollary1_relations(const IdentityInputs& in) {
  if (in.max_abs_k > tol::kFlatGate) {
    throw NotFlat("intrinsic curvature is not zero: max |K| = " +
                  format_double(in.max_abs_k));
  }
  if (in.max_grad_a > tol::kConstAGate) {
    throw NonConstantA("shape coefficient is not constant: max |grad a| = " +
                       format_double(in.max_grad_a));
  }
  require_constant_beta(in);

  auto rel1 = run_pointwise(
      in, "corollary_alpha1", [](const PointValues& p, StatAcc& acc) {
        if (std::abs(p.sa) <= tol::kTrigGuard) {
          acc.guard("sin_alpha_small");
          return;
        }
        if (std::abs(p.cb) <= tol::kTrigGuard) {
          acc.guard("cos_beta_small");
          return;
        }
        double tb = p.sb / p.cb;
        double cota = p.ca / p.sa;
        double rhs = 2.0 * tb * cota * p.ca;
        acc.add(p.alpha1 - rhs, max_abs_of({p.alpha1, rhs, 1.0}));
      });
  rel1.diagnostic = true;

  auto rel2 = run_pointwise(
      in, "corollary_alpha2", [](const PointValues& p, StatAcc& acc) {
        if (std::abs(p.sa) <= tol::kTrigGuard) {
          acc.guard("sin_alpha_small");
          return;
        }
        double cota = p.ca / p.sa;
        double rhs = p.a * p.sb * (cota * cota + 3.0);
        acc.add(p.alpha2 - rhs, max_abs_of({p.alpha2, rhs, 1.0}));
      });
  rel2.diagnostic = true;

  return {rel1, rel2};
}

namespace {

std::string gate_label(const Error& e) {
  if (dynamic_cast<const NotMinimal*>(&e)) return "NotMinimal";
  if (dynamic_cast<const NonConstantBeta*>(&e)) return "NonConstantBeta";
  if (dynamic_cast<const GaugeNotDiagonal*>(&e)) return "GaugeNotDiagonal";
  if (dynamic_cast<const NotFlat*>(&e)) return "NotFlat";
  if (dynamic_cast<const NonConstantA*>(&e)) return "NonConstantA";
  if (dynamic_cast<const DomainError*>(&e)) return "DomainGuard";
  return "Error";
}

IdentityStat gated(const std::string& name, const std::string& gate,
                   bool diagnostic = false) {
  IdentityStat s;
  s.name = name;
  s.applicable = false;
  s.gate = gate;
  s.diagnostic = diagnostic;
  return s;
}

}  // namespace

IdentityReport evaluate_identities(const IdentityInputs& in,
                                   const IdentityOptions& options) {
  IdentityReport report;
  auto push_all = [&report](const std::vector<IdentityStat>& rows) {
    for (const auto& r : rows) report.stats.push_back(r);
  };

  try {
    push_all(curvature_report(in));
  } catch (const Error& e) {
    report.stats.push_back(gated("K_gauss_vs_intrinsic", gate_label(e)));
    report.stats.push_back(gated("K_conex_vs_intrinsic", gate_label(e)));
  }

  try {
    report.stats.push_back(laplacian_beta_residual(in));
  } catch (const Error& e) {
    report.stats.push_back(gated("lapla_beta", gate_label(e)));
  }

  try {
    push_all(codazzi_residuals(in, options));
  } catch (const Error& e) {
    for (const char* name : {"codazzi1", "codazzi2", "codazzi3", "codazzi4"}) {
      report.stats.push_back(gated(name, gate_label(e)));
    }
  }

  try {
    report.stats.push_back(theorem1_residual(in));
  } catch (const Error& e) {
    report.stats.push_back(gated("theorem1", gate_label(e)));
  }

  try {
    report.stats.push_back(a_closure_stat(in));
  } catch (const Error& e) {
    report.stats.push_back(gated("a_closure", gate_label(e)));
  }

  try {
    push_all(corollary1_relations(in));
  } catch (const Error& e) {
    report.stats.push_back(gated("corollary_alpha1", gate_label(e), true));
    report.stats.push_back(gated("corollary_alpha2", gate_label(e), true));
  }

  return report;
}

std::string identity_report_to_json(const IdentityReport& report) {
  nlohmann::ordered_json root;
  root["identities"] = nlohmann::ordered_json::array();
  for (const auto& s : report.stats) {
    nlohmann::ordered_json row;
    row["identity"] = s.name;
    row["applicable"] = s.applicable;
    if (!s.gate.empty()) row["gate"] = s.gate;
    if (s.applicable) {
      row["max"] = s.max_abs;
      row["mean"] = s.mean_abs;
      row["max_normalized"] = s.max_norm;
    }
    row["evaluated_points"] = s.evaluated_points;
    row["guarded_points"] = s.guarded_points;
    row["guarded_fraction"] = s.guarded_fraction;
    if (!s.guards.empty()) {
      nlohmann::ordered_json g;
      for (const auto& [k, v] : s.guards) g[k] = v;
      row["guards"] = g;
    }
    row["diagnostic"] = s.diagnostic;
    root["identities"].push_back(row);
  }
  return root.dump(2) + "\n";
}

std::string identity_report_to_csv(const IdentityReport& report) {
  std::ostringstream out;
  out << "identity,applicable,gate,max,mean,max_normalized,evaluated_points,"
         "guarded_points,guarded_fraction,diagnostic\n";
  for (const auto& s : report.stats) {
    out << s.name << ',' << (s.applicable ? "true" : "false") << ','
        << s.gate << ',';
    if (s.applicable) {
      out << format_double(s.max_abs) << ',' << format_double(s.mean_abs)
          << ',' << format_double(s.max_norm);
    } else {
      out << ",,";
    }
    out << ',' << s.evaluated_points << ',' << s.guarded_points << ','
        << format_double(s.guarded_fraction) << ','
        << (s.diagnostic ? "true" : "false") << '\n';
  }
  return out.str();
}

}  // namespace csgeo
