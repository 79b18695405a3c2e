#include "csgeo/reconstruct.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>
#include <vector>

#include <nlohmann/json.hpp>

#include "csgeo/errors.hpp"
#include "csgeo/io.hpp"
#include "csgeo/parallel.hpp"
#include "csgeo/tolerances.hpp"

namespace csgeo {
namespace {

constexpr double kPi = std::numbers::pi;

double snapped_cos(double angle) {
  double c = std::cos(angle);
  return std::abs(c) < 1e-12 ? 0.0 : c;
}

struct Trig {
  double sa, ca, sb, cb, cota, cotb, cscb;
};

Trig angle_trig(double alpha, double beta) {
  Trig t;
  t.sa = std::sin(alpha);
  t.ca = snapped_cos(alpha);
  t.sb = std::sin(beta);
  t.cb = std::cos(beta);
  if (std::abs(t.sb) <= tol::kContactAngleZero) {
    throw DomainError("contact angle too close to 0 or pi");
  }
  if (std::abs(t.sa) <= tol::kAlphaDegenerate) {
    throw DomainError("holomorphic angle too close to 0 or pi");
  }
  t.cota = t.ca / t.sa;
  t.cotb = t.cb / t.sb;
  t.cscb = 1.0 / t.sb;
  return t;
}

// The four compatibility equations of the constant-invariant diagonal gauge,
// as functions of (alpha, a) at fixed contact angle.
std::array<double, 4> compatibility_equations(double beta, double alpha,
                                              double a) {
  double sa = std::sin(alpha), ca = std::cos(alpha);
  double sb = std::sin(beta), cb = std::cos(beta);
  double cota = ca / sa;
  double cotb = cb / sb, tb = sb / cb, cscb = 1.0 / sb;
  double c1 = a * a * cota * cscb * cotb * cotb +
              ca * cscb * sa * (cotb * cotb - 3.0);
  double c2 = 6.0 * a * tb * ca;
  double c3 = -a * a * cota * sb * cotb * cotb +
              2.0 * ca * (cotb - 3.0 * tb) +
              sa * ca * sb * (5.0 - cotb * cotb);
  double c4 = a * a * (1.0 + cscb * cscb) - 4.0 * tb * tb * ca * ca -
              sa * sa * (1.0 - cotb * cotb);
  return {c1, c2, c3, c4};
}

double max_abs4(const std::array<double, 4>& v) {
  return std::max(std::max(std::abs(v[0]), std::abs(v[1])),
                  std::max(std::abs(v[2]), std::abs(v[3])));
}

// Damped Gauss-Newton on the four equations over (alpha, a). Returns true on
// convergence to the solver tolerance.
bool refine_branch(double beta, double& alpha, double& a) {
  using Vec4 = Eigen::Matrix<double, 4, 1>;
  using Jac = Eigen::Matrix<double, 4, 2>;
  auto eval = [beta](double al, double aa) -> Vec4 {
    auto c = compatibility_equations(beta, al, aa);
    return Vec4(c[0], c[1], c[2], c[3]);
  };
  double lambda = 1e-4;
  for (int iter = 0; iter < 80; ++iter) {
    if (alpha < 1e-3 || alpha > kPi - 1e-3) return false;
    Vec4 r = eval(alpha, a);
    if (r.lpNorm<Eigen::Infinity>() < 1e-14) break;
    const double h = 1e-7;
    Jac j;
    j.col(0) = (eval(alpha + h, a) - eval(alpha - h, a)) / (2.0 * h);
    j.col(1) = (eval(alpha, a + h) - eval(alpha, a - h)) / (2.0 * h);
    Eigen::Matrix2d jtj = j.transpose() * j;
    Eigen::Vector2d jtr = j.transpose() * r;
    bool stepped = false;
    for (int inner = 0; inner < 10; ++inner) {
      Eigen::Matrix2d m = jtj + lambda * Eigen::Matrix2d::Identity();
      Eigen::Vector2d delta = m.ldlt().solve(jtr);
      double na = alpha - delta(0), nv = a - delta(1);
      if (na < 1e-3 || na > kPi - 1e-3) {
        lambda *= 10.0;
        continue;
      }
      if (eval(na, nv).squaredNorm() <= r.squaredNorm()) {
        alpha = na;
        a = nv;
        lambda = std::max(lambda / 3.0, 1e-12);
        stepped = true;
        break;
      }
      lambda *= 10.0;
    }
    if (!stepped) break;
  }
  return max_abs4(compatibility_equations(beta, alpha, a)) <=
         tol::kSolverResidual;
}

// Fourth-order one-step transfer matrix for the linear system F' = G F over a
// step h: the degree-4 truncation of exp(h G), which is exactly what the
// classical Runge-Kutta scheme produces for a constant linear field.
Matrix6d step_matrix(const Matrix6d& g, double h) {
  Matrix6d hg = h * g;
  Matrix6d p2 = hg * hg;
  Matrix6d p3 = p2 * hg;
  Matrix6d p4 = p3 * hg;
  return Matrix6d::Identity() + hg + p2 / 2.0 + p3 / 6.0 + p4 / 24.0;
}

nlohmann::ordered_json grid_json(const GridSpec& g) {
  nlohmann::ordered_json out;
  out["nu"] = g.nu;
  out["nv"] = g.nv;
  out["u0"] = g.u0;
  out["v0"] = g.v0;
  out["extent_u"] = g.extent_u;
  out["extent_v"] = g.extent_v;
  out["periodic_u"] = g.periodic_u;
  out["periodic_v"] = g.periodic_v;
  return out;
}

nlohmann::ordered_json periods_json(const PeriodReport& p) {
  nlohmann::ordered_json out;
  out["frequencies"] = p.frequencies;
  out["commensurable"] = p.commensurable;
  out["fundamental_period"] = p.fundamental_period;
  return out;
}

}  // namespace

double InvariantConstants::c() const {
  double ca = snapped_cos(alpha);
  if (ca == 0.0) return 0.0;
  double cb = std::cos(beta);
  if (std::abs(cb) <= tol::kTrigGuard) {
    throw DomainError("structure constant undefined: contact angle at pi/2 "
                      "with nonzero cos(alpha)");
  }
  return -2.0 * (std::sin(beta) / cb) * ca;
}

double circle_membership(double beta, double a, double b) {
  double sb = std::sin(beta), cb = std::cos(beta);
  double denom = 1.0 + sb * sb;
  double b0 = cb / denom;
  double r = std::sqrt(2.0) * sb * sb / denom;
  return a * a + (b - b0) * (b - b0) - r * r;
}

std::vector<CircleFamilyPoint> circle_family(double beta, int n) {
  if (!(beta > 0.0) || beta > kPi / 2.0 + 1e-12) {
    throw DomainError("circle_family: contact angle must lie in (0, pi/2]");
  }
  if (n < 1) throw ConfigError("circle_family: sample count must be positive");
  double sb = std::sin(beta), cb = std::cos(beta);
  double denom = 1.0 + sb * sb;
  double b0 = cb / denom;
  double r = std::sqrt(2.0) * sb * sb / denom;
  std::vector<CircleFamilyPoint> out;
  out.reserve(static_cast<std::size_t>(n));
  for (int k = 0; k < n; ++k) {
    double phi = 2.0 * kPi * k / n;
    CircleFamilyPoint p;
    p.beta = beta;
    p.a = r * std::cos(phi);
    p.b = b0 + r * std::sin(phi);
    if (std::abs(p.a) < 1e-12) p.a = 0.0;
    if (std::abs(p.b) < 1e-12) p.b = 0.0;
    p.kenmotsu = p.a == 0.0;
    p.new_family = p.b == 0.0;
    p.membership_residual = std::abs(circle_membership(beta, p.a, p.b));
    out.push_back(p);
  }
  return out;
}

std::vector<ConstantBranch> solve_constant_invariants(double beta) {
  if (!(beta > 1e-8) || beta >= kPi / 2.0 - 1e-8) {
    throw DomainError(
        "solve_constant_invariants: contact angle must lie strictly inside "
        "(0, pi/2)");
  }
  double sb = std::sin(beta), cb = std::cos(beta);
  double cscb2 = 1.0 / (sb * sb);
  double m = 1.0 + cscb2;

  std::vector<std::pair<double, double>> found;  // (alpha, a)
  auto consider = [&](double alpha0, double a0) {
    double alpha = alpha0, a = a0;
    if (!refine_branch(beta, alpha, a)) return;
    for (const auto& [fa, fv] : found) {
      if (std::abs(fa - alpha) < 1e-7 && std::abs(fv - a) < 1e-7) return;
    }
    found.emplace_back(alpha, a);
  };

  const int sweep = 400;
  for (int k = 1; k < sweep; ++k) {
    double alpha = kPi * k / sweep;
    if (alpha < 0.02 || alpha > kPi - 0.02) continue;
    double sa = std::sin(alpha), ca = std::cos(alpha);
    double tb2 = (sb * sb) / (cb * cb);
    double cotb2 = (cb * cb) / (sb * sb);
    double rhs = (4.0 * tb2 * ca * ca + sa * sa * (1.0 - cotb2)) / m;
    if (rhs < -1e-12) continue;
    double a0 = std::sqrt(std::max(rhs, 0.0));
    consider(alpha, a0);
    if (a0 > 0.0) consider(alpha, -a0);
  }

  if (found.empty()) {
    throw NoBranch("no constant-invariant branch exists at beta = " +
                   format_double(beta));
  }

  std::sort(found.begin(), found.end(), [](const auto& x, const auto& y) {
    if (std::abs(x.first - y.first) > 1e-9) return x.first < y.first;
    return x.second > y.second;
  });

  std::vector<ConstantBranch> out;
  for (const auto& [alpha, a] : found) {
    ConstantBranch b;
    b.constants.beta = beta;
    b.constants.alpha = alpha;
    b.constants.a = a;
    b.constants.b = 0.0;
    auto r = compatibility_equations(beta, alpha, a);
    for (int i = 0; i < 4; ++i) b.residuals[static_cast<std::size_t>(i)] = std::abs(r[static_cast<std::size_t>(i)]);
    b.degenerate_a = std::abs(a) < 1e-6;
    out.push_back(b);
  }
  return out;
}

ConstantBranch refine_constants(const InvariantConstants& guess) {
  if (std::abs(guess.b) > tol::kDiagonalGauge) {
    throw GaugeNotDiagonal(
        "refine_constants: the diagonal gauge requires b = 0, got b = " +
        format_double(guess.b));
  }
  if (!(guess.beta > 1e-8) || guess.beta >= kPi / 2.0 - 1e-8) {
    throw DomainError(
        "refine_constants: contact angle must lie strictly inside (0, pi/2)");
  }
  double alpha = guess.alpha, a = guess.a;
  if (!refine_branch(guess.beta, alpha, a)) {
    const double miss =
        max_abs4(compatibility_equations(guess.beta, guess.alpha, guess.a));
    throw IncompatibleConnection(
        "refine_constants: no compatible branch near alpha = " +
        format_double(guess.alpha) + ", a = " + format_double(guess.a) +
        " at beta = " + format_double(guess.beta) +
        " (compatibility residual " + format_double(miss) + ")");
  }
  ConstantBranch b;
  b.constants.beta = guess.beta;
  b.constants.alpha = alpha;
  b.constants.a = a;
  b.constants.b = 0.0;
  const auto r = compatibility_equations(guess.beta, alpha, a);
  for (std::size_t i = 0; i < 4; ++i) b.residuals[i] = std::abs(r[i]);
  b.degenerate_a = std::abs(a) < 1e-6;
  return b;
}

MaurerCartan assemble_maurer_cartan(const InvariantConstants& k) {
  if (std::abs(k.b) > tol::kDiagonalGauge) {
    throw GaugeNotDiagonal(
        "assemble_maurer_cartan: the diagonal gauge requires b = 0, got b = " +
        format_double(k.b));
  }
  Trig t = angle_trig(k.alpha, k.beta);
  if (std::abs(t.cb) <= tol::kTrigGuard && t.ca != 0.0) {
    throw DomainError(
        "assemble_maurer_cartan: contact angle pi/2 requires cos(alpha) = 0");
  }
  double a = k.a;
  double sec_ca = t.ca == 0.0 ? 0.0 : t.ca / t.cb;  // sec(beta) cos(alpha)
  double c = t.ca == 0.0 ? 0.0 : -2.0 * (t.sb / t.cb) * t.ca;

  Matrix6d ua = Matrix6d::Zero();  // upper triangle of A = theta(e1)
  ua(0, 1) = 1.0;
  ua(1, 3) = a;
  ua(1, 4) = -t.sa * t.cotb;
  ua(2, 4) = -a * t.cscb;
  ua(2, 5) = -t.ca;
  ua(3, 4) = a * t.cota * t.cotb * t.cotb;
  ua(3, 5) = -t.cscb * t.sa;
  ua(4, 5) = -a * t.cotb * t.cscb;

  Matrix6d ub = Matrix6d::Zero();  // upper triangle of B = theta(e2)
  ub(0, 2) = 1.0;
  ub(1, 2) = -c;
  ub(1, 4) = -a * t.cscb;
  ub(1, 5) = -t.ca;
  ub(2, 3) = -a;
  ub(2, 4) = t.sa * t.cotb;
  ub(3, 4) = 2.0 * sec_ca - t.ca * t.cotb * t.cscb;
  ub(3, 5) = -a * t.cotb;
  ub(4, 5) = t.sa * (t.cotb * t.cotb - 1.0);

  MaurerCartan mc;
  mc.A = ua - ua.transpose();
  mc.B = ub - ub.transpose();
  mc.c = c;
  mc.compat_residual = commutator(mc.A, mc.B).norm();
  return mc;
}

Matrix6d initial_adapted_frame(const InvariantConstants& k) {
  Trig t = angle_trig(k.alpha, k.beta);
  const Complex i(0.0, 1.0);
  Complex3 z(1.0, 0.0, 0.0);
  Complex3 e1(0.0, 1.0, 0.0);
  Complex3 vdir(0.0, i * t.ca, Complex(t.sa, 0.0));
  Complex3 xi = i * z;
  Complex3 e2 = t.sb * vdir + t.cb * xi;
  Complex3 e5 = t.cscb * xi - t.cotb * e2;
  Complex3 e3 = (i * e1 - t.ca * vdir) / t.sa;
  Complex3 e4 = (t.ca * e1 + i * vdir) / t.sa;

  Matrix6d f;
  f.row(0) = realify(z).transpose();
  f.row(1) = realify(e1).transpose();
  f.row(2) = realify(e2).transpose();
  f.row(3) = realify(e3).transpose();
  f.row(4) = realify(e4).transpose();
  f.row(5) = realify(e5).transpose();
  return f;
}

Complex3 IntegrationResult::position(int i, int j) const {
  return complexify(frames[static_cast<std::size_t>(grid.index(i, j))]
                        .row(0)
                        .transpose());
}

IntegrationResult integrate_frame(const MaurerCartan& mc, const Matrix6d& f0,
                                  const GridSpec& grid,
                                  const IntegrationOptions& options) {
  if (grid.nu < 2 || grid.nv < 2) {
    throw GridMismatch("integrate_frame: grid must be at least 2x2");
  }

  IntegrationResult res;
  res.grid = grid;
  res.frames.assign(static_cast<std::size_t>(grid.size()), Matrix6d::Zero());

  const bool commuting = mc.compat_residual < tol::kCompatGate;
  using Method = IntegrationOptions::Method;
  Method method = options.method;
  if (method == Method::Auto) {
    method = commuting ? Method::Exponential : Method::LineStepping;
  }
  if (method == Method::Exponential && !commuting) {
    throw IncompatibleConnection(
        "integrate_frame: the exponential path needs commuting generators; "
        "||[A,B]|| = " +
        format_double(mc.compat_residual));
  }

  const double hu = grid.hu(), hv = grid.hv();
  struct RowStats {
    double defect = 0.0;
    double sphere = 0.0;
    int reortho = 0;
  };
  std::vector<RowStats> stats(static_cast<std::size_t>(grid.nu));

  auto settle = [&](Matrix6d& f, RowStats& rs) {
    double d = orthonormality_defect(f);
    rs.defect = std::max(rs.defect, d);
    if (d > tol::kReorthoDrift) {
      reorthonormalize_rows(f);
      ++rs.reortho;
    }
    rs.sphere = std::max(rs.sphere, std::abs(f.row(0).norm() - 1.0));
  };

  if (method == Method::Exponential) {
    res.method = "exponential";
    std::vector<Matrix6d> us(static_cast<std::size_t>(grid.nu));
    std::vector<Matrix6d> vs(static_cast<std::size_t>(grid.nv));
    for (int i = 0; i < grid.nu; ++i) us[static_cast<std::size_t>(i)] = expm((grid.u(i) - grid.u0) * mc.A);
    for (int j = 0; j < grid.nv; ++j) vs[static_cast<std::size_t>(j)] = expm((grid.v(j) - grid.v0) * mc.B);
    parallel_for(grid.nu, options.threads, [&](int i) {
      RowStats& rs = stats[static_cast<std::size_t>(i)];
      for (int j = 0; j < grid.nv; ++j) {
        Matrix6d f = us[static_cast<std::size_t>(i)] * vs[static_cast<std::size_t>(j)] * f0;
        settle(f, rs);
        res.frames[static_cast<std::size_t>(grid.index(i, j))] = f;
      }
    });
  } else {
    res.method = "line_stepping";
    const int sub = std::max(1, options.substeps);
    const Matrix6d sa = step_matrix(mc.A, hu / sub);
    // March the u-line at v = v0.
    {
      RowStats& rs0 = stats[0];
      Matrix6d f = f0;
      settle(f, rs0);
      res.frames[static_cast<std::size_t>(grid.index(0, 0))] = f;
      for (int i = 1; i < grid.nu; ++i) {
        for (int s = 0; s < sub; ++s) f = sa * f;
        settle(f, stats[static_cast<std::size_t>(i)]);
        res.frames[static_cast<std::size_t>(grid.index(i, 0))] = f;
      }
    }
    // March each v-line from its u-line anchor; rows are independent.
    parallel_for(grid.nu, options.threads, [&](int i) {
      RowStats& rs = stats[static_cast<std::size_t>(i)];
      const double g = std::exp(-mc.c * (grid.u(i) - grid.u0));
      const Matrix6d sb = step_matrix(g * mc.B, hv / sub);
      Matrix6d f = res.frames[static_cast<std::size_t>(grid.index(i, 0))];
      for (int j = 1; j < grid.nv; ++j) {
        for (int s = 0; s < sub; ++s) f = sb * f;
        settle(f, rs);
        res.frames[static_cast<std::size_t>(grid.index(i, j))] = f;
      }
    });
  }

  for (const RowStats& rs : stats) {
    res.max_orthogonality_defect = std::max(res.max_orthogonality_defect, rs.defect);
    res.max_sphere_residual = std::max(res.max_sphere_residual, rs.sphere);
    res.reortho_count += rs.reortho;
  }

  // Per-cell discrepancy between the two edge orderings (u-then-v against
  // v-then-u); identical for every cell of a row, so one probe per row.
  const Matrix6d ea = expm(hu * mc.A);
  const int last = grid.periodic_u ? grid.nu : grid.nu - 1;
  for (int i = 0; i < last; ++i) {
    const double gi = std::exp(-mc.c * (grid.u(i) - grid.u0));
    const double gnext = std::exp(-mc.c * (grid.u(i) + hu - grid.u0));
    const Matrix6d gap = expm(hv * gnext * mc.B) * ea - ea * expm(hv * gi * mc.B);
    const double cell =
        (gap * res.frames[static_cast<std::size_t>(grid.index(i, 0))]).norm();
    res.path_independence = std::max(res.path_independence, cell);
  }
  if (res.path_independence > tol::kPathIndependence) {
    throw IncompatibleConnection(
        "integrate_frame: connection is not integrable; path-independence "
        "residual = " +
        format_double(res.path_independence));
  }

  res.periods_u = analyze_periods(mc.A);
  res.periods_v = analyze_periods(mc.B);
  return res;
}

ReconstructedSurface::ReconstructedSurface(const MaurerCartan& mc,
                                           const Matrix6d& f0)
    : mc_(mc), f0_(f0) {
  double structural = (commutator(mc.A, mc.B) + mc.c * mc.B).norm();
  if (structural > tol::kCompatGate) {
    throw IncompatibleConnection(
        "ReconstructedSurface: generators do not satisfy the structure "
        "equations; residual = " +
        format_double(structural));
  }
}

Jet2 ReconstructedSurface::jet(double u, double v) const {
  const double g = std::exp(-mc_.c * u);
  const Matrix6d f = expm(v * g * mc_.B) * expm(u * mc_.A) * f0_;
  const Matrix6d af = mc_.A * f;
  const Matrix6d bf = mc_.B * f;
  Jet2 out;
  out.z = complexify(f.row(0).transpose());
  out.zu = complexify(af.row(0).transpose());
  out.zv = g * complexify(bf.row(0).transpose());
  out.zuu = complexify((mc_.A * af).row(0).transpose());
  out.zuv = g * complexify((mc_.A * bf).row(0).transpose());
  out.zvv = g * g * complexify((mc_.B * bf).row(0).transpose());
  return out;
}

std::string family_to_csv(const std::vector<CircleFamilyPoint>& points) {
  std::ostringstream out;
  out << "index,beta,a,b,kenmotsu,new_family,membership_residual\n";
  for (std::size_t k = 0; k < points.size(); ++k) {
    const auto& p = points[k];
    out << k << ',' << format_double(p.beta) << ',' << format_double(p.a)
        << ',' << format_double(p.b) << ',' << (p.kenmotsu ? "true" : "false")
        << ',' << (p.new_family ? "true" : "false") << ','
        << format_double(p.membership_residual) << '\n';
  }
  return out.str();
}

std::string family_to_json(double beta,
                           const std::vector<CircleFamilyPoint>& points) {
  double sb = std::sin(beta), cb = std::cos(beta);
  double denom = 1.0 + sb * sb;
  nlohmann::ordered_json root;
  root["beta"] = beta;
  root["center_b"] = cb / denom;
  root["radius"] = std::sqrt(2.0) * sb * sb / denom;
  root["points"] = nlohmann::ordered_json::array();
  for (const auto& p : points) {
    nlohmann::ordered_json row;
    row["a"] = p.a;
    row["b"] = p.b;
    row["kenmotsu"] = p.kenmotsu;
    row["new_family"] = p.new_family;
    row["membership_residual"] = p.membership_residual;
    root["points"].push_back(row);
  }
  return root.dump(2) + "\n";
}

std::string branches_to_json(double beta,
                             const std::vector<ConstantBranch>& branches) {
  nlohmann::ordered_json root;
  root["beta"] = beta;
  root["branches"] = nlohmann::ordered_json::array();
  for (const auto& b : branches) {
    nlohmann::ordered_json row;
    row["alpha"] = b.constants.alpha;
    row["a"] = b.constants.a;
    row["b"] = b.constants.b;
    row["c"] = b.constants.c();
    row["degenerate_a"] = b.degenerate_a;
    row["residuals"] = b.residuals;
    row["circle_membership"] =
        circle_membership(beta, b.constants.a, b.constants.b);
    root["branches"].push_back(row);
  }
  return root.dump(2) + "\n";
}

std::string immersion_to_csv(const IntegrationResult& result) {
  std::ostringstream out;
  out << "u,v,re_z1,im_z1,re_z2,im_z2,re_z3,im_z3\n";
  for (int i = 0; i < result.grid.nu; ++i) {
    for (int j = 0; j < result.grid.nv; ++j) {
      Complex3 z = result.position(i, j);
      out << format_double(result.grid.u(i)) << ','
          << format_double(result.grid.v(j));
      for (int k = 0; k < 3; ++k) {
        out << ',' << format_double(z(k).real()) << ','
            << format_double(z(k).imag());
      }
      out << '\n';
    }
  }
  return out.str();
}

std::string immersion_to_json(const IntegrationResult& result) {
  nlohmann::ordered_json root;
  root["grid"] = grid_json(result.grid);
  root["method"] = result.method;
  root["reortho_count"] = result.reortho_count;
  root["max_orthogonality_defect"] = result.max_orthogonality_defect;
  root["max_sphere_residual"] = result.max_sphere_residual;
  root["path_independence"] = result.path_independence;
  root["periods_u"] = periods_json(result.periods_u);
  root["periods_v"] = periods_json(result.periods_v);
  auto points = nlohmann::ordered_json::array();
  for (int i = 0; i < result.grid.nu; ++i) {
    for (int j = 0; j < result.grid.nv; ++j) {
      Complex3 z = result.position(i, j);
      points.push_back({result.grid.u(i), result.grid.v(j), z(0).real(),
                        z(0).imag(), z(1).real(), z(1).imag(), z(2).real(),
                        z(2).imag()});
    }
  }
  root["points"] = std::move(points);
  return root.dump(2) + "\n";
}

}  // namespace csgeo
