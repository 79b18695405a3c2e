#include "csgeo/linalg.hpp"

#include <algorithm>
#include <cmath>

#include <unsupported/Eigen/MatrixFunctions>

namespace csgeo {

Matrix6d expm(const Matrix6d& m) { return m.exp(); }

Matrix6d commutator(const Matrix6d& a, const Matrix6d& b) {
  return a * b - b * a;
}

double orthonormality_defect(const Matrix6d& f) {
  return (f * f.transpose() - Matrix6d::Identity()).norm();
}

void reorthonormalize_rows(Matrix6d& f) {
  for (int r = 0; r < 6; ++r) {
    for (int p = 0; p < r; ++p) f.row(r) -= f.row(r).dot(f.row(p)) * f.row(p);
    f.row(r) /= f.row(r).norm();
  }
}

std::vector<double> antisymmetric_frequencies(const Matrix6d& a, double zero_tol) {
  Eigen::EigenSolver<Matrix6d> solver(a, /*computeEigenvectors=*/false);
  std::vector<double> freq;
  for (int k = 0; k < 6; ++k) {
    const double w = solver.eigenvalues()[k].imag();
    if (w > zero_tol) freq.push_back(w);
  }
  std::sort(freq.begin(), freq.end());
  return freq;
}

namespace {

// gcd of positive reals up to tolerance; 0 when it degenerates to noise.
double real_gcd(std::vector<double> values, double tolerance) {
  double g = 0.0;
  for (double v : values) {
    double a = std::max(g, v), b = std::min(g, v);
    while (b > tolerance) {
      const double r = std::fmod(a, b);
      a = b;
      b = (r > b - tolerance) ? 0.0 : r;  // treat near-multiples as exact
    }
    g = a;
  }
  return g;
}

}  // namespace

PeriodReport analyze_periods(const Matrix6d& a) {
  PeriodReport report;
  report.frequencies = antisymmetric_frequencies(a);
  if (report.frequencies.empty()) {
    // exp(tA) is constant in every rotation plane; any period works.
    report.commensurable = true;
    report.fundamental_period = 0.0;
    return report;
  }
  const double top = report.frequencies.back();
  const double g = real_gcd(report.frequencies, 1e-9 * top);
  if (g > top / 64.0) {
    bool all_integer = true;
    for (double w : report.frequencies) {
      const double ratio = w / g;
      if (std::abs(ratio - std::nearbyint(ratio)) > 1e-6) all_integer = false;
    }
    if (all_integer) {
      report.commensurable = true;
      report.fundamental_period = 2.0 * M_PI / g;
      return report;
    }
  }
  report.commensurable = false;
  report.fundamental_period = 0.0;
  return report;
}

}  // namespace csgeo
