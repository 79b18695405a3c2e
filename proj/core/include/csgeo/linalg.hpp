#pragma once

#include <vector>

#include "csgeo/ambient.hpp"

namespace csgeo {

/// Matrix exponential (scaling-and-squaring with Pade approximants).
Matrix6d expm(const Matrix6d& m);

Matrix6d commutator(const Matrix6d& a, const Matrix6d& b);

/// Frobenius norm of F F^T - I.
double orthonormality_defect(const Matrix6d& f);

/// Modified Gram-Schmidt on the rows, in place.
void reorthonormalize_rows(Matrix6d& f);

///// Rotation frequencies of a real antisymmetric matrix: the positive
/// imaginary parts of its eigenvalues, sorted ascending, zeros dropped.
std::vector<double> antisymmetric_frequencies(const Matrix6d& a,
                                              double zero_tol = 1e-12);

/// Periodicity of exp(t A) for antisymmetric A.
struct PeriodReport {
  std::vector<double> frequencies;
  bool commensurable = false;
  double fundamental_period = 0.0;  // 2 pi / gcd frequency; 0 when constant
};

PeriodReport analyze_periods(const Matrix6d& a);

}  // namespace csgeo
