#pragma once

#include <complex>

#include <Eigen/Dense>

#include "csgeo/errors.hpp"

namespace csgeo {

using Complex = std::complex<double>;
using Complex3 = Eigen::Vector3cd;
using Vector6d = Eigen::Matrix<double, 6, 1>;
using Matrix6d = Eigen::Matrix<double, 6, 6>;
using Matrix2d = Eigen::Matrix2d;

/// Hermitian product (z,w) = sum_j z_j conj(w_j).
Complex hermitian(const Complex3& z, const Complex3& w);

/// Real part of the Hermitian product: the Euclidean inner product of R^6.
double real_inner(const Complex3& z, const Complex3& w);

/// Reeb vector at a point of the unit sphere: iz. Throws NotOnSphere when
/// | |z| - 1 | exceeds tolerance.
Complex3 reeb(const Complex3& z);

/// Orthogonal split of a tangent vector into Reeb and contact components.
struct ContactSplit {
  Complex3 point;
  Complex3 input;
  double reeb_component = 0.0;  // <X, iz>
  Complex3 contact;             // X - <X,iz> iz
};

/// Splits X in T_z S^5. Throws NotOnSphere / NotTangent on bad input.
ContactSplit contact_project(const Complex3& z, const Complex3& x);

/// Realification convention: z = (x1+iy1, x2+iy2, x3+iy3) maps to
/// (x1, y1, x2, y2, x3, y3). Multiplication by i is the block rotation
/// (x, y) -> (-y, x) applied to each pair.
Vector6d realify(const Complex3& z);
Complex3 complexify(const Vector6d& r);

/// 6x6 matrix of multiplication by i in the realified basis.
Matrix6d complex_structure();

}  // namespace csgeo
