#include "csgeo/ambient.hpp"

#include <cmath>
#include <sstream>

#include "csgeo/tolerances.hpp"

namespace csgeo {

Complex hermitian(const Complex3& z, const Complex3& w) {
  Complex s{0.0, 0.0};
  for (int j = 0; j < 3; ++j) s += z[j] * std::conj(w[j]);
  return s;
}

double real_inner(const Complex3& z, const Complex3& w) {
  return hermitian(z, w).real();
}

Complex3 reeb(const Complex3& z) {
  const double n = std::sqrt(real_inner(z, z));
  if (std::abs(n - 1.0) > tol::kSphere) {
    std::ostringstream os;
    os << "reeb: point has norm " << n << ", expected 1 within " << tol::kSphere;
    throw NotOnSphere(os.str());
  }
  return Complex(0.0, 1.0) * z;
}

ContactSplit contact_project(const Complex3& z, const Complex3& x) {
  const Complex3 xi = reeb(z);  // validates |z| = 1
  const double radial = real_inner(x, z);
  if (std::abs(radial) > tol::kTangent) {
    std::ostringstream os;
    os << "contact_project: vector has radial component " << radial
       << ", expected 0 within " << tol::kTangent;
    throw NotTangent(os.str());
  }
  ContactSplit split;
  split.point = z;
  split.input = x;
  split.reeb_component = real_inner(x, xi);
  split.contact = x - split.reeb_component * xi;
  return split;
}

Vector6d realify(const Complex3& z) {
  Vector6d r;
  for (int j = 0; j < 3; ++j) {
    r[2 * j] = z[j].real();
    r[2 * j + 1] = z[j].imag();
  }
  return r;
}

Complex3 complexify(const Vector6d& r) {
  Complex3 z;
  for (int j = 0; j < 3; ++j) z[j] = Complex(r[2 * j], r[2 * j + 1]);
  return z;
}

Matrix6d complex_structure() {
  Matrix6d m = Matrix6d::Zero();
  for (int j = 0; j < 3; ++j) {
    m(2 * j, 2 * j + 1) = -1.0;
    m(2 * j + 1, 2 * j) = 1.0;
  }
  return m;
}

}  // namespace csgeo
