// Copyright 2026 The Ancilla Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

/// Small dense linear-algebra helpers shared by every module: Pauli
/// matrices, Bloch-vector conversions, spectra and entropies, and random
/// unitaries / states for property tests and experiments.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <complex>
#include <random>

#include "ancilla/error.hpp"

namespace ancilla {

using cplx = std::complex<double>;
using Mat2 = Eigen::Matrix2cd;
using Mat4 = Eigen::Matrix4cd;
using Mat3 = Eigen::Matrix3d;
using Mat4r = Eigen::Matrix4d;
using Vec3 = Eigen::Vector3d;
using CMat = Eigen::MatrixXcd;
using RVec = Eigen::VectorXd;
using Rng = std::mt19937_64;

/// Eigenvalues below this are treated as zero before taking logarithms.
inline constexpr double kEigenClamp = 1e-12;
/// Negative eigenvalues below -kPsdBand are hard errors.
inline constexpr double kPsdBand = 1e-9;

namespace pauli {

inline Mat2 I() { return Mat2::Identity(); }
inline Mat2 X() {
  Mat2 m;
  m << 0, 1, 1, 0;
  return m;
}
inline Mat2 Y() {
  Mat2 m;
  m << 0, cplx(0, -1), cplx(0, 1), 0;
  return m;
}
inline Mat2 Z() {
  Mat2 m;
  m << 1, 0, 0, -1;
  return m;
}
/// Index 0..3 maps to I, X, Y, Z.
inline Mat2 at(int k) {
  switch (k) {
    case 0: return I();
    case 1: return X();
    case 2: return Y();
    default: return Z();
  }
}

}  // namespace pauli

inline Mat2 bloch_to_density(const Vec3& w) {
  return 0.5 * (pauli::I() + w(0) * pauli::X() + w(1) * pauli::Y() + w(2) * pauli::Z());
}

inline Vec3 density_to_bloch(const Mat2& rho) {
  return Vec3((pauli::X() * rho).trace().real(), (pauli::Y() * rho).trace().real(),
              (pauli::Z() * rho).trace().real());
}

inline double binary_entropy(double p) {
  double h = 0.0;
  if (p > 0.0) h -= p * std::log2(p);
  if (p < 1.0) h -= (1.0 - p) * std::log2(1.0 - p);
  return h;
}

inline RVec hermitian_eigenvalues(const CMat& m) {
  Eigen::SelfAdjointEigenSolver<CMat> es(m, Eigen::EigenvaluesOnly);
  return es.eigenvalues();
}

/// Shannon entropy in bits of a spectrum; entries below kEigenClamp are
/// dropped, entries below -kPsdBand throw.
inline double spectrum_entropy(const RVec& mu) {
  double s = 0.0;
  for (double x : mu) {
    if (x < -kPsdBand) throw Error(ErrorKind::NotPositive, "negative eigenvalue " + std::to_string(x));
    if (x > kEigenClamp) s -= x * std::log2(x);
  }
  return s;
}

inline double entropy_bits(const CMat& rho) { return spectrum_entropy(hermitian_eigenvalues(rho)); }

/// Schatten 1-norm of a Hermitian matrix.
inline double trace_norm(const CMat& hermitian) { return hermitian_eigenvalues(hermitian).cwiseAbs().sum(); }

inline bool is_hermitian(const CMat& m, double tol) { return (m - m.adjoint()).cwiseAbs().maxCoeff() <= tol; }

inline bool is_unitary(const CMat& u, double tol) {
  if (u.rows() != u.cols()) return false;
  return (u.adjoint() * u - CMat::Identity(u.rows(), u.cols())).cwiseAbs().maxCoeff() <= tol;
}

inline CMat kron(const CMat& a, const CMat& b) {
  CMat out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j) out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

/// Haar-random unitary via QR of a complex Ginibre matrix with the phase fix.
inline CMat haar_unitary(Eigen::Index dim, Rng& rng) {
  std::normal_distribution<double> g(0.0, 1.0);
  CMat z(dim, dim);
  for (Eigen::Index i = 0; i < dim; ++i)
    for (Eigen::Index j = 0; j < dim; ++j) z(i, j) = cplx(g(rng), g(rng));
  Eigen::HouseholderQR<CMat> qr(z);
  CMat q = qr.householderQ();
  CMat r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (Eigen::Index j = 0; j < dim; ++j) {
    const double mag = std::abs(r(j, j));
    if (mag > 0) q.col(j) *= r(j, j) / mag;
  }
  return q;
}

/// Random density matrix of the given rank (Ginibre / induced measure).
inline CMat random_density(Eigen::Index dim, Eigen::Index rank, Rng& rng) {
  std::normal_distribution<double> g(0.0, 1.0);
  CMat a(dim, rank);
  for (Eigen::Index i = 0; i < dim; ++i)
    for (Eigen::Index j = 0; j < rank; ++j) a(i, j) = cplx(g(rng), g(rng));
  CMat rho = a * a.adjoint();
  return rho / rho.trace().real();
}

inline CMat random_pure(Eigen::Index dim, Rng& rng) { return random_density(dim, 1, rng); }

/// Uniform point in the closed unit ball.
inline Vec3 random_ball_point(Rng& rng) {
  std::normal_distribution<double> g(0.0, 1.0);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  Vec3 v(g(rng), g(rng), g(rng));
  v.normalize();
  return v * std::cbrt(u(rng));
}

inline Vec3 random_unit_vector(Rng& rng) {
  std::normal_distribution<double> g(0.0, 1.0);
  Vec3 v(g(rng), g(rng), g(rng));
  return v.normalized();
}

/// Bloch rotation induced by conjugation with a single-qubit unitary:
/// U (w.σ) U† = (R w).σ.
inline Mat3 rotation_of(const Mat2& u) {
  Mat3 r;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j)
      r(i, j) = 0.5 * (pauli::at(i + 1) * u * pauli::at(j + 1) * u.adjoint()).trace().real();
  return r;
}

/// A unitary whose Bloch rotation is `r` (defined up to a global phase).
inline Mat2 unitary_of(const Mat3& r) {
  const Eigen::AngleAxisd aa(r);
  const Vec3 n = aa.axis();
  const double th = aa.angle();
  return std::cos(th / 2) * pauli::I() -
         cplx(0, std::sin(th / 2)) * (n(0) * pauli::X() + n(1) * pauli::Y() + n(2) * pauli::Z());
}

/// Proper rotation taking the unit vector `from` onto `to`.
inline Mat3 rotation_between(const Vec3& from, const Vec3& to) {
  const Vec3 a = from.normalized();
  const Vec3 b = to.normalized();
  const double c = std::clamp(a.dot(b), -1.0, 1.0);
  Vec3 axis = a.cross(b);
  if (axis.norm() < 1e-14) {
    if (c > 0) return Mat3::Identity();
    // Antiparallel: rotate by pi about any axis orthogonal to a.
    axis = std::abs(a(0)) < 0.9 ? a.cross(Vec3::UnitX()) : a.cross(Vec3::UnitY());
  }
  return Eigen::AngleAxisd(std::acos(c), axis.normalized()).toRotationMatrix();
}

}  // namespace ancilla
