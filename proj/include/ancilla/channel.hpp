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

/// Single-qubit channels in Kraus, Pauli-transfer-matrix and Bloch canonical
/// form.
///
/// A channel acts on a Bloch vector w as w -> t + M w. The 4x4 Pauli transfer
/// matrix (PTM) stores this as
///
///     [ 1 0 ]
///     [ t M ]
///
/// acting on the (I, X, Y, Z) coefficient vector. The canonical form factors
/// M = U diag(lambda) V with proper rotations U (post) and V (pre), and keeps
/// the shift in the rotated frame, so that w -> U (t' + diag(lambda) V w).

#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "ancilla/error.hpp"
#include "ancilla/linalg.hpp"

namespace ancilla {

struct Tolerances {
  double structural = 1e-10;
  double classification = 1e-8;
};

struct KrausSet {
  std::vector<Mat2> ops;

  /// Max-abs deviation of sum A^dagger A from the identity.
  double completeness_error() const {
    Mat2 s = Mat2::Zero();
    for (const auto& a : ops) s += a.adjoint() * a;
    return (s - Mat2::Identity()).cwiseAbs().maxCoeff();
  }
};

class SuperOp {
 public:
  SuperOp() : ptm_(Mat4r::Identity()) {}

  /// Rejects matrices whose first row is not (1, 0, 0, 0).
  explicit SuperOp(const Mat4r& ptm, double tol = 1e-10) : ptm_(ptm) {
    const Eigen::RowVector4d expect(1, 0, 0, 0);
    if ((ptm.row(0) - expect).cwiseAbs().maxCoeff() > tol)
      throw Error(ErrorKind::NotTracePreserving, "PTM first row must be (1, 0, 0, 0)");
    ptm_.row(0) = expect;
  }

  static SuperOp identity() { return SuperOp(); }

  static SuperOp from_affine(const Vec3& shift, const Mat3& block) {
    Mat4r m = Mat4r::Zero();
    m(0, 0) = 1;
    m.block<3, 1>(1, 0) = shift;
    m.block<3, 3>(1, 1) = block;
    return SuperOp(m);
  }

  const Mat4r& ptm() const { return ptm_; }
  Vec3 shift() const { return ptm_.block<3, 1>(1, 0); }
  Mat3 block() const { return ptm_.block<3, 3>(1, 1); }

  Vec3 apply(const Vec3& w) const { return shift() + block() * w; }

  Mat2 apply(const Mat2& rho) const { return bloch_to_density(apply(density_to_bloch(rho))); }

  /// Composition: (a * b) applies b first, then a.
  friend SuperOp operator*(const SuperOp& a, const SuperOp& b) { return SuperOp(a.ptm_ * b.ptm_); }

  /// Action on arbitrary (not necessarily Hermitian) 2x2 matrices in the
  /// row-major basis (E00, E01, E10, E11): vec(C(X)) = natural() * vec(X).
  Mat4 natural() const {
    Mat4 s = Mat4::Zero();
    for (int a = 0; a < 2; ++a) {
      for (int b = 0; b < 2; ++b) {
        // Pauli coefficients r_j = tr(sigma_j E_ab) = (sigma_j)_{ba}.
        Eigen::Vector4cd r;
        for (int j = 0; j < 4; ++j) r(j) = pauli::at(j)(b, a);
        const Eigen::Vector4cd out = ptm_.cast<cplx>() * r;
        Mat2 m = Mat2::Zero();
        for (int i = 0; i < 4; ++i) m += 0.5 * out(i) * pauli::at(i);
        for (int c = 0; c < 2; ++c)
          for (int d = 0; d < 2; ++d) s(2 * c + d, 2 * a + b) = m(c, d);
      }
    }
    return s;
  }

 private:
  Mat4r ptm_;
};

inline KrausSet unitary_kraus(const Mat2& u) { return KrausSet{{u}}; }

/// PTM entry (i, j) = (1/2) tr[sigma_i sum_k A_k sigma_j A_k^dagger].
inline SuperOp kraus_to_superop(const KrausSet& k, double tol = 1e-10) {
  if (k.ops.empty()) throw Error(ErrorKind::InvalidArgument, "empty Kraus set");
  if (k.completeness_error() > tol) throw Error(ErrorKind::NotTracePreserving, "sum of A^dagger A differs from I");
  Mat4r m;
  for (int i = 0; i < 4; ++i) {
    for (int j = 0; j < 4; ++j) {
      cplx acc = 0;
      for (const auto& a : k.ops) acc += (pauli::at(i) * a * pauli::at(j) * a.adjoint()).trace();
      m(i, j) = 0.5 * acc.real();
    }
  }
  return SuperOp(m, 1e-9);
}

namespace channels {

inline KrausSet depolarizing_kraus(double p) {
  return KrausSet{{std::sqrt(1 - p) * pauli::I(), std::sqrt(p / 3) * pauli::X(), std::sqrt(p / 3) * pauli::Y(),
                   std::sqrt(p / 3) * pauli::Z()}};
}

inline KrausSet dephasing_kraus(double p) { return KrausSet{{std::sqrt(1 - p) * pauli::I(), std::sqrt(p) * pauli::Z()}}; }

inline KrausSet amplitude_damping_kraus(double p) {
  Mat2 a0, a1;
  a0 << 1, 0, 0, std::sqrt(1 - p);
  a1 << 0, std::sqrt(p), 0, 0;
  return KrausSet{{a0, a1}};
}

/// Amplitude damping toward a thermal state with excited population q.
inline KrausSet generalized_amplitude_damping_kraus(double p, double q) {
  Mat2 a0, a1, a2, a3;
  a0 << 1, 0, 0, std::sqrt(1 - p);
  a1 << 0, std::sqrt(p), 0, 0;
  a2 << std::sqrt(1 - p), 0, 0, 1;
  a3 << 0, 0, std::sqrt(p), 0;
  return KrausSet{{std::sqrt(1 - q) * a0, std::sqrt(1 - q) * a1, std::sqrt(q) * a2, std::sqrt(q) * a3}};
}

inline KrausSet pauli_kraus(double px, double py, double pz) {
  return KrausSet{{std::sqrt(std::max(0.0, 1 - px - py - pz)) * pauli::I(), std::sqrt(px) * pauli::X(),
                   std::sqrt(py) * pauli::Y(), std::sqrt(pz) * pauli::Z()}};
}

inline SuperOp depolarizing(double p) { return kraus_to_superop(depolarizing_kraus(p)); }
inline SuperOp dephasing(double p) { return kraus_to_superop(dephasing_kraus(p)); }
inline SuperOp amplitude_damping(double p) { return kraus_to_superop(amplitude_damping_kraus(p)); }
inline SuperOp generalized_amplitude_damping(double p, double q) {
  return kraus_to_superop(generalized_amplitude_damping_kraus(p, q));
}
inline SuperOp pauli_channel(double px, double py, double pz) { return kraus_to_superop(pauli_kraus(px, py, pz)); }
inline SuperOp unitary(const Mat2& u) { return kraus_to_superop(unitary_kraus(u)); }

/// Matrix transpose: positive and trace preserving but not completely positive.
inline SuperOp transpose_map() { return SuperOp(Eigen::Vector4d(1, 1, -1, 1).asDiagonal().toDenseMatrix()); }

/// Random CP trace-preserving channel with `kraus_rank` Kraus operators,
/// built from a Haar-random isometry.
inline KrausSet random_kraus(int kraus_rank, Rng& rng) {
  const CMat u = haar_unitary(2 * kraus_rank, rng);
  KrausSet k;
  for (int i = 0; i < kraus_rank; ++i) k.ops.push_back(u.block(2 * i, 0, 2, 2));
  return k;
}

inline SuperOp random_channel(int kraus_rank, Rng& rng) { return kraus_to_superop(random_kraus(kraus_rank, rng)); }

}  // namespace channels

struct CanonicalForm {
  Vec3 t = Vec3::Zero();          // shift in the rotated frame
  Vec3 lambda = Vec3::Ones();     // signed axis scalings
  Mat3 pre_rot = Mat3::Identity();
  Mat3 post_rot = Mat3::Identity();

  Vec3 lab_shift() const { return post_rot * t; }
  Mat3 lab_block() const { return post_rot * lambda.asDiagonal() * pre_rot; }
  SuperOp reconstruct() const { return SuperOp::from_affine(lab_shift(), lab_block()); }
  /// The channel with both rotations stripped.
  SuperOp diagonal_channel() const { return SuperOp::from_affine(t, lambda.asDiagonal()); }
};

inline CanonicalForm canonical_form(const SuperOp& c) {
  const Mat3 m = c.block();
  CanonicalForm f;
  Mat3 off = m;
  off.diagonal().setZero();
  if (off.cwiseAbs().maxCoeff() <= 1e-13) {
    f.lambda = m.diagonal();
    f.t = c.shift();
    return f;
  }
  Eigen::JacobiSVD<Mat3> svd(m, Eigen::ComputeFullU | Eigen::ComputeFullV);
  Mat3 u = svd.matrixU();
  Mat3 v = svd.matrixV();
  Vec3 s = svd.singularValues();
  if (u.determinant() < 0) {
    u.col(2) *= -1;
    s(2) *= -1;
  }
  if (v.determinant() < 0) {
    v.col(2) *= -1;
    s(2) *= -1;
  }
  f.lambda = s;
  f.post_rot = u;
  f.pre_rot = v.transpose();
  f.t = u.transpose() * c.shift();
  return f;
}

inline bool is_unital(const SuperOp& c, double tol = 1e-10) { return c.shift().norm() <= tol; }

/// Choi matrix J = sum_ab C(E_ab) (x) E_ab, output factor first.
inline Mat4 choi_matrix(const SuperOp& c) {
  const Mat4 s = c.natural();
  Mat4 j = Mat4::Zero();
  for (int a = 0; a < 2; ++a)
    for (int b = 0; b < 2; ++b)
      for (int o1 = 0; o1 < 2; ++o1)
        for (int o2 = 0; o2 < 2; ++o2) j(2 * o1 + a, 2 * o2 + b) = s(2 * o1 + o2, 2 * a + b);
  return j;
}

inline bool choi_positive(const SuperOp& c, double tol = 1e-10) {
  return hermitian_eigenvalues(choi_matrix(c)).minCoeff() >= -tol;
}

/// Complete positivity. Unital forms use the axis inequalities
/// |l_i + l_j| <= |1 + l_k| and |l_i - l_j| <= |1 - l_k| over all
/// permutations; non-unital forms fall back to Choi positivity.
inline bool cp_check(const CanonicalForm& f, double tol = 1e-10) {
  if (f.t.norm() > tol) return choi_positive(f.reconstruct(), tol);
  const Vec3& l = f.lambda;
  if (l.cwiseAbs().maxCoeff() > 1 + tol) return false;
  for (int k = 0; k < 3; ++k) {
    const int i = (k + 1) % 3;
    const int j = (k + 2) % 3;
    if (std::abs(l(i) + l(j)) > std::abs(1 + l(k)) + tol) return false;
    if (std::abs(l(i) - l(j)) > std::abs(1 - l(k)) + tol) return false;
  }
  return true;
}

/// t_i / (1 - lambda_i) per axis, in the rotated frame. Axes with no shift
/// contribute 0.
namespace detail {

/// t / (1 - lambda) loses digits when lambda is near 1; pull overshoots of
/// the unit sphere from rounding back onto it.
inline Vec3 clamp_to_ball(Vec3 w) {
  const double len = w.norm();
  if (len > 1 && len <= 1 + 1e-6) w /= len;
  return w;
}

}  // namespace detail

inline Vec3 canonical_fixed_point(const CanonicalForm& f, double tol = 1e-10) {
  Vec3 w = Vec3::Zero();
  for (int i = 0; i < 3; ++i) {
    if (std::abs(f.t(i)) <= tol) continue;
    if (std::abs(f.lambda(i)) >= 1 - tol)
      throw Error(ErrorKind::NonContractive, "axis " + std::to_string(i) + " is not contracted but shifted");
    w(i) = f.t(i) / (1 - f.lambda(i));
  }
  return detail::clamp_to_ball(w);
}

/// Fixed point of the full channel as a Bloch vector. Unital channels return
/// the center. When post_rot = pre_rot^T the per-axis closed form is mapped
/// back through post_rot; otherwise (I - U diag(lambda) V) w = U t is solved.
inline Vec3 fixed_point(const CanonicalForm& f, double tol = 1e-10) {
  if (f.t.norm() <= tol) return Vec3::Zero();
  if ((f.post_rot * f.pre_rot - Mat3::Identity()).cwiseAbs().maxCoeff() <= 1e-12)
    return f.post_rot * canonical_fixed_point(f, tol);
  if (f.lambda.cwiseAbs().maxCoeff() >= 1 - tol)
    throw Error(ErrorKind::NonContractive, "channel is not strictly contractive");
  const Mat3 a = Mat3::Identity() - f.lab_block();
  return detail::clamp_to_ball(a.fullPivLu().solve(f.lab_shift()));
}

struct PauliChannelParams {
  double p_x = 0, p_y = 0, p_z = 0;
};

inline PauliChannelParams pauli_probs(const CanonicalForm& f, double tol = 1e-10) {
  if (f.t.norm() > tol) throw Error(ErrorKind::InvalidArgument, "pauli_probs requires a unital channel");
  const Vec3& l = f.lambda;
  PauliChannelParams p{(1 + l(0) - l(1) - l(2)) / 4, (1 - l(0) + l(1) - l(2)) / 4, (1 - l(0) - l(1) + l(2)) / 4};
  if (p.p_x < -1e-12 || p.p_y < -1e-12 || p.p_z < -1e-12)
    throw Error(ErrorKind::NotPositive, "lambda triple is not a valid Pauli channel");
  return p;
}

inline SuperOp power(const SuperOp& c, std::uint64_t k) {
  Mat4r result = Mat4r::Identity();
  Mat4r base = c.ptm();
  while (k > 0) {
    if (k & 1U) result = result * base;
    base = base * base;
    k >>= 1U;
  }
  return SuperOp(result, 1e-8);
}

/// C_P: discards the input and prepares the state with Bloch vector p.
inline SuperOp replacement_channel(const Vec3& p) {
  if (p.norm() > 1 + 1e-12) throw Error(ErrorKind::InvalidArgument, "Bloch vector outside the unit ball");
  return SuperOp::from_affine(p, Mat3::Zero());
}

}  // namespace ancilla
