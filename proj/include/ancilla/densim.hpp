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

/// Dense density-matrix simulation of up to 12 qubits with perfect gate
/// layers alternating with i.i.d. single-qubit noise layers, plus the
/// entropy and distance functionals used by the experiments.
///
/// Qubit 0 is the most significant bit of a basis label. Reference qubits
/// are never touched by noise layers or by dephase_all.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "ancilla/channel.hpp"
#include "ancilla/error.hpp"
#include "ancilla/linalg.hpp"

namespace ancilla {

inline constexpr int kMaxQubits = 12;

enum class QubitRole { Data, Ancilla, Reference };

struct Gate {
  CMat u;
  std::vector<int> targets;  // targets[0] is the most significant bit of u's index
};

enum class LayerMode { Protocol, Adversary };

struct GateLayer {
  std::vector<Gate> gates;
  LayerMode mode = LayerMode::Adversary;
};

struct NoiseLayer {
  SuperOp channel;
};

namespace gates {

inline CMat H() {
  CMat m(2, 2);
  const double s = 1 / std::sqrt(2.0);
  m << s, s, s, -s;
  return m;
}
inline CMat X() { return pauli::X(); }
inline CMat Z() { return pauli::Z(); }
inline CMat I2() { return CMat::Identity(2, 2); }

/// Permutation matrix sending basis label x to perm[x].
inline CMat permutation(std::span<const std::uint32_t> perm) {
  const auto d = static_cast<Eigen::Index>(perm.size());
  CMat m = CMat::Zero(d, d);
  for (Eigen::Index x = 0; x < d; ++x) m(perm[static_cast<std::size_t>(x)], x) = 1;
  return m;
}

/// X on the last qubit, conditioned on the other k-1 qubits matching
/// `control_values` (bit i of control_values is the value required on
/// qubit i, MSB first).
inline CMat controlled_flip(int arity, std::uint32_t control_values) {
  const std::uint32_t d = 1U << arity;
  std::vector<std::uint32_t> perm(d);
  for (std::uint32_t x = 0; x < d; ++x) {
    const std::uint32_t controls = x >> 1U;
    const std::uint32_t want = control_values & ((1U << (arity - 1)) - 1);
    perm[x] = controls == want ? (x ^ 1U) : x;
  }
  return permutation(perm);
}

inline CMat CNOT() { return controlled_flip(2, 1); }
inline CMat TOFFOLI() { return controlled_flip(3, 3); }
inline CMat SWAP() {
  const std::uint32_t p[4] = {0, 2, 1, 3};
  return permutation(p);
}

/// Standard matrices for the names accepted in circuit files.
inline CMat named(const std::string& name) {
  if (name == "H") return H();
  if (name == "X") return X();
  if (name == "Z") return Z();
  if (name == "CNOT") return CNOT();
  if (name == "TOFFOLI") return TOFFOLI();
  if (name == "SWAP") return SWAP();
  if (name == "I") return I2();
  throw Error(ErrorKind::Parse, "unknown gate name '" + name + "'");
}

}  // namespace gates

namespace detail {

inline int bit_of(int n, int q) { return n - 1 - q; }

/// Row offsets for every assignment of `targets` (targets[0] most significant)
/// and the list of base indices with all target bits cleared.
struct IndexPlan {
  std::vector<Eigen::Index> offsets;
  std::vector<Eigen::Index> bases;
};

inline IndexPlan plan(int n, std::span<const int> targets) {
  IndexPlan p;
  const std::size_t k = targets.size();
  std::uint64_t mask = 0;
  for (int t : targets) mask |= std::uint64_t{1} << bit_of(n, t);
  p.offsets.resize(std::size_t{1} << k);
  for (std::size_t m = 0; m < p.offsets.size(); ++m) {
    Eigen::Index off = 0;
    for (std::size_t i = 0; i < k; ++i)
      if (m & (std::size_t{1} << (k - 1 - i))) off |= Eigen::Index{1} << bit_of(n, targets[i]);
    p.offsets[m] = off;
  }
  const std::uint64_t dim = std::uint64_t{1} << n;
  for (std::uint64_t x = 0; x < dim; ++x)
    if ((x & mask) == 0) p.bases.push_back(static_cast<Eigen::Index>(x));
  return p;
}

/// a <- U_full a, where U acts on `targets`.
inline void left_apply(CMat& a, const CMat& u, const IndexPlan& p) {
  const auto k = static_cast<Eigen::Index>(p.offsets.size());
  Eigen::VectorXcd v(k), w(k);
  for (Eigen::Index col = 0; col < a.cols(); ++col) {
    for (Eigen::Index b : p.bases) {
      for (Eigen::Index m = 0; m < k; ++m) v(m) = a(b + p.offsets[static_cast<std::size_t>(m)], col);
      w.noalias() = u * v;
      for (Eigen::Index m = 0; m < k; ++m) a(b + p.offsets[static_cast<std::size_t>(m)], col) = w(m);
    }
  }
}

}  // namespace detail

/// rho -> U rho U^dagger with U acting on `targets` of an n-qubit matrix.
inline CMat apply_unitary(const CMat& rho, int n, const CMat& u, std::span<const int> targets) {
  const auto p = detail::plan(n, targets);
  CMat a = rho;
  detail::left_apply(a, u, p);
  CMat b = a.adjoint();
  detail::left_apply(b, u, p);
  return b;
}

/// Applies a single-qubit channel to qubit q of an n-qubit matrix.
inline CMat apply_channel(const CMat& rho, int n, const SuperOp& c, int q) {
  const Mat4 s = c.natural();
  const Eigen::Index m = Eigen::Index{1} << detail::bit_of(n, q);
  const Eigen::Index dim = rho.rows();
  CMat out = rho;
  Eigen::Vector4cd v, w;
  for (Eigen::Index r = 0; r < dim; ++r) {
    if (r & m) continue;
    for (Eigen::Index col = 0; col < dim; ++col) {
      if (col & m) continue;
      v << rho(r, col), rho(r, col + m), rho(r + m, col), rho(r + m, col + m);
      w.noalias() = s * v;
      out(r, col) = w(0);
      out(r, col + m) = w(1);
      out(r + m, col) = w(2);
      out(r + m, col + m) = w(3);
    }
  }
  return out;
}

/// Reduced state on `keep` (in the given order, first = most significant).
inline CMat partial_trace(const CMat& rho, int n, std::span<const int> keep) {
  std::vector<int> traced;
  for (int q = 0; q < n; ++q)
    if (std::find(keep.begin(), keep.end(), q) == keep.end()) traced.push_back(q);
  const auto kp = detail::plan(n, keep);
  const auto tp = detail::plan(n, traced);
  const auto kd = static_cast<Eigen::Index>(kp.offsets.size());
  CMat out = CMat::Zero(kd, kd);
  // Every full index is offset(keep) + offset(traced).
  for (Eigen::Index i = 0; i < kd; ++i)
    for (Eigen::Index j = 0; j < kd; ++j) {
      cplx acc = 0;
      for (Eigen::Index t : tp.offsets) acc += rho(kp.offsets[static_cast<std::size_t>(i)] + t, kp.offsets[static_cast<std::size_t>(j)] + t);
      out(i, j) = acc;
    }
  return out;
}

class QRegister {
 public:
  QRegister() = default;

  QRegister(CMat rho, std::vector<QubitRole> roles) : rho_(std::move(rho)), roles_(std::move(roles)) {
    const int n = num_qubits();
    if (n < 1 || n > kMaxQubits) throw Error(ErrorKind::SizeOverflow, "register must have 1..12 qubits");
    if (rho_.rows() != (Eigen::Index{1} << n) || rho_.cols() != rho_.rows())
      throw Error(ErrorKind::DimensionMismatch, "density matrix does not match the role list");
  }

  /// |0...0><0...0| with the given roles.
  static QRegister zeros(std::vector<QubitRole> roles) {
    const Eigen::Index d = Eigen::Index{1} << roles.size();
    CMat rho = CMat::Zero(d, d);
    rho(0, 0) = 1;
    return QRegister(std::move(rho), std::move(roles));
  }

  static QRegister data(const CMat& rho) {
    const int n = static_cast<int>(std::lround(std::log2(static_cast<double>(rho.rows()))));
    return QRegister(rho, std::vector<QubitRole>(static_cast<std::size_t>(n), QubitRole::Data));
  }

  int num_qubits() const { return static_cast<int>(roles_.size()); }
  const CMat& rho() const { return rho_; }
  const std::vector<QubitRole>& roles() const { return roles_; }
  QubitRole role(int q) const { return roles_.at(static_cast<std::size_t>(q)); }
  bool is_reference(int q) const { return role(q) == QubitRole::Reference; }

  std::vector<int> non_reference() const {
    std::vector<int> out;
    for (int q = 0; q < num_qubits(); ++q)
      if (!is_reference(q)) out.push_back(q);
    return out;
  }
  std::vector<int> references() const {
    std::vector<int> out;
    for (int q = 0; q < num_qubits(); ++q)
      if (is_reference(q)) out.push_back(q);
    return out;
  }

  QRegister with_rho(CMat rho) const { return QRegister(std::move(rho), roles_); }

  /// Trace, Hermiticity and positivity within the given bands.
  void check_invariants(double tol = 1e-10, double psd_band = kPsdBand, bool positivity = true) const {
    if (std::abs(rho_.trace().real() - 1) > tol || std::abs(rho_.trace().imag()) > tol)
      throw Error(ErrorKind::InvalidArgument, "trace is not 1");
    if (!is_hermitian(rho_, tol)) throw Error(ErrorKind::InvalidArgument, "state is not Hermitian");
    if (positivity && hermitian_eigenvalues(rho_).minCoeff() < -psd_band)
      throw Error(ErrorKind::NotPositive, "state has a negative eigenvalue");
  }

 private:
  CMat rho_;
  std::vector<QubitRole> roles_;
};

inline void validate_layer(const GateLayer& layer, int n) {
  std::vector<bool> used(static_cast<std::size_t>(n), false);
  for (const Gate& g : layer.gates) {
    if (g.targets.empty()) throw Error(ErrorKind::InvalidArgument, "gate without targets");
    if (layer.mode == LayerMode::Protocol && g.targets.size() > 2)
      throw Error(ErrorKind::InvalidArgument, "protocol layers allow at most 2-qubit gates");
    const Eigen::Index d = Eigen::Index{1} << g.targets.size();
    if (g.u.rows() != d || g.u.cols() != d) throw Error(ErrorKind::DimensionMismatch, "gate matrix does not match its targets");
    if (!is_unitary(g.u, 1e-10)) throw Error(ErrorKind::InvalidArgument, "gate is not unitary");
    for (int t : g.targets) {
      if (t < 0 || t >= n) throw Error(ErrorKind::DimensionMismatch, "gate target outside the register");
      if (used[static_cast<std::size_t>(t)]) throw Error(ErrorKind::OverlappingTargets, "qubit " + std::to_string(t));
      used[static_cast<std::size_t>(t)] = true;
    }
  }
}

inline QRegister apply_layer(const QRegister& reg, const GateLayer& layer) {
  const int n = reg.num_qubits();
  validate_layer(layer, n);
  CMat rho = reg.rho();
  for (const Gate& g : layer.gates) rho = apply_unitary(rho, n, g.u, g.targets);
  return reg.with_rho(std::move(rho));
}

inline QRegister apply_layers(const QRegister& reg, std::span<const GateLayer> layers) {
  QRegister out = reg;
  for (const auto& l : layers) out = apply_layer(out, l);
  return out;
}

inline QRegister apply_noise(const QRegister& reg, const NoiseLayer& noise) {
  CMat rho = reg.rho();
  for (int q : reg.non_reference()) rho = apply_channel(rho, reg.num_qubits(), noise.channel, q);
  return reg.with_rho(std::move(rho));
}

/// Channel on a chosen subset of qubits (reference qubits are refused).
inline QRegister apply_noise_to(const QRegister& reg, const SuperOp& c, std::span<const int> qubits) {
  CMat rho = reg.rho();
  for (int q : qubits) {
    if (reg.is_reference(q)) throw Error(ErrorKind::InvalidArgument, "reference qubits are noise-exempt");
    rho = apply_channel(rho, reg.num_qubits(), c, q);
  }
  return reg.with_rho(std::move(rho));
}

struct StepOptions {
  bool check_invariants = true;
  bool check_positivity = true;
};

/// One time step: the gate layer, then the noise channel on every
/// non-reference qubit.
inline QRegister step(const QRegister& reg, const GateLayer& layer, const NoiseLayer& noise, StepOptions opts = {}) {
  QRegister out = apply_noise(apply_layer(reg, layer), noise);
  if (opts.check_invariants) out.check_invariants(1e-10, kPsdBand, opts.check_positivity);
  return out;
}

inline CMat reduced(const QRegister& reg, std::span<const int> subset) {
  return partial_trace(reg.rho(), reg.num_qubits(), subset);
}

inline double von_neumann_entropy(const QRegister& reg, std::span<const int> subset) {
  if (subset.empty()) throw Error(ErrorKind::InvalidArgument, "empty subset");
  return entropy_bits(reduced(reg, subset));
}

inline double von_neumann_entropy(const QRegister& reg) { return entropy_bits(reg.rho()); }

/// S(a | b) = S(a u b) - S(b); an empty b gives S(a).
inline double conditional_entropy(const QRegister& reg, std::span<const int> a, std::span<const int> b) {
  for (int q : a)
    if (std::find(b.begin(), b.end(), q) != b.end()) throw Error(ErrorKind::InvalidArgument, "overlapping subsets");
  std::vector<int> ab(a.begin(), a.end());
  ab.insert(ab.end(), b.begin(), b.end());
  const double sb = b.empty() ? 0.0 : von_neumann_entropy(reg, b);
  return von_neumann_entropy(reg, ab) - sb;
}

/// n - S over the non-reference qubits.
inline double information(const QRegister& reg) {
  const auto sys = reg.non_reference();
  if (sys.empty()) return 0.0;
  return static_cast<double>(sys.size()) - von_neumann_entropy(reg, sys);
}

/// Completely dephases every non-reference qubit.
inline QRegister dephase_all(const QRegister& reg) {
  const int n = reg.num_qubits();
  Eigen::Index mask = 0;
  for (int q : reg.non_reference()) mask |= Eigen::Index{1} << detail::bit_of(n, q);
  CMat rho = reg.rho();
  for (Eigen::Index i = 0; i < rho.rows(); ++i)
    for (Eigen::Index j = 0; j < rho.cols(); ++j)
      if ((i ^ j) & mask) rho(i, j) = 0;
  return reg.with_rho(std::move(rho));
}

enum class Norm { One, Two };

inline double distance(const CMat& a, const CMat& b, Norm norm) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) throw Error(ErrorKind::DimensionMismatch, "distance operands differ in size");
  const CMat d = a - b;
  return norm == Norm::One ? trace_norm(d) : d.norm();
}

/// S(a || b) in bits; +infinity when supp(a) is not inside supp(b).
inline double relative_entropy(const CMat& a, const CMat& b) {
  if (a.rows() != b.rows()) throw Error(ErrorKind::DimensionMismatch, "relative entropy operands differ in size");
  Eigen::SelfAdjointEigenSolver<CMat> es(b);
  const RVec& mu = es.eigenvalues();
  const CMat& v = es.eigenvectors();
  double cross = 0;
  for (Eigen::Index k = 0; k < mu.size(); ++k) {
    const double weight = (v.col(k).adjoint() * a * v.col(k))(0, 0).real();
    if (mu(k) <= kEigenClamp) {
      if (weight > kEigenClamp) return std::numeric_limits<double>::infinity();
      continue;
    }
    cross -= weight * std::log2(mu(k));
  }
  return cross - entropy_bits(a);
}

/// <Phi+| rho |Phi+> for the two-qubit state (decoded system qubit, reference)
/// after applying the decoder layers.
inline double epr_fidelity(const QRegister& reg, std::span<const GateLayer> decoder, int system_qubit, int reference_qubit) {
  if (reference_qubit < 0 || reference_qubit >= reg.num_qubits() || !reg.is_reference(reference_qubit))
    throw Error(ErrorKind::MissingReference, "qubit " + std::to_string(reference_qubit) + " is not a reference");
  const QRegister decoded = apply_layers(reg, decoder);
  const int keep[2] = {system_qubit, reference_qubit};
  const CMat pair = reduced(decoded, keep);
  return 0.5 * (pair(0, 0) + pair(0, 3) + pair(3, 0) + pair(3, 3)).real();
}

// State builders ------------------------------------------------------------

inline CMat basis_state(int n, std::uint64_t label) {
  const Eigen::Index d = Eigen::Index{1} << n;
  CMat rho = CMat::Zero(d, d);
  rho(static_cast<Eigen::Index>(label), static_cast<Eigen::Index>(label)) = 1;
  return rho;
}

/// Tensor product, first factor most significant.
inline CMat product(std::span<const CMat> factors) {
  CMat out = CMat::Identity(1, 1);
  for (const auto& f : factors) out = kron(out, f);
  return out;
}

inline CMat epr_pair() {
  CMat rho = CMat::Zero(4, 4);
  rho(0, 0) = rho(0, 3) = rho(3, 0) = rho(3, 3) = 0.5;
  return rho;
}

inline CMat maximally_mixed(int n) {
  const Eigen::Index d = Eigen::Index{1} << n;
  return CMat::Identity(d, d) / static_cast<double>(d);
}

}  // namespace ancilla
