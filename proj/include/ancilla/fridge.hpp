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

/// Single-shot algorithmic cooling.
///
/// R qubits, each in the state diag(1 - q, q) (after a pre-rotation that
/// takes the fixed point to the +z hemisphere), are permuted in the
/// computational basis so that the 2^(R-1) most likely strings land on
/// labels whose leading bit is 0. Qubit 0 then holds the "reset" qubit with
/// |0> population equal to the total mass of those strings, which is the
/// best any unitary on R qubits can do for one output qubit (the output
/// marginal is majorized by the sorted input spectrum). The remaining R - 1
/// "waste" qubits carry the displaced entropy.
///
/// The permutation is compiled into stages of mixed-polarity multi-controlled
/// NOTs: every transposition of two labels at Hamming distance m becomes
/// 2m - 1 adjacent transpositions along a Gray path.

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <span>
#include <vector>

#include "ancilla/channel.hpp"
#include "ancilla/densim.hpp"
#include "ancilla/distance.hpp"

namespace ancilla {

/// Largest block the cooling circuit is built for (2^R x 2^R matrices).
inline constexpr int kMaxFridgeBlock = 10;

namespace detail {

/// Probability mass of the 2^(R-1) most likely (top) or least likely
/// (bottom) strings of R i.i.d. bits with P(1) = q <= 1/2.
inline double half_mass(double q, int r, bool top) {
  if (r < 1) throw Error(ErrorKind::InvalidArgument, "block size must be >= 1");
  if (q == 0.0) return top ? 1.0 : 0.0;
  const double lq = std::log(q);
  const double lp = std::log1p(-q);
  double mass = 0;
  if (r <= 62) {
    // Exact string counts; only the per-string probabilities round.
    using u128 = unsigned __int128;
    std::uint64_t quota = std::uint64_t{1} << (r - 1);
    for (int i = 0; i <= r && quota > 0; ++i) {
      const int k = top ? i : r - i;
      u128 c = 1;
      for (int j = 0; j < k; ++j) c = c * static_cast<u128>(r - j) / static_cast<u128>(j + 1);
      const std::uint64_t take = std::min<std::uint64_t>(static_cast<std::uint64_t>(c), quota);
      quota -= take;
      mass += static_cast<double>(take) * std::exp((r - k) * lp + k * lq);
    }
    return mass;
  }
  // Remaining quota as a fraction of all 2^R strings.
  double quota = 0.5;
  for (int i = 0; i <= r && quota > 0; ++i) {
    const int k = top ? i : r - i;
    const double lchoose = std::lgamma(r + 1.0) - std::lgamma(k + 1.0) - std::lgamma(r - k + 1.0);
    const double frac = std::exp(lchoose - r * std::log(2.0));
    const double take = std::min(frac, quota);
    quota -= take;
    // take * 2^R strings, each with probability (1-q)^(R-k) q^k
    mass += std::exp(std::log(take) + r * std::log(2.0) + (r - k) * lp + k * lq);
  }
  return mass;
}

}  // namespace detail

/// Mass of the 2^(R-1) most likely strings; for R = 1 this is 1 - q.
inline double top_mass(double q, int r) { return 1 - detail::half_mass(q, r, false); }

/// 1-norm distance of the ideal reset qubit from |0><0|: 2 (1 - top_mass).
inline double reset_residual(double q, int r) { return 2 * detail::half_mass(q, r, false); }

inline int choose_R(double q, double eps2, int cap = 1 << 20) {
  if (!(q >= 0) || q > 0.5) throw Error(ErrorKind::InvalidArgument, "bias must lie in [0, 1/2)");
  if (q == 0.5) throw Error(ErrorKind::Unreachable, "fixed point is the center: no cooling possible");
  if (!(eps2 > 0)) throw Error(ErrorKind::InvalidArgument, "eps2 must be positive");
  auto ok = [&](int r) { return reset_residual(q, r) < eps2; };
  int hi = 1;
  while (!ok(hi)) {
    if (hi >= cap) throw Error(ErrorKind::Unreachable, "block size exceeds cap");
    hi = std::min(cap, hi * 2);
  }
  int lo = hi / 2;  // fails unless 0
  while (hi - lo > 1) {
    const int mid = lo + (hi - lo) / 2;
    (ok(mid) ? hi : lo) = mid;
  }
  return hi;
}

/// Swap of basis labels `from` and from ^ (bit of `target`): an X on
/// `target` controlled on every other qubit matching `from`.
struct FlipStage {
  int target = 0;
  std::uint32_t from = 0;
};

struct FridgeSpec {
  double q = 0;
  int R = 1;
  std::vector<std::uint32_t> permutation;  // label x -> permutation[x]
  Mat2 pre_rotation = Mat2::Identity();
  std::vector<FlipStage> stages;
  int F = 1;
};

inline CMat permutation_unitary(const FridgeSpec& spec) { return gates::permutation(spec.permutation); }

inline CMat stage_unitary(const FlipStage& s, int r) {
  const std::uint32_t d = 1U << r;
  std::vector<std::uint32_t> perm(d);
  std::iota(perm.begin(), perm.end(), 0U);
  const std::uint32_t other = s.from ^ (1U << (r - 1 - s.target));
  perm[s.from] = other;
  perm[other] = s.from;
  return gates::permutation(perm);
}

namespace detail {

inline void append_transposition(std::vector<FlipStage>& out, std::uint32_t a, std::uint32_t b, int r) {
  std::vector<FlipStage> path;
  std::uint32_t cur = a;
  for (int q = 0; q < r; ++q) {
    const std::uint32_t bit = 1U << (r - 1 - q);
    if ((a ^ b) & bit) {
      path.push_back({q, cur});
      cur ^= bit;
    }
  }
  for (const auto& s : path) out.push_back(s);
  for (auto it = path.rbegin() + 1; it < path.rend(); ++it) out.push_back(*it);
}

}  // namespace detail

inline FridgeSpec build_cooling_circuit(double q, int r) {
  if (!(q >= 0) || !(q < 0.5)) throw Error(ErrorKind::InvalidArgument, "bias must lie in [0, 1/2)");
  if (r < 1 || r > kMaxFridgeBlock) throw Error(ErrorKind::SizeOverflow, "cooling circuits are built for 1 <= R <= 10");
  FridgeSpec spec;
  spec.q = q;
  spec.R = r;
  const std::uint32_t d = 1U << r;
  std::vector<std::uint32_t> order(d);
  std::iota(order.begin(), order.end(), 0U);
  // Probability is decreasing in the number of ones; ties by ascending label.
  std::stable_sort(order.begin(), order.end(), [&](std::uint32_t a, std::uint32_t b) {
    const int pa = std::popcount(a), pb = std::popcount(b);
    if (q == 0.0 && pa > 0 && pb > 0) return a < b;
    return pa != pb ? pa < pb : a < b;
  });
  spec.permutation.assign(d, 0);
  for (std::uint32_t rank = 0; rank < d; ++rank) spec.permutation[order[rank]] = rank;

  std::vector<bool> seen(d, false);
  for (std::uint32_t x = 0; x < d; ++x) {
    if (seen[x] || spec.permutation[x] == x) {
      seen[x] = true;
      continue;
    }
    std::vector<std::uint32_t> cycle;
    for (std::uint32_t y = x; !seen[y]; y = spec.permutation[y]) {
      seen[y] = true;
      cycle.push_back(y);
    }
    for (std::size_t j = 1; j < cycle.size(); ++j) detail::append_transposition(spec.stages, cycle[0], cycle[j], r);
  }
  spec.F = static_cast<int>(std::max<std::size_t>(spec.stages.size(), 1)) * r;
  return spec;
}

/// Cooling circuit for a channel fixed point P (Bloch vector, P != center):
/// the pre-rotation takes P to the +z axis, so the majority maps to |0>.
inline FridgeSpec build_cooling_circuit_for(const Vec3& fixed_point, int r) {
  const double len = fixed_point.norm();
  if (len < 1e-12) throw Error(ErrorKind::Unreachable, "fixed point is the center: no cooling possible");
  FridgeSpec spec = build_cooling_circuit(std::max(0.0, (1 - std::min(len, 1.0)) / 2), r);
  spec.pre_rotation = unitary_of(rotation_between(fixed_point, Vec3::UnitZ()));
  return spec;
}

/// P^(x)R in the lab frame.
inline CMat fixed_point_product(const FridgeSpec& spec) {
  Mat2 z = Mat2::Zero();
  z(0, 0) = 1 - spec.q;
  z(1, 1) = spec.q;
  const CMat p = spec.pre_rotation.adjoint() * z * spec.pre_rotation;
  std::vector<CMat> factors(static_cast<std::size_t>(spec.R), p);
  return product(factors);
}

enum class FridgeMode { Ideal, Noisy };

struct CoolingReport {
  Mat2 reset_state = Mat2::Zero();
  double reset_distance = 0;
  double waste_entropy = 0;
  FridgeMode mode = FridgeMode::Ideal;
  CMat output;  // full R-qubit output state
  // Noisy runs only.
  double location_distance = 0;  // estimated ||noise - id||
  double bound = 0;
  bool within_bound = true;
};

namespace detail {

inline CMat pre_rotate(const FridgeSpec& spec, const CMat& input) {
  if (input.rows() != (Eigen::Index{1} << spec.R) || input.cols() != input.rows())
    throw Error(ErrorKind::DimensionMismatch, "fridge input must be an R-qubit state");
  CMat rho = input;
  for (int q = 0; q < spec.R; ++q) {
    const int t[1] = {q};
    rho = apply_unitary(rho, spec.R, spec.pre_rotation, t);
  }
  return rho;
}

inline CoolingReport summarize(const FridgeSpec& spec, CMat out, FridgeMode mode) {
  CoolingReport rep;
  rep.mode = mode;
  const int reset[1] = {0};
  rep.reset_state = partial_trace(out, spec.R, reset);
  Mat2 zero = Mat2::Zero();
  zero(0, 0) = 1;
  rep.reset_distance = trace_norm(rep.reset_state - zero);
  if (spec.R > 1) {
    std::vector<int> waste(static_cast<std::size_t>(spec.R - 1));
    std::iota(waste.begin(), waste.end(), 1);
    rep.waste_entropy = entropy_bits(partial_trace(out, spec.R, waste));
  }
  rep.output = std::move(out);
  return rep;
}

inline std::vector<int> all_qubits(int r) {
  std::vector<int> t(static_cast<std::size_t>(r));
  std::iota(t.begin(), t.end(), 0);
  return t;
}

}  // namespace detail

inline CoolingReport run_fridge_ideal(const FridgeSpec& spec, const CMat& input) {
  CMat rho = detail::pre_rotate(spec, input);
  rho = apply_unitary(rho, spec.R, permutation_unitary(spec), detail::all_qubits(spec.R));
  return detail::summarize(spec, std::move(rho), FridgeMode::Ideal);
}

/// Runs the compiled circuit on the qubits `block` (block[0] becomes the reset
/// qubit) of an n-qubit state, with `noise` on every block qubit after every
/// stage; an empty circuit still waits one step. The pre-rotation is merged
/// into the first stage.
inline CMat apply_fridge(CMat rho, int n, const FridgeSpec& spec, const SuperOp& noise, std::span<const int> block) {
  if (static_cast<int>(block.size()) != spec.R) throw Error(ErrorKind::DimensionMismatch, "fridge block must have R qubits");
  for (int q : block) {
    const int t[1] = {q};
    rho = apply_unitary(rho, n, spec.pre_rotation, t);
  }
  auto noise_block = [&] {
    for (int q : block) rho = apply_channel(rho, n, noise, q);
  };
  if (spec.stages.empty()) noise_block();
  for (const auto& s : spec.stages) {
    rho = apply_unitary(rho, n, stage_unitary(s, spec.R), block);
    noise_block();
  }
  return rho;
}

/// Noisy run on an R-qubit input. The report carries the bound
///     ideal residual at P + ||input - P^R||_1 + 1.1 F d,
/// with d the estimated distance of `noise` from the identity and 10% slack
/// for the estimator.
inline CoolingReport run_fridge_noisy(const FridgeSpec& spec, const SuperOp& noise, const CMat& input,
                                      const DistanceOptions& dopts = {}) {
  if (input.rows() != (Eigen::Index{1} << spec.R) || input.cols() != input.rows())
    throw Error(ErrorKind::DimensionMismatch, "fridge input must be an R-qubit state");
  CoolingReport rep = detail::summarize(spec, apply_fridge(input, spec.R, spec, noise, detail::all_qubits(spec.R)), FridgeMode::Noisy);
  rep.location_distance = channel_distance(noise, SuperOp::identity(), dopts).upper;
  const double drift = trace_norm(input - fixed_point_product(spec));
  rep.bound = reset_residual(spec.q, spec.R) + drift + 1.1 * spec.F * rep.location_distance;
  rep.within_bound = rep.reset_distance <= rep.bound + 1e-12;
  return rep;
}

}  // namespace ancilla
