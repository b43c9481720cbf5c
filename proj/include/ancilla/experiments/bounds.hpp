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

/// Entropy inequalities behind the dephasing storage-time bound.
///
/// The bound argues that every noise step on a register storing quantum
/// information raises the global entropy by at least delta, and the register
/// holds at most n bits. Two constants are available for the concavity step:
///   paper: k = 2 / ln 2, as printed; fails on (|0><0|, |1><1|, 1/2).
///   safe:  k = 1 / (2 ln 2), which follows from Pinsker and ||.||_2 <= ||.||_1.
/// Safe mode scales delta by 1/4 and the time bound by 4.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <numeric>
#include <span>
#include <string>
#include <vector>

#include <fmt/format.h>

#include "ancilla/densim.hpp"
#include "ancilla/experiments/trace.hpp"

namespace ancilla {

enum class ConstantMode { Paper, Safe };

inline const char* to_string(ConstantMode m) { return m == ConstantMode::Paper ? "paper" : "safe"; }

inline ConstantMode parse_constant_mode(const std::string& s) {
  if (s == "paper") return ConstantMode::Paper;
  if (s == "safe") return ConstantMode::Safe;
  throw Error(ErrorKind::Parse, "mode must be 'paper' or 'safe', got '" + s + "'");
}

inline double concavity_constant(ConstantMode m) {
  return m == ConstantMode::Paper ? 2 / std::numbers::ln2 : 1 / (2 * std::numbers::ln2);
}

/// S(a||b) - ||a - b||_2^2 / (2 ln 2); +infinity when S(a||b) is.
inline double pinsker_margin(const CMat& a, const CMat& b) {
  const double rel = relative_entropy(a, b);
  if (std::isinf(rel)) return rel;
  return rel - distance(a, b, Norm::Two) * distance(a, b, Norm::Two) / (2 * std::numbers::ln2);
}

/// S((1-p) a + p b) - (1-p) S(a) - p S(b) - k p (1-p) ||a - b||_2^2.
inline double concavity_margin(const CMat& a, const CMat& b, double p, ConstantMode mode = ConstantMode::Safe) {
  if (!(p >= 0 && p <= 1)) throw Error(ErrorKind::InvalidArgument, "mix weight must lie in [0, 1]");
  if (a.rows() != b.rows()) throw Error(ErrorKind::DimensionMismatch, "operands differ in size");
  const double d2 = distance(a, b, Norm::Two);
  const CMat mix = (1 - p) * a + p * b;
  return entropy_bits(mix) - (1 - p) * entropy_bits(a) - p * entropy_bits(b) -
         concavity_constant(mode) * p * (1 - p) * d2 * d2;
}

struct DephasingBoundParams {
  double p = 0;
  double eps = 0;
  int n = 0;
  ConstantMode constant_mode = ConstantMode::Safe;
  double delta = 0;    // minimum entropy gain per step while eps-far from dephased
  double t_bound = 0;  // n / delta
};

inline DephasingBoundParams dephasing_bound(double p, double eps, int n, ConstantMode mode = ConstantMode::Safe) {
  if (!(p > 0 && p < 1)) throw Error(ErrorKind::InvalidArgument, "p must lie in (0, 1)");
  if (!(eps > 0)) throw Error(ErrorKind::InvalidArgument, "eps must be positive");
  if (n < 1) throw Error(ErrorKind::InvalidArgument, "n must be >= 1");
  DephasingBoundParams out{p, eps, n, mode, 0, 0};
  const double nn = static_cast<double>(n);
  out.delta = 4 * concavity_constant(mode) * p * (1 - p) * eps * eps / (nn * nn);
  out.t_bound = nn / out.delta;
  return out;
}

/// Entropy bookkeeping for one noise layer.
///
/// gaps[i] = S(N_i(rho)) - S(rho), the conditional-entropy gain of qubit i
/// given everything else when only qubit i is hit. For each ordering the
/// chain terms add noise one qubit at a time and telescope to the global
/// increase; for unital noise every term is >= 0, so the global increase
/// dominates the first term and, over orderings, every gap.
struct EntropyLedger {
  double global_increase = 0;
  std::vector<int> qubits;   // non-reference qubits, gaps are aligned with this
  std::vector<double> gaps;
  double max_gap = 0;
  std::vector<std::vector<int>> orderings;
  std::vector<std::vector<double>> chain_terms;
  bool holds = true;
};

inline EntropyLedger entropy_ledger_step(const QRegister& before, const QRegister& after, const SuperOp& noise,
                                         std::span<const int> ordering, std::uint64_t seed = 0,
                                         int random_orderings = 3, double tol = 1e-9) {
  if (before.num_qubits() != after.num_qubits() || before.roles() != after.roles())
    throw Error(ErrorKind::DimensionMismatch, "ledger registers differ in shape");
  const QRegister expected = apply_noise(before, NoiseLayer{noise});
  if ((expected.rho() - after.rho()).cwiseAbs().maxCoeff() > 1e-9)
    throw Error(ErrorKind::InvalidArgument, "'after' is not the noise layer applied to 'before'");

  EntropyLedger led;
  led.qubits = before.non_reference();
  std::vector<int> sorted(ordering.begin(), ordering.end());
  std::sort(sorted.begin(), sorted.end());
  if (sorted != led.qubits) throw Error(ErrorKind::InvalidArgument, "ordering must list every non-reference qubit once");

  const int n = before.num_qubits();
  const double s0 = von_neumann_entropy(before);
  led.global_increase = von_neumann_entropy(after) - s0;
  for (int q : led.qubits) {
    const double g = entropy_bits(apply_channel(before.rho(), n, noise, q)) - s0;
    led.gaps.push_back(g);
    led.max_gap = std::max(led.max_gap, g);
  }

  led.orderings.emplace_back(ordering.begin(), ordering.end());
  Rng rng(seed);
  for (int r = 0; r < random_orderings; ++r) {
    std::vector<int> o = led.qubits;
    std::shuffle(o.begin(), o.end(), rng);
    led.orderings.push_back(std::move(o));
  }

  led.holds = led.global_increase >= led.max_gap - tol;
  for (const auto& o : led.orderings) {
    std::vector<double> terms;
    CMat rho = before.rho();
    double prev = s0;
    for (int q : o) {
      rho = apply_channel(rho, n, noise, q);
      const double s = entropy_bits(rho);
      terms.push_back(s - prev);
      prev = s;
    }
    const double total = std::accumulate(terms.begin(), terms.end(), 0.0);
    const auto first = static_cast<std::size_t>(std::find(led.qubits.begin(), led.qubits.end(), o.front()) - led.qubits.begin());
    if (std::abs(total - led.global_increase) > tol) led.holds = false;
    if (!terms.empty() && std::abs(terms.front() - led.gaps[first]) > tol) led.holds = false;
    if (!terms.empty() && total < terms.front() - tol) led.holds = false;
    led.chain_terms.push_back(std::move(terms));
  }
  return led;
}

/// If the global entropy can rise by at most `capacity` in total, then any
/// window of ceil(capacity / delta) consecutive steps contains a step whose
/// increase is <= delta.
struct PigeonholeReport {
  std::size_t window = 0;
  std::size_t windows_checked = 0;
  bool holds = true;
};

inline PigeonholeReport pigeonhole_check(std::span<const double> increments, double capacity, double delta) {
  if (!(delta > 0)) throw Error(ErrorKind::InvalidArgument, "delta must be positive");
  PigeonholeReport rep;
  const double w = std::ceil(std::max(capacity, 0.0) / delta);
  rep.window = w > 1e15 ? std::numeric_limits<std::size_t>::max() : static_cast<std::size_t>(std::max(w, 1.0));
  if (rep.window > increments.size()) return rep;
  for (std::size_t start = 0; start + rep.window <= increments.size(); ++start) {
    ++rep.windows_checked;
    bool small = false;
    for (std::size_t i = start; i < start + rep.window && !small; ++i) small = increments[i] <= delta;
    if (!small) rep.holds = false;
  }
  return rep;
}

struct BoundsConfig {
  int trials = 10000;
  int max_dim = 8;
  ConstantMode mode = ConstantMode::Safe;
  std::uint64_t seed = 0;
  double p = 0.1;
  double eps = 0.1;
};

/// Property sweeps for both margins, the pinned concavity counterexample
/// and the n^3 scaling of the storage-time bound.
inline ExperimentResult run_bounds(const BoundsConfig& cfg) {
  if (cfg.trials < 1 || cfg.max_dim < 2) throw Error(ErrorKind::InvalidArgument, "need trials >= 1 and max_dim >= 2");
  ExperimentResult res;
  res.name = "bounds";
  Rng rng(cfg.seed);
  std::uniform_int_distribution<Eigen::Index> dim_pick(2, cfg.max_dim);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  double pinsker_min = std::numeric_limits<double>::infinity();
  double safe_min = std::numeric_limits<double>::infinity();
  double mode_min = std::numeric_limits<double>::infinity();
  for (int i = 0; i < cfg.trials; ++i) {
    const Eigen::Index d = dim_pick(rng);
    std::uniform_int_distribution<Eigen::Index> rank_pick(1, d);
    const CMat a = random_density(d, rank_pick(rng), rng);
    const CMat b = random_density(d, d, rng);
    pinsker_min = std::min(pinsker_min, pinsker_margin(a, b));
    const CMat c = random_density(d, rank_pick(rng), rng);
    const double w = unit(rng);
    safe_min = std::min(safe_min, concavity_margin(a, c, w, ConstantMode::Safe));
    mode_min = std::min(mode_min, concavity_margin(a, c, w, cfg.mode));
  }
  const CMat zero = basis_state(1, 0);
  const CMat one = basis_state(1, 1);
  const double counter = concavity_margin(zero, one, 0.5, cfg.mode);

  res.summary["pinsker_min_margin"] = pinsker_min;
  res.summary["concavity_min_margin_safe"] = safe_min;
  res.summary[fmt::format("concavity_min_margin_{}", to_string(cfg.mode))] = mode_min;
  res.summary[fmt::format("concavity_counterexample_margin_{}", to_string(cfg.mode))] = counter;
  res.check("pinsker_margin_nonnegative", pinsker_min >= -1e-9, fmt::format("min {:.3g}", pinsker_min));
  res.check("safe_concavity_nonnegative", safe_min >= -1e-9, fmt::format("min {:.3g}", safe_min));
  if (cfg.mode == ConstantMode::Paper) {
    res.check("paper_counterexample_reproduced", counter <= -0.4, fmt::format("margin {:.6f}", counter));
    res.notes.push_back("paper constant fails on (|0><0|, |1><1|, 1/2); the safe constant is the provable one");
  }

  double worst_ratio = 0;
  for (int n = 1; n <= 8; n *= 2) {
    const auto b = dephasing_bound(cfg.p, cfg.eps, n, cfg.mode);
    res.summary[fmt::format("delta_n{}", n)] = b.delta;
    res.summary[fmt::format("t_bound_n{}", n)] = b.t_bound;
    if (n > 1) {
      const double ratio = b.t_bound / dephasing_bound(cfg.p, cfg.eps, n / 2, cfg.mode).t_bound;
      worst_ratio = std::max(worst_ratio, std::abs(ratio - 8));
    }
  }
  res.summary["n_cubed_ratio_error"] = worst_ratio;
  res.check("n_cubed_scaling", worst_ratio <= 1e-9, fmt::format("max |ratio - 8| = {:.3g}", worst_ratio));
  return res;
}

}  // namespace ancilla
