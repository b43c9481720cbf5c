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

/// Experiments under dephasing noise, which leaves |0> and |1> alone.
///
/// stockpile:   a small working register computes into fresh |0> qubits that
///              wait, untouched by the noise, in a stockpile.
/// epr storage: one half of an EPR pair is stored, bare or in the 3-qubit
///              phase-flip code, while the other half sits in a perfect
///              reference. Stored entanglement eventually decodes to a
///              separable state.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <string>
#include <vector>

#include <fmt/format.h>

#include "ancilla/densim.hpp"
#include "ancilla/experiments/bounds.hpp"
#include "ancilla/experiments/trace.hpp"

namespace ancilla {

struct StockpileConfig {
  double a_exp = 0.5;
  double b_exp = 0.4;
  int n = 9;
  double p = 0.1;
  int ancillas_per_step = 1;
  int step_cap = 200;
  std::uint64_t seed = 0;
  bool record_entropy = true;
};

inline int stockpile_working_qubits(int n, double a_exp) {
  const double m = std::ceil(std::pow(static_cast<double>(n), a_exp) - 1e-12);
  return std::clamp(static_cast<int>(m), 1, n);
}

inline ExperimentResult run_stockpile(const StockpileConfig& cfg) {
  if (cfg.n < 1 || cfg.n > 10) throw Error(ErrorKind::SizeOverflow, "stockpile runs support 1..10 qubits");
  if (!(cfg.p >= 0 && cfg.p <= 1)) throw Error(ErrorKind::InvalidArgument, "p must lie in [0, 1]");
  if (cfg.ancillas_per_step < 0 || cfg.step_cap < 0) throw Error(ErrorKind::InvalidArgument, "negative demand or cap");

  ExperimentResult res;
  res.name = "stockpile";
  const int n = cfg.n;
  const int m = stockpile_working_qubits(n, cfg.a_exp);
  const bool in_regime = cfg.a_exp + cfg.b_exp < 1;
  if (!in_regime) res.notes.push_back("a + b >= 1: outside the regime where the stockpile argument applies");
  res.summary["working_qubits"] = m;
  res.summary["stockpile_qubits"] = n - m;
  res.summary["in_regime"] = in_regime ? 1 : 0;
  res.summary["target_depth"] = std::pow(static_cast<double>(n), cfg.b_exp);

  Rng rng(cfg.seed);
  std::vector<CMat> parts{random_pure(Eigen::Index{1} << m, rng)};
  for (int q = m; q < n; ++q) parts.push_back(basis_state(1, 0));
  QRegister reg = QRegister::data(product(parts));
  const NoiseLayer noise{channels::dephasing(cfg.p)};
  Mat2 zero = Mat2::Zero();
  zero(0, 0) = 1;

  auto record = [&](int t) {
    TraceRecord r;
    r.step = t;
    if (cfg.record_entropy) {
      r.entropy = von_neumann_entropy(reg);
      r.information = n - r.entropy;
    }
    res.trace.push_back(r);
  };

  record(0);
  int next_fresh = m;
  int steps = 0;
  double stockpile_drift = 0;
  std::uniform_int_distribution<int> pick(0, m - 1);
  while (steps < cfg.step_cap) {
    if (cfg.ancillas_per_step > 0 && n - next_fresh < cfg.ancillas_per_step) break;
    std::vector<GateLayer> layers;
    for (int k = 0; k < cfg.ancillas_per_step; ++k) {
      const int s = next_fresh++;
      const int a = pick(rng);
      if (m >= 2) {
        int b = pick(rng);
        while (b == a) b = pick(rng);
        layers.push_back({{Gate{gates::TOFFOLI(), {a, b, s}}}});
      } else {
        layers.push_back({{Gate{gates::CNOT(), {a, s}}}});
      }
    }
    if (m >= 2) {
      const int a = pick(rng);
      int b = pick(rng);
      while (b == a) b = pick(rng);
      layers.push_back({{Gate{gates::CNOT(), {a, b}}}});
    }
    reg = apply_noise(apply_layers(reg, layers), noise);
    reg.check_invariants(1e-10, kPsdBand, n <= 8);
    ++steps;
    for (int q = next_fresh; q < n; ++q) {
      const int keep[1] = {q};
      stockpile_drift = std::max(stockpile_drift, (reduced(reg, keep) - zero).cwiseAbs().maxCoeff());
    }
    record(steps);
  }

  res.summary["steps"] = steps;
  res.summary["stockpile_drift"] = stockpile_drift;
  res.check("stockpile_untouched", stockpile_drift <= 1e-12, fmt::format("max deviation {:.3g}", stockpile_drift));
  if (cfg.ancillas_per_step > 0) {
    const int expected = std::min(cfg.step_cap, (n - m) / cfg.ancillas_per_step);
    res.check("step_count", steps >= expected, fmt::format("{} steps, expected >= {}", steps, expected));
  } else {
    res.check("step_count", steps == cfg.step_cap, fmt::format("{} steps, cap {}", steps, cfg.step_cap));
  }
  return res;
}

enum class StorageCode { None, PhaseFlip3 };

inline StorageCode parse_storage_code(const std::string& s) {
  if (s == "none") return StorageCode::None;
  if (s == "phase_flip_3") return StorageCode::PhaseFlip3;
  throw Error(ErrorKind::Parse, "code must be 'none' or 'phase_flip_3', got '" + s + "'");
}

struct EprStorageConfig {
  StorageCode code = StorageCode::None;
  double p = 0.1;
  int steps = 10;
  std::uint64_t seed = 0;
  int correct_every = 3;  // phase_flip_3: noise steps between correction blocks
  double eps = 0.1;       // 2-norm distance that sets delta for the pigeonhole check
  ConstantMode mode = ConstantMode::Safe;
  int ledger_orderings = 3;
};

/// (1 + (1 - 2p)^t) / 2: one bare EPR half after t dephasing steps.
inline double uncoded_epr_fidelity(double p, int t) { return (1 + std::pow(1 - 2 * p, t)) / 2; }

namespace detail {

inline std::vector<GateLayer> phase_flip_encoder(int d0, int d1, int d2) {
  return {{{Gate{gates::CNOT(), {d0, d1}}}},
          {{Gate{gates::CNOT(), {d0, d2}}}},
          {{Gate{gates::H(), {d0}}, Gate{gates::H(), {d1}}, Gate{gates::H(), {d2}}}}};
}

/// Majority decoding back onto d0: the inverse encoder plus a Toffoli.
inline std::vector<GateLayer> phase_flip_decoder(int d0, int d1, int d2) {
  return {{{Gate{gates::H(), {d0}}, Gate{gates::H(), {d1}}, Gate{gates::H(), {d2}}}},
          {{Gate{gates::CNOT(), {d0, d1}}}},
          {{Gate{gates::CNOT(), {d0, d2}}}},
          {{Gate{gates::TOFFOLI(), {d1, d2, d0}}}}};
}

}  // namespace detail

inline ExperimentResult run_epr_storage(const EprStorageConfig& cfg) {
  if (!(cfg.p >= 0 && cfg.p <= 1)) throw Error(ErrorKind::InvalidArgument, "p must lie in [0, 1]");
  if (cfg.steps < 0) throw Error(ErrorKind::InvalidArgument, "steps must be >= 0");
  if (cfg.correct_every < 1) throw Error(ErrorKind::InvalidArgument, "correct_every must be >= 1");

  ExperimentResult res;
  res.name = "epr_storage";
  const bool coded = cfg.code == StorageCode::PhaseFlip3;
  // Layout: 0 = reference, 1 = system (d0), then d1, d2 and |0> stockpile.
  const int nq = coded ? 8 : 2;
  std::vector<QubitRole> roles(static_cast<std::size_t>(nq), QubitRole::Data);
  roles[0] = QubitRole::Reference;
  for (int q = 4; q < nq; ++q) roles[static_cast<std::size_t>(q)] = QubitRole::Ancilla;

  const Eigen::Index dim = Eigen::Index{1} << nq;
  Eigen::VectorXcd psi = Eigen::VectorXcd::Zero(dim);
  psi(0) = psi(Eigen::Index{3} << (nq - 2)) = 1 / std::sqrt(2.0);
  QRegister reg(psi * psi.adjoint(), roles);

  std::vector<GateLayer> decoder;
  if (coded) {
    reg = apply_layers(reg, detail::phase_flip_encoder(1, 2, 3));
    decoder = detail::phase_flip_decoder(1, 2, 3);
  }
  int next_fresh = 4;
  const SuperOp channel = channels::dephasing(cfg.p);
  const NoiseLayer noise{channel};
  std::vector<int> sys = reg.non_reference();

  std::vector<double> increments;
  double worst_endgame = -1;
  bool ledger_ok = true;
  auto record = [&](int t, const EntropyLedger* led) {
    TraceRecord r;
    r.step = t;
    r.entropy = von_neumann_entropy(reg, sys);
    r.information = static_cast<double>(sys.size()) - r.entropy;
    r.epr_fidelity = epr_fidelity(reg, decoder, 1, 0);
    if (led) {
      r.gaps = led->gaps;
      r.max_gap = led->max_gap;
    }
    // Distance to the separable state dephase_all(rho) bounds the fidelity.
    const QRegister sep = dephase_all(reg);
    const double one = distance(reg.rho(), sep.rho(), Norm::One);
    worst_endgame = std::max(worst_endgame, *r.epr_fidelity - (0.5 + 0.5 * one));
    res.trace.push_back(std::move(r));
  };

  record(0, nullptr);
  int corrections = 0;
  for (int t = 1; t <= cfg.steps; ++t) {
    if (coded && t > 1 && (t - 1) % cfg.correct_every == 0 && next_fresh + 1 < nq) {
      // Coherent correction: decode, majority-correct onto d0, park the
      // syndrome in two fresh stockpile qubits, re-encode.
      std::vector<GateLayer> block = detail::phase_flip_decoder(1, 2, 3);
      block.push_back({{Gate{gates::SWAP(), {2, next_fresh}}, Gate{gates::SWAP(), {3, next_fresh + 1}}}});
      for (auto& l : detail::phase_flip_encoder(1, 2, 3)) block.push_back(std::move(l));
      reg = apply_layers(reg, block);
      next_fresh += 2;
      ++corrections;
    }
    const QRegister before = reg;
    reg = apply_noise(reg, noise);
    reg.check_invariants();
    const EntropyLedger led = entropy_ledger_step(before, reg, channel, sys, cfg.seed + static_cast<std::uint64_t>(t), cfg.ledger_orderings);
    ledger_ok = ledger_ok && led.holds;
    increments.push_back(led.global_increase);
    record(t, &led);
  }

  const double final_f = *res.trace.back().epr_fidelity;
  res.summary["final_fidelity"] = final_f;
  res.summary["uncoded_final_fidelity"] = uncoded_epr_fidelity(cfg.p, cfg.steps);
  res.summary["margin_vs_uncoded"] = final_f - uncoded_epr_fidelity(cfg.p, cfg.steps);
  res.summary["corrections"] = corrections;
  res.summary["endgame_worst_excess"] = worst_endgame;
  res.check("entropy_ledger", ledger_ok, "global increase >= max per-qubit gap at every step");
  res.check("separable_endgame", worst_endgame <= 1e-9,
            fmt::format("max F - (1/2 + ||rho - dephased||_1 / 2) = {:.3g}", worst_endgame));
  if (!coded) {
    double worst = 0;
    for (const auto& r : res.trace) worst = std::max(worst, std::abs(*r.epr_fidelity - uncoded_epr_fidelity(cfg.p, r.step)));
    res.summary["closed_form_max_error"] = worst;
    res.check("uncoded_closed_form", worst <= 1e-9, fmt::format("max error {:.3g}", worst));
  }
  if (cfg.p > 0 && cfg.p < 1) {
    const DephasingBoundParams b = dephasing_bound(cfg.p, cfg.eps, static_cast<int>(sys.size()), cfg.mode);
    const PigeonholeReport ph = pigeonhole_check(increments, static_cast<double>(nq), b.delta);
    res.summary["delta"] = b.delta;
    res.summary["t_bound"] = b.t_bound;
    res.summary["pigeonhole_window"] = static_cast<double>(ph.window);
    res.summary["pigeonhole_windows_checked"] = static_cast<double>(ph.windows_checked);
    res.check("pigeonhole", ph.holds, fmt::format("window {} over {} steps", ph.window, increments.size()));
  }
  return res;
}

}  // namespace ancilla
