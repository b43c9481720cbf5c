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

// Information decay under depolarizing-class noise with no fresh qubits.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <string>
#include <vector>

#include <fmt/format.h>

#include "ancilla/classify.hpp"
#include "ancilla/densim.hpp"
#include "ancilla/experiments/bounds.hpp"
#include "ancilla/experiments/trace.hpp"

namespace ancilla {

enum class CircuitPolicy { Idle, RandomCircuit };

inline CircuitPolicy parse_policy(const std::string& s) {
  if (s == "idle") return CircuitPolicy::Idle;
  if (s == "random_circuit") return CircuitPolicy::RandomCircuit;
  throw Error(ErrorKind::Parse, "policy must be 'idle' or 'random_circuit', got '" + s + "'");
}

struct DecayConfig {
  int n = 4;
  SuperOp channel = channels::depolarizing(0.1);
  int steps = 30;
  CircuitPolicy policy = CircuitPolicy::RandomCircuit;
  std::uint64_t seed = 0;
  bool maximally_mixed_start = false;
};

/// Haar-random two-qubit gates on a random pairing of the n qubits.
inline GateLayer random_pairing_layer(int n, Rng& rng) {
  std::vector<int> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), 0);
  std::shuffle(order.begin(), order.end(), rng);
  GateLayer layer;
  layer.mode = LayerMode::Protocol;
  for (std::size_t i = 0; i + 1 < order.size(); i += 2) layer.gates.push_back({haar_unitary(4, rng), {order[i], order[i + 1]}});
  if (n % 2 == 1) layer.gates.push_back({haar_unitary(2, rng), {order.back()}});
  return layer;
}

/// Least-squares slope of log(y) over the points with y > floor; returns the
/// per-step factor exp(slope), or NaN with fewer than two usable points.
inline double fit_decay_factor(const std::vector<double>& y, double floor = 1e-10) {
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  int m = 0;
  for (std::size_t t = 0; t < y.size(); ++t) {
    if (!(y[t] > floor)) continue;
    const double x = static_cast<double>(t);
    const double ly = std::log(y[t]);
    sx += x;
    sy += ly;
    sxx += x * x;
    sxy += x * ly;
    ++m;
  }
  if (m < 2) return std::nan("");
  const double slope = (m * sxy - sx * sy) / (m * sxx - sx * sx);
  return std::exp(slope);
}

/// Runs a data register from a random pure state and, in lock step, a copy
/// whose qubit 0 is maximally entangled with a noise-free reference. The
/// reference fidelity is read after undoing every gate applied so far.
inline ExperimentResult run_depolarizing_decay(const DecayConfig& cfg) {
  if (cfg.n < 1 || cfg.n > 8) throw Error(ErrorKind::SizeOverflow, "decay runs support 1..8 qubits");
  if (cfg.steps < 0) throw Error(ErrorKind::InvalidArgument, "steps must be >= 0");
  if (classify(cfg.channel).kind != ClassKind::Depolarizing)
    throw Error(ErrorKind::InvalidArgument, "channel is not in the depolarizing class");

  ExperimentResult res;
  res.name = "depol_decay";
  Rng rng(cfg.seed);
  const int n = cfg.n;
  const auto dim = Eigen::Index{1} << n;

  QRegister data = QRegister::data(cfg.maximally_mixed_start ? maximally_mixed(n) : random_pure(dim, rng));
  std::vector<QubitRole> roles(static_cast<std::size_t>(n), QubitRole::Data);
  roles.push_back(QubitRole::Reference);
  // (|0..0>|0> + |10..0>|1>) / sqrt 2: qubit 0 paired with the reference at slot n.
  Eigen::VectorXcd psi = Eigen::VectorXcd::Zero(dim * 2);
  psi(0) = psi(dim + 1) = 1 / std::sqrt(2.0);
  const CMat ent = psi * psi.adjoint();
  QRegister entangled(ent, roles);

  std::vector<int> system(static_cast<std::size_t>(n));
  std::iota(system.begin(), system.end(), 0);
  CMat accumulated = CMat::Identity(dim, dim);
  const NoiseLayer noise{cfg.channel};

  auto record = [&](int t, const EntropyLedger* led) {
    TraceRecord r;
    r.step = t;
    r.entropy = von_neumann_entropy(data);
    r.information = information(data);
    const GateLayer undo{{Gate{accumulated.adjoint(), system}}, LayerMode::Adversary};
    r.epr_fidelity = epr_fidelity(entangled, std::span<const GateLayer>(&undo, 1), 0, n);
    if (led) {
      r.gaps = led->gaps;
      r.max_gap = led->max_gap;
    }
    res.trace.push_back(std::move(r));
  };

  record(0, nullptr);
  bool ledger_ok = true;
  for (int t = 1; t <= cfg.steps; ++t) {
    GateLayer layer;
    if (cfg.policy == CircuitPolicy::RandomCircuit) layer = random_pairing_layer(n, rng);
    const QRegister before = apply_layer(data, layer);
    data = step(data, layer, noise);
    entangled = step(entangled, layer, noise);
    if (!layer.gates.empty()) {
      CMat u = CMat::Identity(dim, dim);
      for (const Gate& g : layer.gates) {
        const auto pl = detail::plan(n, g.targets);
        detail::left_apply(u, g.u, pl);
      }
      accumulated = u * accumulated;
    }
    const EntropyLedger led = entropy_ledger_step(before, data, cfg.channel, system, cfg.seed + static_cast<std::uint64_t>(t), 0);
    ledger_ok = ledger_ok && led.holds;
    record(t, &led);
  }

  bool monotone = true;
  for (std::size_t i = 1; i < res.trace.size(); ++i)
    if (res.trace[i].information > res.trace[i - 1].information + 1e-9) monotone = false;
  res.check("information_non_increasing", monotone);
  res.check("entropy_ledger", ledger_ok, "global increase >= max per-qubit gap at every step");

  const CanonicalForm f = canonical_form(cfg.channel);
  const Vec3 l = f.lambda.cwiseAbs();
  if (n == 1 && cfg.policy == CircuitPolicy::Idle && !cfg.maximally_mixed_start && (l.maxCoeff() - l.minCoeff()) < 1e-12) {
    double worst = 0;
    for (const auto& r : res.trace) {
      const double closed = 1 - binary_entropy((1 + std::pow(l(0), r.step)) / 2);
      worst = std::max(worst, std::abs(closed - r.information));
    }
    res.summary["closed_form_max_error"] = worst;
    res.check("single_qubit_closed_form", worst <= 1e-9, fmt::format("max error {:.3g}", worst));
  }

  std::vector<double> info;
  for (const auto& r : res.trace) info.push_back(r.information);
  const double factor = fit_decay_factor(info);
  const double p_eff = 0.75 * (1 - l.mean());
  res.summary["fitted_decay_factor"] = factor;
  res.summary["effective_p"] = p_eff;
  if (std::isfinite(factor) && p_eff > 0) res.summary["fitted_c"] = (1 - factor) / p_eff;
  int below = -1;
  for (const auto& r : res.trace)
    if (below < 0 && r.epr_fidelity && *r.epr_fidelity < 0.6) below = r.step;
  res.summary["epr_below_0.6_step"] = below;
  res.summary["final_information"] = res.trace.back().information;
  return res;
}

}  // namespace ancilla
