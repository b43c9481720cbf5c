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

/// Ancilla recycling under non-unital noise.
///
/// Computation: a 3-qubit repetition-code memory corrected coherently, two
/// ancillas per cycle. Storage house: used qubits idle for T noise steps,
/// which brings each of them within eps1 / (n' D' R) of the fixed point P.
/// Refrigerator: R stored qubits are cooled into one reset qubit, which
/// becomes the next ancilla; the R - 1 waste qubits return to storage.
///
/// Two simulation modes:
///   factorized  storage is a FIFO of single-qubit states, so correlations
///               of recycled qubits with the memory are dropped;
///   exact       everything lives in one register (<= 8 qubits) and storage
///               applies C^T in place.
/// A stale baseline reuses the same two ancillas with no reset at all.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <deque>
#include <numeric>
#include <string>
#include <vector>

#include <fmt/format.h>

#include "ancilla/classify.hpp"
#include "ancilla/densim.hpp"
#include "ancilla/fridge.hpp"
#include "ancilla/experiments/trace.hpp"

namespace ancilla {

enum class SimMode { Exact, Factorized };

inline const char* to_string(SimMode m) { return m == SimMode::Exact ? "exact" : "factorized"; }

inline SimMode parse_sim_mode(const std::string& s) {
  if (s == "exact") return SimMode::Exact;
  if (s == "factorized") return SimMode::Factorized;
  throw Error(ErrorKind::Parse, "sim must be 'exact' or 'factorized', got '" + s + "'");
}

struct ProtocolConfig {
  int n_prime = 5;                 // 3 data + 2 ancillas
  int d_prime = 50;                // correction cycles
  std::uint64_t storage_T = 0;     // 0: derived from eps1
  int r_block = 0;                 // 0: derived from eps2
  int f_count = 0;                 // derived: fridge locations
  double eps0 = 0.05;              // reported only
  double eps1 = 0.01;
  double eps2 = 0.1;
  std::uint64_t m_throughput = 0;  // derived: qubits drawn from storage
  SimMode mode = SimMode::Factorized;
};

struct ProtocolInput {
  Eigen::Vector2cd logical = Eigen::Vector2cd(0, 1);
  std::uint64_t seed = 0;
  DistanceOptions distance;
};

enum class RepetitionBasis { BitFlip, PhaseFlip };

/// Bit-flip code when the channel shrinks z at least as much as x.
inline RepetitionBasis repetition_basis(const SuperOp& c) {
  const Mat3 m = c.block();
  return 1 - std::abs(m(2, 2)) >= 1 - std::abs(m(0, 0)) ? RepetitionBasis::BitFlip : RepetitionBasis::PhaseFlip;
}

struct ResolvedProtocol {
  ProtocolConfig cfg;
  Vec3 fixed_point = Vec3::Zero();
  FridgeSpec fridge;
  double storage_target = 0;  // eps1 / (n' D' R)
  RepetitionBasis basis = RepetitionBasis::BitFlip;
  int cycle_steps = 0;
};

namespace detail {

/// X on qubits 1 and 2 controlled on qubit 0.
inline CMat fanout() {
  std::vector<std::uint32_t> perm(8);
  for (std::uint32_t x = 0; x < 8; ++x) perm[x] = (x & 4U) ? (x ^ 3U) : x;
  return gates::permutation(perm);
}

inline std::vector<GateLayer> repetition_cycle(RepetitionBasis basis) {
  const int d0 = 0, d1 = 1, d2 = 2, a0 = 3, a1 = 4;
  std::vector<GateLayer> layers;
  const GateLayer hadamards{{Gate{gates::H(), {d0}}, Gate{gates::H(), {d1}}, Gate{gates::H(), {d2}}}};
  if (basis == RepetitionBasis::PhaseFlip) layers.push_back(hadamards);
  // d1 is read into both ancillas in one location: with two separate reads a
  // single decay of d1 between them yields syndrome 10 and a second error.
  layers.push_back({{Gate{gates::CNOT(), {d0, a0}}, Gate{gates::CNOT(), {d2, a1}}}});
  layers.push_back({{Gate{fanout(), {d1, a0, a1}}}});
  // Syndrome (a0, a1): 10 -> d0, 11 -> d1, 01 -> d2.
  layers.push_back({{Gate{gates::controlled_flip(3, 0b10), {a0, a1, d0}}}});
  layers.push_back({{Gate{gates::controlled_flip(3, 0b11), {a0, a1, d1}}}});
  layers.push_back({{Gate{gates::controlled_flip(3, 0b01), {a0, a1, d2}}}});
  if (basis == RepetitionBasis::PhaseFlip) layers.push_back(hadamards);
  return layers;
}

inline std::vector<GateLayer> repetition_encoder(RepetitionBasis basis) {
  std::vector<GateLayer> layers{{{Gate{gates::CNOT(), {0, 1}}}}, {{Gate{gates::CNOT(), {0, 2}}}}};
  if (basis == RepetitionBasis::PhaseFlip)
    layers.push_back({{Gate{gates::H(), {0}}, Gate{gates::H(), {1}}, Gate{gates::H(), {2}}}});
  return layers;
}

/// Ideal majority decode of data qubits 0..2 of `rho` and the overlap of
/// qubit 0 with the logical state.
inline double logical_fidelity(const CMat& rho, int n, RepetitionBasis basis, const Eigen::Vector2cd& logical) {
  const int data[3] = {0, 1, 2};
  QRegister d = QRegister::data(partial_trace(rho, n, data));
  std::vector<GateLayer> dec;
  if (basis == RepetitionBasis::PhaseFlip) dec.push_back({{Gate{gates::H(), {0}}, Gate{gates::H(), {1}}, Gate{gates::H(), {2}}}});
  dec.push_back({{Gate{gates::CNOT(), {0, 1}}}});
  dec.push_back({{Gate{gates::CNOT(), {0, 2}}}});
  dec.push_back({{Gate{gates::TOFFOLI(), {1, 2, 0}}}});
  d = apply_layers(d, dec);
  const int first[1] = {0};
  const CMat q0 = reduced(d, first);
  return (logical.adjoint() * q0 * logical)(0, 0).real();
}

inline CMat encoded_memory(RepetitionBasis basis, const Eigen::Vector2cd& logical, const std::vector<CMat>& tail) {
  std::vector<CMat> parts{logical * logical.adjoint(), basis_state(1, 0), basis_state(1, 0)};
  parts.insert(parts.end(), tail.begin(), tail.end());
  return apply_layers(QRegister::data(product(parts)), repetition_encoder(basis)).rho();
}

}  // namespace detail

/// Fills the derived fields: R (if 0), T (if 0), F and the storage target.
inline ResolvedProtocol resolve_protocol(ProtocolConfig cfg, const SuperOp& channel, const DistanceOptions& dopts = {}) {
  if (cfg.d_prime < 1) throw Error(ErrorKind::InvalidArgument, "d_prime must be >= 1");
  if (!(cfg.eps1 > 0) || !(cfg.eps2 > 0)) throw Error(ErrorKind::InvalidArgument, "eps1 and eps2 must be positive");
  const ChannelClass cls = classify(channel);
  if (cls.kind != ClassKind::NonUnital) throw Error(ErrorKind::InvalidArgument, "refrigerator protocol needs a non-unital channel");
  ResolvedProtocol out;
  out.fixed_point = cls.fixed_point;
  const double q = std::max(0.0, (1 - std::min(out.fixed_point.norm(), 1.0)) / 2);
  if (cfg.r_block <= 0) cfg.r_block = choose_R(q, cfg.eps2);
  out.fridge = build_cooling_circuit_for(out.fixed_point, cfg.r_block);
  cfg.f_count = out.fridge.F;
  out.storage_target = cfg.eps1 / (static_cast<double>(cfg.n_prime) * cfg.d_prime * cfg.r_block);
  if (cfg.storage_T == 0) cfg.storage_T = RelaxationProfile(channel, dopts).time_to(out.storage_target).steps;
  out.basis = repetition_basis(channel);
  out.cycle_steps = static_cast<int>(detail::repetition_cycle(out.basis).size());
  if (cfg.mode == SimMode::Exact && 5 + 2 * (cfg.r_block - 1) > 8)
    throw Error(ErrorKind::SizeOverflow, fmt::format("exact mode needs {} qubits (max 8)", 5 + 2 * (cfg.r_block - 1)));
  out.cfg = cfg;
  return out;
}

namespace detail {

inline std::vector<TraceRecord> run_stale(const ResolvedProtocol& rp, const SuperOp& channel, const ProtocolInput& in) {
  const CMat zero = basis_state(1, 0);
  QRegister reg = QRegister::data(encoded_memory(rp.basis, in.logical, {zero, zero}));
  const auto cycle = repetition_cycle(rp.basis);
  const NoiseLayer noise{channel};
  std::vector<TraceRecord> trace;
  for (int c = 1; c <= rp.cfg.d_prime; ++c) {
    for (const auto& l : cycle) reg = step(reg, l, noise);
    TraceRecord r;
    r.step = c;
    r.entropy = von_neumann_entropy(reg);
    r.information = reg.num_qubits() - r.entropy;
    r.logical_fidelity = logical_fidelity(reg.rho(), reg.num_qubits(), rp.basis, in.logical);
    trace.push_back(std::move(r));
  }
  return trace;
}

struct StorageStats {
  double worst_distance = 0;
  std::uint64_t drawn = 0;
  std::uint64_t stored = 0;  // draws that came out of the storage house
};

inline std::vector<TraceRecord> run_factorized(const ResolvedProtocol& rp, const SuperOp& channel, const ProtocolInput& in,
                                               StorageStats& stats) {
  struct Stored {
    Vec3 bloch;
    std::uint64_t entered;
  };
  const auto& cfg = rp.cfg;
  const int r = cfg.r_block;
  const std::uint64_t cs = static_cast<std::uint64_t>(rp.cycle_steps);
  const std::uint64_t T = cfg.storage_T;
  // Enough qubits at P to cover the first T steps plus one cycle.
  std::uint64_t pristine = 2 * static_cast<std::uint64_t>(r) * ((T + cs - 1) / cs + 1);
  std::deque<Stored> fifo;
  const CMat p_state = bloch_to_density(rp.fixed_point);

  auto dequeue = [&](std::uint64_t now) -> CMat {
    ++stats.drawn;
    if (pristine > 0) {
      --pristine;
      return p_state;
    }
    if (fifo.empty() || now - fifo.front().entered < T) throw Error(ErrorKind::NotConverged, "storage house ran dry");
    const Stored s = fifo.front();
    fifo.pop_front();
    ++stats.stored;
    const Vec3 w = power(channel, now - s.entered).apply(s.bloch);
    stats.worst_distance = std::max(stats.worst_distance, trace_norm(bloch_to_density(w) - p_state));
    return bloch_to_density(w);
  };

  QRegister reg = QRegister::data(encoded_memory(rp.basis, in.logical, {basis_state(1, 0), basis_state(1, 0)}));
  const auto cycle = repetition_cycle(rp.basis);
  const NoiseLayer noise{channel};
  const std::vector<int> block = all_qubits(r);
  std::vector<TraceRecord> trace;

  for (int c = 1; c <= cfg.d_prime; ++c) {
    const std::uint64_t now = static_cast<std::uint64_t>(c - 1) * cs;
    std::vector<CMat> resets;
    for (int k = 0; k < 2; ++k) {
      std::vector<CMat> parts;
      for (int j = 0; j < r; ++j) parts.push_back(dequeue(now));
      const CMat out = apply_fridge(product(parts), r, rp.fridge, channel, block);
      const int first[1] = {0};
      resets.push_back(partial_trace(out, r, first));
      for (int j = 1; j < r; ++j) {
        const int w[1] = {j};
        fifo.push_back({density_to_bloch(partial_trace(out, r, w)), now});
      }
    }
    const int data[3] = {0, 1, 2};
    const CMat mem = reduced(reg, data);
    const std::vector<CMat> fresh{mem, resets[0], resets[1]};
    reg = QRegister::data(product(fresh));
    for (const auto& l : cycle) reg = step(reg, l, noise);
    for (int a = 3; a <= 4; ++a) {
      const int keep[1] = {a};
      fifo.push_back({density_to_bloch(reduced(reg, keep)), static_cast<std::uint64_t>(c) * cs});
    }
    TraceRecord rec;
    rec.step = c;
    rec.entropy = von_neumann_entropy(reg);
    rec.information = reg.num_qubits() - rec.entropy;
    rec.logical_fidelity = logical_fidelity(reg.rho(), reg.num_qubits(), rp.basis, in.logical);
    trace.push_back(std::move(rec));
  }
  return trace;
}

inline std::vector<TraceRecord> run_exact(const ResolvedProtocol& rp, const SuperOp& channel, const ProtocolInput& in,
                                          StorageStats& stats) {
  const auto& cfg = rp.cfg;
  const int r = cfg.r_block;
  const int n = 5 + 2 * (r - 1);
  const CMat p_state = bloch_to_density(rp.fixed_point);
  std::vector<CMat> tail(static_cast<std::size_t>(n - 3), p_state);
  CMat rho = encoded_memory(rp.basis, in.logical, tail);

  // Block k: the ancilla slot 3 + k followed by its R - 1 waste slots.
  std::vector<std::vector<int>> blocks(2);
  std::vector<int> stored;
  for (int k = 0; k < 2; ++k) {
    blocks[static_cast<std::size_t>(k)].push_back(3 + k);
    for (int j = 0; j < r - 1; ++j) blocks[static_cast<std::size_t>(k)].push_back(5 + k * (r - 1) + j);
    stored.insert(stored.end(), blocks[static_cast<std::size_t>(k)].begin(), blocks[static_cast<std::size_t>(k)].end());
  }
  const SuperOp wait = power(channel, cfg.storage_T);
  const auto cycle = repetition_cycle(rp.basis);
  std::vector<TraceRecord> trace;

  for (int c = 1; c <= cfg.d_prime; ++c) {
    if (c > 1)
      for (int q : stored) rho = apply_channel(rho, n, wait, q);
    for (int q : stored) {
      const int keep[1] = {q};
      stats.worst_distance = std::max(stats.worst_distance, trace_norm(partial_trace(rho, n, keep) - p_state));
      ++stats.drawn;
      if (c > 1) ++stats.stored;
    }
    for (const auto& b : blocks) rho = apply_fridge(std::move(rho), n, rp.fridge, channel, b);
    for (const auto& l : cycle) {
      validate_layer(l, n);
      for (const Gate& g : l.gates) rho = apply_unitary(rho, n, g.u, g.targets);
      for (int q = 0; q < 5; ++q) rho = apply_channel(rho, n, channel, q);
    }
    QRegister(rho, std::vector<QubitRole>(static_cast<std::size_t>(n), QubitRole::Data)).check_invariants();
    const int comp[5] = {0, 1, 2, 3, 4};
    TraceRecord rec;
    rec.step = c;
    rec.entropy = entropy_bits(partial_trace(rho, n, comp));
    rec.information = 5 - rec.entropy;
    rec.logical_fidelity = logical_fidelity(rho, n, rp.basis, in.logical);
    trace.push_back(std::move(rec));
  }
  return trace;
}

}  // namespace detail

inline ExperimentResult run_refrigerator_protocol(const ProtocolConfig& config, const SuperOp& channel,
                                                  const ProtocolInput& in = {}) {
  if (std::abs(in.logical.norm() - 1) > 1e-10) throw Error(ErrorKind::InvalidArgument, "logical state must be normalised");
  ResolvedProtocol rp = resolve_protocol(config, channel, in.distance);
  ExperimentResult res;
  res.name = "fridge_protocol";
  detail::StorageStats stats;
  res.trace = rp.cfg.mode == SimMode::Exact ? detail::run_exact(rp, channel, in, stats)
                                            : detail::run_factorized(rp, channel, in, stats);
  res.baseline = detail::run_stale(rp, channel, in);
  rp.cfg.m_throughput = stats.drawn;

  const auto& cfg = rp.cfg;
  const double fridge_final = *res.trace.back().logical_fidelity;
  const double stale_final = *res.baseline.back().logical_fidelity;
  const std::uint64_t m_bound = static_cast<std::uint64_t>(cfg.n_prime) * cfg.r_block * cfg.d_prime;
  res.summary["r_block"] = cfg.r_block;
  res.summary["f_count"] = cfg.f_count;
  res.summary["storage_T"] = static_cast<double>(cfg.storage_T);
  res.summary["storage_target"] = rp.storage_target;
  res.summary["bias_q"] = rp.fridge.q;
  res.summary["cycle_steps"] = rp.cycle_steps;
  res.summary["m_throughput"] = static_cast<double>(stats.drawn);
  res.summary["m_bound"] = static_cast<double>(m_bound);
  res.summary["storage_dequeues"] = static_cast<double>(stats.stored);
  res.summary["worst_dequeue_distance"] = stats.worst_distance;
  res.summary["final_logical_fidelity"] = fridge_final;
  res.summary["stale_final_logical_fidelity"] = stale_final;
  res.summary["margin_vs_stale"] = fridge_final - stale_final;
  res.notes.push_back(fmt::format("mode {}, {} code", to_string(cfg.mode),
                                  rp.basis == RepetitionBasis::BitFlip ? "bit-flip" : "phase-flip"));

  res.check("storage_dequeue", stats.worst_distance < rp.storage_target,
            fmt::format("worst {:.3g}, target {:.3g}", stats.worst_distance, rp.storage_target));
  res.check("throughput", stats.drawn <= m_bound, fmt::format("M = {} <= n'RD' = {}", stats.drawn, m_bound));
  res.check("refrigerated_vs_stale", fridge_final >= stale_final - 1e-12,
            fmt::format("final {:.6f} vs stale {:.6f}", fridge_final, stale_final));
  return res;
}

}  // namespace ancilla
