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

/// File formats: channel and circuit JSON in, JSONL / CSV / manifest out.
/// Numbers are written so that they parse back to the identical double.

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <fmt/format.h>
#include <unistd.h>

#include "ancilla/channel.hpp"
#include "ancilla/densim.hpp"
#include "ancilla/experiments.hpp"
#include "json.hpp"

namespace ancilla::io {

using json = nlohmann::json;

inline json parse_json(const std::string& text, const std::string& what) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw Error(ErrorKind::Parse, what + ": " + e.what());
  }
}

inline std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::Parse, "cannot read '" + path.string() + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline json load_json(const std::filesystem::path& path) { return parse_json(read_file(path), path.string()); }

/// Rejects keys outside `allowed` so that typos do not silently fall back
/// to defaults.
inline void expect_keys(const json& j, std::initializer_list<const char*> allowed, const std::string& where) {
  if (!j.is_object()) throw Error(ErrorKind::Parse, where + ": expected a JSON object");
  const std::set<std::string> ok(allowed.begin(), allowed.end());
  for (const auto& [k, v] : j.items())
    if (!ok.count(k)) throw Error(ErrorKind::Parse, where + ": unknown key '" + k + "'");
}

template <typename T>
T get_or(const json& j, const char* key, T fallback) {
  if (!j.contains(key)) return fallback;
  try {
    return j.at(key).get<T>();
  } catch (const json::exception& e) {
    throw Error(ErrorKind::Parse, std::string("field '") + key + "': " + e.what());
  }
}

inline cplx parse_complex(const json& v) {
  if (v.is_number()) return {v.get<double>(), 0.0};
  if (v.is_array() && v.size() == 2 && v[0].is_number() && v[1].is_number()) return {v[0].get<double>(), v[1].get<double>()};
  throw Error(ErrorKind::Parse, "complex entries must be numbers or [re, im] pairs");
}

inline CMat parse_matrix(const json& rows) {
  if (!rows.is_array() || rows.empty()) throw Error(ErrorKind::Parse, "matrix must be a non-empty list of rows");
  const auto n = static_cast<Eigen::Index>(rows.size());
  CMat m(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const json& row = rows[static_cast<std::size_t>(i)];
    if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != n) throw Error(ErrorKind::Parse, "matrix must be square");
    for (Eigen::Index k = 0; k < n; ++k) m(i, k) = parse_complex(row[static_cast<std::size_t>(k)]);
  }
  return m;
}

/// {"kraus": [matrix, ...]}, {"ptm": 4x4} or {"named": name, "p": .., ...}.
inline SuperOp parse_channel(const json& j) {
  if (!j.is_object()) throw Error(ErrorKind::Parse, "channel must be a JSON object");
  if (j.contains("kraus")) {
    expect_keys(j, {"kraus"}, "channel");
    KrausSet k;
    if (!j.at("kraus").is_array()) throw Error(ErrorKind::Parse, "'kraus' must be a list of matrices");
    for (const auto& op : j.at("kraus")) {
      const CMat m = parse_matrix(op);
      if (m.rows() != 2) throw Error(ErrorKind::Parse, "Kraus operators must be 2x2");
      k.ops.push_back(m);
    }
    if (k.ops.empty()) throw Error(ErrorKind::Parse, "empty Kraus list");
    return kraus_to_superop(k);
  }
  if (j.contains("ptm")) {
    expect_keys(j, {"ptm"}, "channel");
    const json& rows = j.at("ptm");
    if (!rows.is_array() || rows.size() != 4) throw Error(ErrorKind::Parse, "ptm must be 4x4");
    Mat4r m;
    for (int r = 0; r < 4; ++r) {
      if (!rows[static_cast<std::size_t>(r)].is_array() || rows[static_cast<std::size_t>(r)].size() != 4)
        throw Error(ErrorKind::Parse, "ptm must be 4x4");
      for (int c = 0; c < 4; ++c) {
        const json& v = rows[static_cast<std::size_t>(r)][static_cast<std::size_t>(c)];
        if (!v.is_number()) throw Error(ErrorKind::Parse, "ptm entries must be real numbers");
        m(r, c) = v.get<double>();
      }
    }
    return SuperOp(m);
  }
  if (j.contains("named")) {
    expect_keys(j, {"named", "p", "q", "px", "py", "pz"}, "channel");
    const auto name = get_or<std::string>(j, "named", "");
    const double p = get_or(j, "p", 0.0);
    auto in_unit = [](double x) {
      if (!(x >= 0 && x <= 1)) throw Error(ErrorKind::InvalidArgument, "channel parameters must lie in [0, 1]");
      return x;
    };
    if (name == "depolarizing") return channels::depolarizing(in_unit(p));
    if (name == "dephasing") return channels::dephasing(in_unit(p));
    if (name == "amplitude_damping") return channels::amplitude_damping(in_unit(p));
    if (name == "generalized_amplitude_damping")
      return channels::generalized_amplitude_damping(in_unit(p), in_unit(get_or(j, "q", 0.0)));
    if (name == "pauli")
      return channels::pauli_channel(in_unit(get_or(j, "px", 0.0)), in_unit(get_or(j, "py", 0.0)), in_unit(get_or(j, "pz", 0.0)));
    if (name == "identity") return SuperOp::identity();
    throw Error(ErrorKind::Parse, "unknown channel name '" + name + "'");
  }
  throw Error(ErrorKind::Parse, "channel needs one of 'kraus', 'ptm' or 'named'");
}

namespace detail {

inline const json& field(const json& j, const char* key, const std::string& where) {
  if (!j.is_object() || !j.contains(key)) throw Error(ErrorKind::Parse, where + ": missing '" + key + "'");
  return j.at(key);
}

}  // namespace detail

/// A list of layers, or {"layers": [...]}; each layer {"gates": [...],
/// "mode": "protocol"|"adversary"}.
inline std::vector<GateLayer> parse_circuit(const json& j) {
  if (j.is_object()) expect_keys(j, {"layers"}, "circuit");
  const json& layers = j.is_object() ? detail::field(j, "layers", "circuit") : j;
  if (!layers.is_array()) throw Error(ErrorKind::Parse, "circuit must be a list of layers");
  std::vector<GateLayer> out;
  for (const auto& l : layers) {
    expect_keys(l, {"gates", "mode"}, "layer");
    GateLayer layer;
    const auto mode = get_or<std::string>(l, "mode", "adversary");
    if (mode == "protocol") {
      layer.mode = LayerMode::Protocol;
    } else if (mode != "adversary") {
      throw Error(ErrorKind::Parse, "layer mode must be 'protocol' or 'adversary'");
    }
    const json& gs = detail::field(l, "gates", "layer");
    if (!gs.is_array()) throw Error(ErrorKind::Parse, "layer: 'gates' must be a list");
    for (const auto& g : gs) {
      expect_keys(g, {"u", "targets"}, "gate");
      Gate gate;
      const json& u = detail::field(g, "u", "gate");
      gate.u = u.is_string() ? gates::named(u.get<std::string>()) : parse_matrix(u);
      gate.targets = get_or<std::vector<int>>(g, "targets", {});
      layer.gates.push_back(std::move(gate));
    }
    out.push_back(std::move(layer));
  }
  return out;
}

// Output ---------------------------------------------------------------------

/// %.17g: always enough digits to recover the double.
inline std::string num(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  return fmt::format("{:.17g}", x);
}

/// Non-finite values become null (JSON has no NaN or infinity).
inline json finite_or_null(double x) { return std::isfinite(x) ? json(x) : json(nullptr); }

inline json to_json(const TraceRecord& r) {
  json j;
  j["step"] = r.step;
  j["entropy_bits"] = finite_or_null(r.entropy);
  j["information_bits"] = finite_or_null(r.information);
  j["epr_fidelity"] = r.epr_fidelity ? finite_or_null(*r.epr_fidelity) : json(nullptr);
  j["logical_fidelity"] = r.logical_fidelity ? finite_or_null(*r.logical_fidelity) : json(nullptr);
  j["gaps"] = json::array();
  for (double g : r.gaps) j["gaps"].push_back(finite_or_null(g));
  j["max_gap"] = finite_or_null(r.max_gap);
  return j;
}

inline std::string trace_jsonl(const std::vector<TraceRecord>& trace) {
  std::string out;
  for (const auto& r : trace) out += to_json(r).dump() + "\n";
  return out;
}

inline const char* kTraceCsvHeader = "step,entropy_bits,information_bits,epr_fidelity,logical_fidelity,max_gap";

inline std::string trace_csv(const std::vector<TraceRecord>& trace) {
  std::string out = std::string(kTraceCsvHeader) + "\n";
  for (const auto& r : trace) {
    out += fmt::format("{},{},{},{},{},{}\n", r.step, num(r.entropy), num(r.information),
                       r.epr_fidelity ? num(*r.epr_fidelity) : "", r.logical_fidelity ? num(*r.logical_fidelity) : "",
                       num(r.max_gap));
  }
  return out;
}

inline std::string summary_csv(const ExperimentResult& res) {
  std::string out = "metric,value\n";
  for (const auto& [k, v] : res.summary) out += k + "," + num(v) + "\n";
  return out;
}

inline json checks_json(const ExperimentResult& res) {
  json j = json::array();
  for (const auto& c : res.checks) j.push_back({{"name", c.name}, {"ok", c.ok}, {"detail", c.detail}});
  return j;
}

struct RunManifest {
  std::string command;
  std::string config_path;
  json config;  // the document actually consumed, after overrides
  std::uint64_t seed = 0;
  std::string out_dir;
  std::string tool_version;
  double duration_seconds = 0;
};

inline json to_json(const RunManifest& m) {
  return {{"command", m.command},        {"config_path", m.config_path}, {"config", m.config},
          {"seed", m.seed},              {"out_dir", m.out_dir},         {"tool_version", m.tool_version},
          {"duration_seconds", m.duration_seconds}};
}

/// Write-then-rename so readers never see a partial file.
inline void write_atomic(const std::filesystem::path& path, const std::string& content) {
  const auto tmp = path.string() + fmt::format(".tmp.{}", static_cast<long>(::getpid()));
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorKind::Parse, "cannot write '" + tmp + "'");
    out << content;
    out.flush();
    if (!out) throw Error(ErrorKind::Parse, "short write to '" + tmp + "'");
  }
  std::filesystem::rename(tmp, path);
}

// Experiment configs ---------------------------------------------------------

inline const std::vector<std::string>& experiment_names() {
  static const std::vector<std::string> names{"depol_decay", "stockpile", "epr_storage", "fridge_protocol", "bounds"};
  return names;
}

/// Parses `cfg` for experiment `name` (unknown keys are errors) and runs it.
/// Missing keys take the library defaults.
inline ExperimentResult run_experiment(const std::string& name, const json& cfg) {
  const json j = cfg.is_null() ? json::object() : cfg;
  if (name == "depol_decay") {
    expect_keys(j, {"n", "steps", "policy", "seed", "maximally_mixed_start", "channel"}, name);
    DecayConfig c;
    c.n = get_or(j, "n", c.n);
    c.steps = get_or(j, "steps", c.steps);
    c.policy = parse_policy(get_or<std::string>(j, "policy", "random_circuit"));
    c.seed = get_or(j, "seed", c.seed);
    c.maximally_mixed_start = get_or(j, "maximally_mixed_start", c.maximally_mixed_start);
    if (j.contains("channel")) c.channel = parse_channel(j.at("channel"));
    return run_depolarizing_decay(c);
  }
  if (name == "stockpile") {
    expect_keys(j, {"a_exp", "b_exp", "n", "p", "ancillas_per_step", "step_cap", "seed", "record_entropy"}, name);
    StockpileConfig c;
    c.a_exp = get_or(j, "a_exp", c.a_exp);
    c.b_exp = get_or(j, "b_exp", c.b_exp);
    c.n = get_or(j, "n", c.n);
    c.p = get_or(j, "p", c.p);
    c.ancillas_per_step = get_or(j, "ancillas_per_step", c.ancillas_per_step);
    c.step_cap = get_or(j, "step_cap", c.step_cap);
    c.seed = get_or(j, "seed", c.seed);
    c.record_entropy = get_or(j, "record_entropy", c.record_entropy);
    return run_stockpile(c);
  }
  if (name == "epr_storage") {
    expect_keys(j, {"code", "p", "steps", "seed", "correct_every", "eps", "mode", "ledger_orderings"}, name);
    EprStorageConfig c;
    c.code = parse_storage_code(get_or<std::string>(j, "code", "none"));
    c.p = get_or(j, "p", c.p);
    c.steps = get_or(j, "steps", c.steps);
    c.seed = get_or(j, "seed", c.seed);
    c.correct_every = get_or(j, "correct_every", c.correct_every);
    c.eps = get_or(j, "eps", c.eps);
    c.mode = parse_constant_mode(get_or<std::string>(j, "mode", "safe"));
    c.ledger_orderings = get_or(j, "ledger_orderings", c.ledger_orderings);
    return run_epr_storage(c);
  }
  if (name == "fridge_protocol") {
    expect_keys(j, {"d_prime", "storage_T", "r_block", "eps0", "eps1", "eps2", "sim", "channel", "logical", "seed"}, name);
    ProtocolConfig c;
    c.d_prime = get_or(j, "d_prime", c.d_prime);
    c.storage_T = get_or(j, "storage_T", c.storage_T);
    c.r_block = get_or(j, "r_block", c.r_block);
    c.eps0 = get_or(j, "eps0", c.eps0);
    c.eps1 = get_or(j, "eps1", c.eps1);
    c.eps2 = get_or(j, "eps2", c.eps2);
    c.mode = parse_sim_mode(get_or<std::string>(j, "sim", "factorized"));
    ProtocolInput in;
    in.seed = get_or(j, "seed", in.seed);
    if (j.contains("logical")) {
      const json& l = j.at("logical");
      if (!l.is_array() || l.size() != 2) throw Error(ErrorKind::Parse, "logical must be a 2-entry amplitude list");
      in.logical = Eigen::Vector2cd(parse_complex(l[0]), parse_complex(l[1]));
    }
    const SuperOp ch = j.contains("channel") ? parse_channel(j.at("channel")) : channels::amplitude_damping(0.01);
    return run_refrigerator_protocol(c, ch, in);
  }
  if (name == "bounds") {
    expect_keys(j, {"trials", "max_dim", "mode", "seed", "p", "eps"}, name);
    BoundsConfig c;
    c.trials = get_or(j, "trials", c.trials);
    c.max_dim = get_or(j, "max_dim", c.max_dim);
    c.mode = parse_constant_mode(get_or<std::string>(j, "mode", "safe"));
    c.seed = get_or(j, "seed", c.seed);
    c.p = get_or(j, "p", c.p);
    c.eps = get_or(j, "eps", c.eps);
    return run_bounds(c);
  }
  throw Error(ErrorKind::Parse, "unknown experiment '" + name + "'");
}

}  // namespace ancilla::io
