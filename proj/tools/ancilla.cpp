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

// ancilla: classify channels, size refrigerators, run experiments.
//
// Exit codes: 0 ok, 1 internal error, 2 input error, 3 channel not CP,
// 4 no cooling possible, 5 an experiment assertion failed.

#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "ancilla/classify.hpp"
#include "ancilla/fridge.hpp"
#include "ancilla/io.hpp"

namespace {

using ancilla::io::json;
namespace fs = std::filesystem;

enum Exit : int { kOk = 0, kInternal = 1, kInput = 2, kNotCp = 3, kNoCooling = 4, kAssertion = 5 };

json vec(const ancilla::Vec3& v) { return json::array({v(0), v(1), v(2)}); }

json mat(const ancilla::Mat3& m) {
  json rows = json::array();
  for (int r = 0; r < 3; ++r) rows.push_back(vec(m.row(r).transpose()));
  return rows;
}

void print(const json& j) { std::cout << j.dump(2) << "\n"; }

// classify -------------------------------------------------------------------

struct ClassifyArgs {
  std::string channel_path;
  double tol = 1e-8;
  bool relaxation = true;
};

int cmd_classify(const ClassifyArgs& a) {
  using namespace ancilla;
  const SuperOp c = io::parse_channel(io::load_json(a.channel_path));
  const CanonicalForm f = canonical_form(c);
  const bool cp = choi_positive(c);

  json rep;
  rep["cp"] = cp;
  rep["cp_check"] = cp_check(f);
  rep["t"] = vec(f.t);
  rep["lambda"] = vec(f.lambda);
  rep["canonical_form"] = {{"t", vec(f.t)}, {"lambda", vec(f.lambda)}, {"pre_rot", mat(f.pre_rot)}, {"post_rot", mat(f.post_rot)}};
  rep["unital"] = is_unital(c);
  if (is_unital(c)) {
    try {
      const PauliChannelParams p = pauli_probs(f);
      rep["pauli_probs"] = {{"p_x", p.p_x}, {"p_y", p.p_y}, {"p_z", p.p_z}};
    } catch (const Error& e) {
      rep["pauli_probs"] = nullptr;
    }
  }
  try {
    const ChannelClass cls = classify(c, a.tol);
    rep["class"] = to_string(cls.kind);
    if (cls.kind == ClassKind::Dephasing) rep["axis"] = vec(cls.axis);
    if (cls.kind != ClassKind::Dephasing) rep["fixed_point"] = vec(cls.fixed_point);
    rep["entropy_behavior"] = to_string(entropy_behavior(c, 1000));
    if (a.relaxation && cls.kind != ClassKind::Dephasing) {
      RelaxationProfile prof(c);
      json table = json::array();
      for (double target : {1e-1, 1e-2, 1e-3, 1e-4, 1e-5, 1e-6}) {
        const RelaxationReport r = prof.time_to(target);
        table.push_back({{"target", target}, {"steps", r.steps}, {"achieved_distance", r.achieved_distance}});
      }
      rep["relaxation_table"] = table;
    }
  } catch (const Error& e) {
    if (cp) throw;
    rep["class"] = nullptr;
    rep["classification_error"] = e.what();
  }
  print(rep);
  if (!cp) {
    std::cerr << "ancilla: channel is not completely positive\n";
    return kNotCp;
  }
  return kOk;
}

// fridge ---------------------------------------------------------------------

struct FridgeArgs {
  double q = 0;
  std::optional<double> eps2;
  std::optional<int> R;
  std::string noise_path;
};

json report_json(const ancilla::CoolingReport& r) {
  json j{{"reset_population", r.reset_state(0, 0).real()},
         {"reset_distance", r.reset_distance},
         {"waste_entropy", r.waste_entropy},
         {"mode", r.mode == ancilla::FridgeMode::Ideal ? "ideal" : "noisy"}};
  if (r.mode == ancilla::FridgeMode::Noisy) {
    j["location_distance"] = r.location_distance;
    j["bound"] = r.bound;
    j["within_bound"] = r.within_bound;
  }
  return j;
}

int cmd_fridge(const FridgeArgs& a) {
  using namespace ancilla;
  if (a.eps2.has_value() == a.R.has_value()) throw Error(ErrorKind::Parse, "give exactly one of --eps2 or --R");
  if (a.q < 0) throw Error(ErrorKind::InvalidArgument, "q must be >= 0");
  if (a.q >= 0.5) {
    std::cerr << "ancilla: no cooling possible: q >= 1/2 means the fixed point is not biased\n";
    return kNoCooling;
  }
  std::optional<SuperOp> noise;
  if (!a.noise_path.empty()) noise = io::parse_channel(io::load_json(a.noise_path));

  const int r = a.R ? *a.R : choose_R(a.q, *a.eps2);
  const FridgeSpec spec = build_cooling_circuit(a.q, r);
  const CMat input = fixed_point_product(spec);
  const CoolingReport ideal = run_fridge_ideal(spec, input);

  json rep{{"q", a.q},
           {"R", spec.R},
           {"F", spec.F},
           {"stages", spec.stages.size()},
           {"top_mass", top_mass(a.q, spec.R)},
           {"reset_population", ideal.reset_state(0, 0).real()},
           {"reset_distance", ideal.reset_distance},
           {"ideal", report_json(ideal)}};
  if (a.eps2) rep["eps2"] = *a.eps2;
  int code = kOk;
  if (noise) {
    const CoolingReport noisy = run_fridge_noisy(spec, *noise, input);
    rep["noisy"] = report_json(noisy);
    if (!noisy.within_bound) code = kAssertion;
  }
  print(rep);
  return code;
}

// experiment -----------------------------------------------------------------

struct ExperimentArgs {
  std::string name;
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::string out = "out";
  std::string mode;
  std::string sim;
};

int cmd_experiment(const ExperimentArgs& a, const std::string& command_line) {
  using namespace ancilla;
  const auto& names = io::experiment_names();
  if (std::find(names.begin(), names.end(), a.name) == names.end())
    throw Error(ErrorKind::Parse, "unknown experiment '" + a.name + "'");

  json cfg = a.config_path.empty() ? json::object() : io::load_json(a.config_path);
  if (!cfg.is_object()) throw Error(ErrorKind::Parse, "config must be a JSON object");
  if (a.seed) cfg["seed"] = *a.seed;
  if (!a.mode.empty()) {
    if (a.name != "epr_storage" && a.name != "bounds") throw Error(ErrorKind::Parse, "--mode applies to epr_storage and bounds");
    parse_constant_mode(a.mode);
    cfg["mode"] = a.mode;
  }
  if (!a.sim.empty()) {
    if (a.name != "fridge_protocol") throw Error(ErrorKind::Parse, "--sim applies to fridge_protocol");
    parse_sim_mode(a.sim);
    cfg["sim"] = a.sim;
  }

  const auto t0 = std::chrono::steady_clock::now();
  const ExperimentResult res = io::run_experiment(a.name, cfg);
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

  const fs::path out(a.out);
  fs::create_directories(out);
  io::write_atomic(out / "trace.jsonl", io::trace_jsonl(res.trace));
  io::write_atomic(out / "trace.csv", io::trace_csv(res.trace));
  if (!res.baseline.empty()) {
    io::write_atomic(out / "baseline.jsonl", io::trace_jsonl(res.baseline));
    io::write_atomic(out / "baseline.csv", io::trace_csv(res.baseline));
  }
  io::write_atomic(out / "summary.csv", io::summary_csv(res));
  io::write_atomic(out / "checks.json", io::checks_json(res).dump(2) + "\n");

  io::RunManifest m;
  m.command = command_line;
  m.config_path = a.config_path;
  m.config = cfg;
  m.seed = cfg.value("seed", std::uint64_t{0});
  m.out_dir = a.out;
  m.tool_version = ANCILLA_VERSION;
  m.duration_seconds = secs;
  json mj = io::to_json(m);
  mj["experiment"] = a.name;
  mj["notes"] = res.notes;
  if (const char* th = std::getenv("ANCILLA_THREADS")) mj["threads"] = th;
  io::write_atomic(out / "manifest.json", mj.dump(2) + "\n");

  for (const auto& c : res.checks)
    std::cout << fmt::format("{:<4} {}{}\n", c.ok ? "ok" : "FAIL", c.name, c.detail.empty() ? "" : "  (" + c.detail + ")");
  if (!res.ok()) {
    std::cerr << "ancilla: experiment assertions failed\n";
    return kAssertion;
  }
  return kOk;
}

// simulate -------------------------------------------------------------------

struct SimulateArgs {
  std::string circuit_path;
  std::string noise_path;
  int qubits = 1;
};

/// Runs a circuit from |0...0> and prints one JSON line per layer.
int cmd_simulate(const SimulateArgs& a) {
  using namespace ancilla;
  if (a.qubits < 1 || a.qubits > 12) throw Error(ErrorKind::InvalidArgument, "--qubits must lie in 1..12");
  const auto layers = io::parse_circuit(io::load_json(a.circuit_path));
  const SuperOp noise = a.noise_path.empty() ? SuperOp::identity() : io::parse_channel(io::load_json(a.noise_path));
  QRegister reg = QRegister::data(basis_state(a.qubits, 0));
  std::vector<TraceRecord> trace;
  auto record = [&](int t) {
    TraceRecord r;
    r.step = t;
    r.entropy = von_neumann_entropy(reg);
    r.information = information(reg);
    trace.push_back(r);
  };
  record(0);
  for (std::size_t i = 0; i < layers.size(); ++i) {
    reg = step(reg, layers[i], NoiseLayer{noise});
    record(static_cast<int>(i + 1));
  }
  std::cout << io::trace_jsonl(trace);
  return kOk;
}

std::string join_args(int argc, char** argv) {
  std::string s;
  for (int i = 0; i < argc; ++i) s += (i ? " " : "") + std::string(argv[i]);
  return s;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Qubit channel classification, algorithmic cooling and noisy-memory experiments", "ancilla"};
  app.set_version_flag("--version", std::string(ANCILLA_VERSION));
  app.require_subcommand(1);

  ClassifyArgs ca;
  auto* classify_cmd = app.add_subcommand("classify", "Classify a single-qubit channel and print a JSON report");
  classify_cmd->add_option("channel", ca.channel_path, "Channel JSON file")->required();
  classify_cmd->add_option("--tol", ca.tol, "Classification tolerance")->capture_default_str();
  classify_cmd->add_flag("!--no-relaxation", ca.relaxation, "Skip the relaxation table");

  FridgeArgs fa;
  auto* fridge_cmd = app.add_subcommand("fridge", "Size and run the cooling circuit for a fixed-point bias");
  fridge_cmd->add_option("--q", fa.q, "Bias: population of the less likely basis state")->required();
  fridge_cmd->add_option("--eps2", fa.eps2, "Target 1-norm distance of the reset qubit from |0>");
  fridge_cmd->add_option("--R", fa.R, "Block size")->check(CLI::Range(1, ancilla::kMaxFridgeBlock));
  fridge_cmd->add_option("--noise", fa.noise_path, "Channel JSON applied after every stage");

  ExperimentArgs ea;
  auto* exp_cmd = app.add_subcommand("experiment", "Run an experiment and write traces to --out");
  exp_cmd->add_option("name", ea.name, "depol_decay | stockpile | epr_storage | fridge_protocol | bounds")->required();
  exp_cmd->add_option("--config", ea.config_path, "Experiment config JSON");
  exp_cmd->add_option("--seed", ea.seed, "Overrides the config seed");
  exp_cmd->add_option("--out", ea.out, "Output directory")->capture_default_str();
  exp_cmd->add_option("--mode", ea.mode, "Concavity constant: paper | safe");
  exp_cmd->add_option("--sim", ea.sim, "Protocol simulation: exact | factorized");

  SimulateArgs sa;
  auto* sim_cmd = app.add_subcommand("simulate", "Run a circuit file under per-qubit noise");
  sim_cmd->add_option("--circuit", sa.circuit_path, "Circuit JSON file")->required();
  sim_cmd->add_option("--noise", sa.noise_path, "Channel JSON file (default: no noise)");
  sim_cmd->add_option("--qubits", sa.qubits, "Register size")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kInput;
  }

  try {
    if (*classify_cmd) return cmd_classify(ca);
    if (*fridge_cmd) return cmd_fridge(fa);
    if (*exp_cmd) return cmd_experiment(ea, join_args(argc, argv));
    if (*sim_cmd) return cmd_simulate(sa);
  } catch (const ancilla::Error& e) {
    std::cerr << "ancilla: " << e.what() << "\n";
    if (e.kind() == ancilla::ErrorKind::Unreachable) return kNoCooling;
    if (e.kind() == ancilla::ErrorKind::NotConverged) return kInternal;
    return kInput;
  } catch (const std::exception& e) {
    std::cerr << "ancilla: internal error: " << e.what() << "\n";
    return kInternal;
  }
  return kInternal;
}
