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

#include <algorithm>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace ancilla {

/// One row of experiment telemetry.
struct TraceRecord {
  int step = 0;
  double entropy = 0;      // bits, non-reference qubits
  double information = 0;  // bits, n - entropy
  std::optional<double> epr_fidelity;
  std::vector<double> gaps;  // per-qubit conditional-entropy gaps, when computed
  std::optional<double> logical_fidelity;
  double max_gap = 0;
};

/// A named runtime assertion. Experiments record failures instead of
/// throwing so the trace is still written.
struct Check {
  std::string name;
  bool ok = true;
  std::string detail;
};

struct ExperimentResult {
  std::string name;
  std::vector<TraceRecord> trace;
  std::vector<TraceRecord> baseline;  // comparison series, if the experiment has one
  std::vector<Check> checks;
  std::map<std::string, double> summary;
  std::vector<std::string> notes;

  bool ok() const {
    return std::all_of(checks.begin(), checks.end(), [](const Check& c) { return c.ok; });
  }
  void check(std::string check_name, bool ok, std::string detail = {}) {
    checks.push_back({std::move(check_name), ok, std::move(detail)});
  }
};

}  // namespace ancilla
