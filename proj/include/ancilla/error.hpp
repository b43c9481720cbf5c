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

#include <stdexcept>
#include <string>

namespace ancilla {

enum class ErrorKind {
  InvalidArgument,
  NotTracePreserving,
  NonContractive,
  UnitaryChannel,
  Ambiguous,
  Unreachable,
  DimensionMismatch,
  OverlappingTargets,
  MissingReference,
  NotConverged,
  SizeOverflow,
  NotPositive,
  Parse,
};

inline const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::InvalidArgument: return "invalid argument";
    case ErrorKind::NotTracePreserving: return "not trace preserving";
    case ErrorKind::NonContractive: return "non-contractive axis";
    case ErrorKind::UnitaryChannel: return "unitary channel";
    case ErrorKind::Ambiguous: return "ambiguous";
    case ErrorKind::Unreachable: return "unreachable";
    case ErrorKind::DimensionMismatch: return "dimension mismatch";
    case ErrorKind::OverlappingTargets: return "overlapping gate targets";
    case ErrorKind::MissingReference: return "missing reference";
    case ErrorKind::NotConverged: return "not converged";
    case ErrorKind::SizeOverflow: return "size overflow";
    case ErrorKind::NotPositive: return "not positive";
    case ErrorKind::Parse: return "parse error";
  }
  return "unknown";
}

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace ancilla
