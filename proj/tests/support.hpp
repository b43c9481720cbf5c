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

#include <gtest/gtest.h>

#include "ancilla/channel.hpp"

namespace ancilla::testing {

inline Mat3 random_rotation(Rng& rng) { return rotation_of(haar_unitary(2, rng)); }

template <typename Derived>
double max_abs(const Eigen::MatrixBase<Derived>& m) {
  return m.cwiseAbs().maxCoeff();
}

/// Unital channel U diag(l) V with random proper rotations.
inline SuperOp dressed(const Vec3& shift, const Vec3& lambda, const Mat3& u, const Mat3& v) {
  return SuperOp::from_affine(u * shift, u * lambda.asDiagonal() * v);
}

}  // namespace ancilla::testing
