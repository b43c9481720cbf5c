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

/// Three-way classification of non-unitary qubit channels by what repeated
/// application converges to: the center of the Bloch ball (depolarizing
/// class), a diameter (dephasing class), or an off-center point (non-unital
/// class). Axes are classified by |lambda|, so a dephasing channel followed
/// by a pi rotation still reports its diameter.

#include <cstdint>
#include <limits>
#include <map>
#include <string>
#include <vector>

#include "ancilla/channel.hpp"
#include "ancilla/distance.hpp"

namespace ancilla {

/// Sign convention for reported axes: the first non-negligible component is
/// positive.
inline Vec3 canonical_axis(const Vec3& v) {
  Vec3 a = v.normalized();
  for (int i = 0; i < 3; ++i) {
    if (std::abs(a(i)) > 1e-12) {
      if (a(i) < 0) a = -a;
      break;
    }
  }
  return a;
}

struct LimitSet {
  enum class Kind { Point, Diameter };
  Kind kind = Kind::Point;
  Vec3 point = Vec3::Zero();  // Point
  Vec3 axis = Vec3::Zero();   // Diameter, unit norm
};

inline LimitSet limit_set(const CanonicalForm& f, double tol = 1e-8) {
  const bool shifted = f.t.norm() > tol;
  std::vector<int> open_axes;
  for (int i = 0; i < 3; ++i)
    if (std::abs(f.lambda(i)) >= 1 - tol) open_axes.push_back(i);

  if (!shifted && open_axes.size() == 3) throw Error(ErrorKind::UnitaryChannel, "all axes have |lambda| = 1");
  LimitSet ls;
  if (shifted) {
    ls.point = fixed_point(f, tol);
    return ls;
  }
  if (open_axes.empty()) return ls;
  if (open_axes.size() == 2)
    throw Error(ErrorKind::Ambiguous, "two uncontracted axes without unitarity (complete positivity is violated)");
  ls.kind = LimitSet::Kind::Diameter;
  ls.axis = canonical_axis(f.post_rot.col(open_axes.front()));
  return ls;
}

enum class ClassKind { Depolarizing, Dephasing, NonUnital };

inline const char* to_string(ClassKind k) {
  switch (k) {
    case ClassKind::Depolarizing: return "depolarizing";
    case ClassKind::Dephasing: return "dephasing";
    case ClassKind::NonUnital: return "non_unital";
  }
  return "unknown";
}

struct ChannelClass {
  ClassKind kind = ClassKind::Depolarizing;
  Vec3 axis = Vec3::Zero();         // Dephasing
  Vec3 fixed_point = Vec3::Zero();  // NonUnital
  CanonicalForm form;
};

inline ChannelClass classify(const SuperOp& c, double tol = 1e-8) {
  ChannelClass out;
  out.form = canonical_form(c);
  const LimitSet ls = limit_set(out.form, tol);
  if (ls.kind == LimitSet::Kind::Diameter) {
    out.kind = ClassKind::Dephasing;
    out.axis = ls.axis;
  } else if (out.form.t.norm() > tol) {
    out.kind = ClassKind::NonUnital;
    out.fixed_point = ls.point;
  } else {
    out.kind = ClassKind::Depolarizing;
  }
  return out;
}

struct RelaxationReport {
  std::uint64_t steps = 0;
  double achieved_distance = 0;
  double target = 0;
};

/// Distances ||C^T - C_P|| for one strictly contractive channel, memoised so
/// that sweeps over several targets share evaluations.
class RelaxationProfile {
 public:
  explicit RelaxationProfile(const SuperOp& c, DistanceOptions opts = {}, double tol = 1e-8)
      : channel_(c), opts_(opts) {
    const CanonicalForm f = canonical_form(c);
    if (f.lambda.cwiseAbs().maxCoeff() >= 1 - tol)
      throw Error(ErrorKind::NonContractive, "not contractive: relaxation needs all |lambda| < 1");
    fixed_point_ = ancilla::fixed_point(f, tol);
    replacement_ = replacement_channel(fixed_point_);
  }

  const Vec3& fixed_point() const { return fixed_point_; }
  const SuperOp& replacement() const { return replacement_; }

  double distance(std::uint64_t steps) {
    if (auto it = memo_.find(steps); it != memo_.end()) return it->second;
    const DistanceEstimate d = channel_distance(power(channel_, steps), replacement_, opts_);
    if (!d.converged) throw Error(ErrorKind::NotConverged, "distance refinement did not stabilise");
    memo_.emplace(steps, d.upper);
    return d.upper;
  }

  /// Minimal T with distance(T) < target: doubling, bisection, then a
  /// downward walk so that T - 1 is checked directly.
  RelaxationReport time_to(double target) {
    if (!(target > 0)) throw Error(ErrorKind::InvalidArgument, "target must be positive");
    std::uint64_t hi = 1;
    while (distance(hi) >= target) {
      if (hi >= (std::uint64_t{1} << 52)) throw Error(ErrorKind::NotConverged, "relaxation time exceeds 2^52 steps");
      hi *= 2;
    }
    std::uint64_t lo = hi / 2;  // distance(lo) >= target unless lo == 0
    while (hi - lo > 1) {
      const std::uint64_t mid = lo + (hi - lo) / 2;
      if (distance(mid) < target) {
        hi = mid;
      } else {
        lo = mid;
      }
    }
    while (hi > 0 && distance(hi - 1) < target) --hi;
    return RelaxationReport{hi, distance(hi), target};
  }

 private:
  SuperOp channel_;
  DistanceOptions opts_;
  Vec3 fixed_point_;
  SuperOp replacement_;
  std::map<std::uint64_t, double> memo_;
};

inline RelaxationReport relaxation_time(const SuperOp& c, double target, const DistanceOptions& opts = {}) {
  return RelaxationProfile(c, opts).time_to(target);
}

enum class EntropyBehavior { StrictlyIncreasing, NonDecreasing, CanDecrease };

inline const char* to_string(EntropyBehavior b) {
  switch (b) {
    case EntropyBehavior::StrictlyIncreasing: return "strictly_increasing";
    case EntropyBehavior::NonDecreasing: return "non_decreasing";
    case EntropyBehavior::CanDecrease: return "can_decrease";
  }
  return "unknown";
}

inline double bloch_entropy(const Vec3& w) { return binary_entropy((1 + std::min(w.norm(), 1.0)) / 2); }

/// Empirical entropy response over `samples` random states plus a fixed probe
/// set (cardinal states, the channel's pre-rotation axes, I/2 and the fixed
/// point), which is where non-strict behaviour lives.
inline EntropyBehavior entropy_behavior(const SuperOp& c, int samples, std::uint64_t seed = 0) {
  if (samples < 1) throw Error(ErrorKind::InvalidArgument, "samples must be >= 1");
  constexpr double kGain = 1e-9;
  constexpr double kMaximal = 1e-6;
  const CanonicalForm f = canonical_form(c);

  std::vector<Vec3> states{Vec3::Zero()};
  for (int i = 0; i < 3; ++i) {
    states.push_back(Vec3::Unit(i));
    states.push_back(-Vec3::Unit(i));
    const Vec3 pre_axis = f.pre_rot.row(i).transpose();
    states.push_back(pre_axis);
    states.push_back(-pre_axis);
  }
  if (f.t.norm() > 1e-10 && f.lambda.cwiseAbs().maxCoeff() < 1 - 1e-10) states.push_back(fixed_point(f));
  Rng rng(seed);
  for (int s = 0; s < samples; ++s) states.push_back(random_ball_point(rng));

  bool decrease = false;
  bool strict = true;
  for (const Vec3& w : states) {
    const double before = bloch_entropy(w);
    const double after = bloch_entropy(c.apply(w));
    if (after < before - kGain) decrease = true;
    if (1 - before > kMaximal && after - before <= kGain) strict = false;
  }
  if (decrease) return EntropyBehavior::CanDecrease;
  return strict ? EntropyBehavior::StrictlyIncreasing : EntropyBehavior::NonDecreasing;
}

}  // namespace ancilla
