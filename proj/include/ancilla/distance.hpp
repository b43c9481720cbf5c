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

/// Diamond-norm sandwich for the difference of two qubit channels.
///
/// For a qubit channel difference D with Choi matrix J (output factor first)
/// and an input state rho on the reference, the output of D (x) id on the
/// purification of rho is (I (x) sqrt(rho)) J (I (x) sqrt(rho)). Its trace
/// norm, maximised over rho, is the diamond norm: one reference qubit is
/// enough for qubit channels. rho = I/2 gives the Choi lower bound, and
/// ||J||_1 is a rigorous ceiling.
///
/// The maximisation is non-convex in our parametrisation, so it is a
/// multi-start Nelder-Mead search over the Bloch ball.

#include <gsl/gsl_errno.h>
#include <gsl/gsl_multimin.h>
#include <gsl/gsl_vector.h>

#include <algorithm>
#include <array>
#include <cmath>
#include <memory>
#include <numbers>

#include "ancilla/channel.hpp"

namespace ancilla {

struct DistanceOptions {
  int restarts = 64;
  int max_iterations = 2000;
  double simplex_tol = 1e-9;
  /// A run also counts as stable once its best value has not moved by more
  /// than value_tol (relative) for stall_window iterations; flat ridges never
  /// shrink the simplex.
  double value_tol = 1e-13;
  int stall_window = 64;
  std::uint64_t seed = 0x5eedULL;
};

struct DistanceEstimate {
  double lower = 0;    // Choi bound, maximally entangled input
  double upper = 0;    // optimised input; used wherever "< threshold" is needed
  double ceiling = 0;  // ||J||_1, always >= the true diamond norm
  bool converged = true;
};

namespace detail {

struct DiamondObjective {
  Mat4 choi;

  static Vec3 bloch(const double* x) {
    const double r = std::sin(x[2]);
    return r * Vec3(std::sin(x[0]) * std::cos(x[1]), std::sin(x[0]) * std::sin(x[1]), std::cos(x[0]));
  }

  double value(const Vec3& r) const {
    const double len = std::min(r.norm(), 1.0);
    const double sp = std::sqrt((1 + len) / 2);
    const double sm = std::sqrt((1 - len) / 2);
    Mat2 root = 0.5 * (sp + sm) * pauli::I();
    if (len > 0) {
      const Vec3 n = r / r.norm();
      root += 0.5 * (sp - sm) * (n(0) * pauli::X() + n(1) * pauli::Y() + n(2) * pauli::Z());
    }
    Mat4 k = Mat4::Zero();
    // (I (x) root) J (I (x) root)
    for (int o1 = 0; o1 < 2; ++o1)
      for (int o2 = 0; o2 < 2; ++o2)
        k.block<2, 2>(2 * o1, 2 * o2) = root * choi.block<2, 2>(2 * o1, 2 * o2) * root;
    Eigen::SelfAdjointEigenSolver<Mat4> es(k, Eigen::EigenvaluesOnly);
    return es.eigenvalues().cwiseAbs().sum();
  }

  static double negated(const gsl_vector* x, void* self) {
    const double xs[3] = {gsl_vector_get(x, 0), gsl_vector_get(x, 1), gsl_vector_get(x, 2)};
    return -static_cast<const DiamondObjective*>(self)->value(bloch(xs));
  }
};

struct GslVectorDeleter {
  void operator()(gsl_vector* v) const { gsl_vector_free(v); }
};
struct GslMinimizerDeleter {
  void operator()(gsl_multimin_fminimizer* m) const { gsl_multimin_fminimizer_free(m); }
};

}  // namespace detail

inline DistanceEstimate channel_distance(const SuperOp& a, const SuperOp& b, const DistanceOptions& opts = {}) {
  const Mat4 j = choi_matrix(a) - choi_matrix(b);
  detail::DiamondObjective obj{j};
  DistanceEstimate est;
  est.lower = obj.value(Vec3::Zero());
  est.ceiling = Eigen::SelfAdjointEigenSolver<Mat4>(j, Eigen::EigenvaluesOnly).eigenvalues().cwiseAbs().sum();
  est.upper = est.lower;
  if (est.ceiling <= 1e-15) return est;

  gsl_set_error_handler_off();
  gsl_multimin_function fn{&detail::DiamondObjective::negated, 3, &obj};
  std::unique_ptr<gsl_vector, detail::GslVectorDeleter> x(gsl_vector_alloc(3));
  std::unique_ptr<gsl_vector, detail::GslVectorDeleter> step(gsl_vector_alloc(3));
  std::unique_ptr<gsl_multimin_fminimizer, detail::GslMinimizerDeleter> nm(
      gsl_multimin_fminimizer_alloc(gsl_multimin_fminimizer_nmsimplex2, 3));

  Rng rng(opts.seed);
  std::uniform_real_distribution<double> angle(0.0, std::numbers::pi);
  const double h = std::numbers::pi / 2;
  // Fixed starts: the six cardinal pure states; the rest are random.
  const std::array<std::array<double, 3>, 6> cardinal{{{0, 0, h}, {h, 0, h}, {h, h, h}, {h, 0, -h}, {h, h, -h}, {0, 0, -h}}};

  for (int s = 0; s < opts.restarts; ++s) {
    std::array<double, 3> start{};
    if (s < static_cast<int>(cardinal.size())) {
      start = cardinal[static_cast<std::size_t>(s)];
    } else {
      start = {angle(rng), 2 * angle(rng), angle(rng)};
    }
    for (int i = 0; i < 3; ++i) {
      gsl_vector_set(x.get(), i, start[static_cast<std::size_t>(i)]);
      gsl_vector_set(step.get(), i, 0.4);
    }
    gsl_multimin_fminimizer_set(nm.get(), &fn, x.get(), step.get());
    bool done = false;
    double anchor = nm->fval;
    int stall = 0;
    for (int it = 0; it < opts.max_iterations; ++it) {
      if (gsl_multimin_fminimizer_iterate(nm.get()) != GSL_SUCCESS) break;
      const double size = gsl_multimin_fminimizer_size(nm.get());
      if (gsl_multimin_test_size(size, opts.simplex_tol) == GSL_SUCCESS) {
        done = true;
        break;
      }
      if (std::abs(nm->fval - anchor) <= opts.value_tol * std::abs(anchor) + 1e-300) {
        if (++stall >= opts.stall_window) {
          done = true;
          break;
        }
      } else {
        anchor = nm->fval;
        stall = 0;
      }
    }
    if (!done) est.converged = false;
    est.upper = std::max(est.upper, -nm->fval);
  }
  return est;
}

}  // namespace ancilla
