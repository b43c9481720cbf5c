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

#include <algorithm>
#include <bit>
#include <cmath>
#include <functional>
#include <numeric>

#include "ancilla/fridge.hpp"
#include "support.hpp"

namespace ancilla {
namespace {

using testing::max_abs;

// Oracle: list all 2^R string probabilities, sort, add up the top half.
double brute_top_mass(double q, int r) {
  std::vector<double> p;
  for (std::uint32_t x = 0; x < (1U << r); ++x) {
    double v = 1;
    for (int b = 0; b < r; ++b) v *= ((x >> b) & 1U) ? q : 1 - q;
    p.push_back(v);
  }
  std::sort(p.rbegin(), p.rend());
  return std::accumulate(p.begin(), p.begin() + static_cast<long>(p.size() / 2), 0.0);
}

ErrorKind kind_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.kind();
  }
  ADD_FAILURE() << "no error raised";
  return ErrorKind::Parse;
}

const std::vector<double> kGridQ{0.05, 0.1, 0.15, 0.2, 0.25, 0.3, 0.35, 0.4, 0.45};
const std::vector<double> kGridEps{0.01, 0.02, 0.05, 0.1, 0.2, 0.5};

TEST(TopMass, MatchesEnumeration) {
  for (double q : {0.0, 0.01, 0.1, 0.25, 0.4, 0.499})
    for (int r = 1; r <= 12; ++r) EXPECT_NEAR(top_mass(q, r), brute_top_mass(q, r), 1e-12) << q << " " << r;
  EXPECT_NEAR(top_mass(0.1, 3), 0.972, 1e-12);
  EXPECT_NEAR(top_mass(0.25, 3), 0.84375, 1e-12);
}

TEST(TopMass, LargeBlocksMatchRationalArithmetic) {
  // Reference residuals evaluated with exact rational arithmetic.
  struct Case {
    double q;
    int r;
    double residual;
  };
  const Case cases[] = {{0.1, 19, 7.859764654256e-06},
                        {0.45, 63, 0.4243559820586631},
                        {0.45, 100, 0.31730439787419756},
                        {0.3, 200, 3.682228223160114e-09},
                        {0.45, 661, 0.009925029437742417}};
  for (const Case& c : cases) EXPECT_NEAR(reset_residual(c.q, c.r) / c.residual, 1.0, 1e-10) << c.r;
}

TEST(TopMass, OddBlockGainsNothingOverItsSuccessor) {
  for (double q : {0.05, 0.2, 0.45})
    for (int r = 1; r < 80; r += 2) {
      EXPECT_NEAR(top_mass(q, r), top_mass(q, r + 1), 1e-13) << r;
      EXPECT_NEAR(reset_residual(q, r + 1) / reset_residual(q, r), 1.0, 1e-11) << r;
      EXPECT_LE(top_mass(q, r), 1.0);
    }
}

TEST(ChooseR, Examples) {
  EXPECT_EQ(choose_R(0.0, 0.06), 1);
  EXPECT_EQ(choose_R(0.1, 0.06), 3);
  EXPECT_NEAR(reset_residual(0.1, 3), 0.056, 1e-12);
  EXPECT_NEAR(reset_residual(0.1, 2), 0.2, 1e-12);
  EXPECT_LT(reset_residual(0.1, 2), 0.25);
}

TEST(ChooseR, TiedResidualsPickTheSmallerBlock) {
  // R = 1 and R = 2 both leave 2q = 0.2 < 0.25, so the minimal R is 1.
  EXPECT_NEAR(reset_residual(0.1, 1), reset_residual(0.1, 2), 1e-15);
  EXPECT_EQ(choose_R(0.1, 0.25), 1);
}

TEST(ChooseR, Errors) {
  EXPECT_EQ(kind_of([] { choose_R(0.5, 0.1); }), ErrorKind::Unreachable);
  EXPECT_EQ(kind_of([] { choose_R(0.6, 0.1); }), ErrorKind::InvalidArgument);
  EXPECT_EQ(kind_of([] { choose_R(-0.1, 0.1); }), ErrorKind::InvalidArgument);
  EXPECT_EQ(kind_of([] { choose_R(0.1, 0.0); }), ErrorKind::InvalidArgument);
}

TEST(ChooseR, MinimalOverGrid) {
  for (double q : kGridQ) {
    for (double e : kGridEps) {
      const int r = choose_R(q, e);
      EXPECT_LT(reset_residual(q, r), e);
      if (r > 1) {
        EXPECT_GE(reset_residual(q, r - 1), e) << "q " << q << " eps2 " << e;
      }
    }
  }
}

TEST(ChooseR, MonotoneOverGrid) {
  for (double q : kGridQ)
    for (std::size_t i = 1; i < kGridEps.size(); ++i) EXPECT_LE(choose_R(q, kGridEps[i]), choose_R(q, kGridEps[i - 1]));
  for (double e : kGridEps)
    for (std::size_t i = 1; i < kGridQ.size(); ++i) EXPECT_GE(choose_R(kGridQ[i], e), choose_R(kGridQ[i - 1], e));
}

TEST(BuildCoolingCircuit, SingleQubitIsIdentity) {
  const FridgeSpec s = build_cooling_circuit(0.2, 1);
  EXPECT_EQ(s.permutation, (std::vector<std::uint32_t>{0, 1}));
  EXPECT_EQ(s.F, 1);
}

TEST(BuildCoolingCircuit, TwoQubitsTieBrokenByLabel) {
  // Probabilities 0.81, 0.09, 0.09, 0.01: 00 and 01 stay in the top half.
  const FridgeSpec s = build_cooling_circuit(0.1, 2);
  EXPECT_EQ(s.permutation, (std::vector<std::uint32_t>{0, 1, 2, 3}));
  EXPECT_TRUE(s.stages.empty());
  EXPECT_EQ(s.F, 2);
}

TEST(BuildCoolingCircuit, ThreeQubitTopHalf) {
  const FridgeSpec s = build_cooling_circuit(0.1, 3);
  for (std::uint32_t x : {0b000U, 0b001U, 0b010U, 0b100U}) EXPECT_LT(s.permutation[x], 4U);
  for (std::uint32_t x : {0b011U, 0b101U, 0b110U, 0b111U}) EXPECT_GE(s.permutation[x], 4U);
  EXPECT_EQ(s.permutation[0b100], 3U);
  EXPECT_EQ(s.permutation[0b011], 4U);
}

TEST(BuildCoolingCircuit, LocationCountsArePinned) {
  // Regression values for this compilation (Gray-path transpositions).
  EXPECT_EQ(build_cooling_circuit(0.1, 3).F, 15);
  EXPECT_EQ(build_cooling_circuit(0.1, 4).F, 124);
  EXPECT_EQ(build_cooling_circuit(0.1, 5).F, 375);
  for (int r = 1; r <= 6; ++r) EXPECT_GE(build_cooling_circuit(0.2, r).F, r);
}

TEST(BuildCoolingCircuit, PermutationUnitaryIsZeroOne) {
  for (int r = 1; r <= 6; ++r) {
    const FridgeSpec s = build_cooling_circuit(0.15, r);
    const CMat u = permutation_unitary(s);
    for (Eigen::Index i = 0; i < u.rows(); ++i) {
      int ones_row = 0, ones_col = 0;
      for (Eigen::Index j = 0; j < u.cols(); ++j) {
        const cplx v = u(i, j);
        EXPECT_TRUE(v == cplx(0) || v == cplx(1));
        ones_row += v == cplx(1) ? 1 : 0;
        ones_col += u(j, i) == cplx(1) ? 1 : 0;
      }
      EXPECT_EQ(ones_row, 1);
      EXPECT_EQ(ones_col, 1);
    }
    std::vector<std::uint32_t> sorted = s.permutation;
    std::sort(sorted.begin(), sorted.end());
    for (std::uint32_t x = 0; x < sorted.size(); ++x) EXPECT_EQ(sorted[x], x);
  }
}

TEST(BuildCoolingCircuit, StagesComposeToThePermutation) {
  for (int r = 1; r <= 6; ++r) {
    const FridgeSpec s = build_cooling_circuit(0.1, r);
    const Eigen::Index d = Eigen::Index{1} << r;
    CMat u = CMat::Identity(d, d);
    for (const auto& st : s.stages) u = stage_unitary(st, r) * u;
    EXPECT_EQ(u, permutation_unitary(s)) << "R = " << r;
  }
}

TEST(BuildCoolingCircuit, Errors) {
  EXPECT_EQ(kind_of([] { build_cooling_circuit(0.5, 3); }), ErrorKind::InvalidArgument);
  EXPECT_EQ(kind_of([] { build_cooling_circuit(0.1, 11); }), ErrorKind::SizeOverflow);
  EXPECT_EQ(kind_of([] { build_cooling_circuit(0.1, 0); }), ErrorKind::SizeOverflow);
  EXPECT_EQ(kind_of([] { build_cooling_circuit_for(Vec3::Zero(), 3); }), ErrorKind::Unreachable);
}

TEST(RunFridgeIdeal, Examples) {
  for (int r = 1; r <= 5; ++r) {
    const FridgeSpec s = build_cooling_circuit(0.0, r);
    EXPECT_NEAR(run_fridge_ideal(s, fixed_point_product(s)).reset_distance, 0.0, 1e-15);
  }
  const FridgeSpec s3 = build_cooling_circuit(0.1, 3);
  const CoolingReport r3 = run_fridge_ideal(s3, fixed_point_product(s3));
  EXPECT_NEAR(r3.reset_state(0, 0).real(), 0.972, 1e-12);
  EXPECT_NEAR(r3.reset_distance, 0.056, 1e-12);
  EXPECT_EQ(r3.mode, FridgeMode::Ideal);
  const FridgeSpec q25 = build_cooling_circuit(0.25, 3);
  EXPECT_NEAR(run_fridge_ideal(q25, fixed_point_product(q25)).reset_state(0, 0).real(), 0.84375, 1e-12);
}

TEST(RunFridgeIdeal, PopulationEqualsTopMassAndEntropyIsConserved) {
  for (double q : {0.02, 0.1, 0.3, 0.45}) {
    for (int r = 1; r <= 7; ++r) {
      const FridgeSpec s = build_cooling_circuit(q, r);
      const CoolingReport rep = run_fridge_ideal(s, fixed_point_product(s));
      EXPECT_NEAR(rep.reset_state(0, 0).real(), brute_top_mass(q, r), 1e-12);
      EXPECT_NEAR(entropy_bits(rep.output), r * binary_entropy(q), 1e-10);
      EXPECT_LE(rep.waste_entropy, r - 1 + 1e-12);
      EXPECT_GE(rep.reset_distance, 0.0);
      EXPECT_LE(rep.reset_distance, 2.0);
    }
  }
}

TEST(RunFridgeIdeal, ArbitraryFixedPointIsRotatedFirst) {
  Rng rng(12);
  for (int i = 0; i < 20; ++i) {
    const Vec3 p = random_ball_point(rng);
    if (p.norm() < 0.05) continue;
    const FridgeSpec s = build_cooling_circuit_for(p, 3);
    const Mat2 single = bloch_to_density(p);
    const CMat factors[] = {single, single, single};
    const CoolingReport rep = run_fridge_ideal(s, product(factors));
    EXPECT_NEAR(rep.reset_state(0, 0).real(), top_mass((1 - p.norm()) / 2, 3), 1e-10);
  }
}

TEST(RunFridgeIdeal, RejectsWrongArity) {
  const FridgeSpec s = build_cooling_circuit(0.1, 3);
  EXPECT_THROW(run_fridge_ideal(s, basis_state(2, 0)), Error);
  EXPECT_THROW(run_fridge_noisy(s, SuperOp::identity(), basis_state(2, 0)), Error);
}

TEST(Optimality, NoTwoQubitUnitaryBeatsTopMass) {
  const double q = 0.1;
  const FridgeSpec s = build_cooling_circuit(q, 2);
  const CMat rho = fixed_point_product(s);
  const int reset[] = {0};
  Rng rng(99);
  double best = 0;
  for (int i = 0; i < 10000; ++i) {
    const CMat u = haar_unitary(4, rng);
    const CMat out = u * rho * u.adjoint();
    best = std::max(best, partial_trace(out, 2, reset)(0, 0).real());
  }
  // Every permutation as well: the optimum over them is attained.
  std::vector<std::uint32_t> perm{0, 1, 2, 3};
  double best_perm = 0;
  do {
    const CMat u = gates::permutation(perm);
    best_perm = std::max(best_perm, partial_trace(u * rho * u.adjoint(), 2, reset)(0, 0).real());
  } while (std::next_permutation(perm.begin(), perm.end()));
  EXPECT_LE(best, top_mass(q, 2) + 1e-9);
  EXPECT_NEAR(best_perm, top_mass(q, 2), 1e-12);
}

TEST(RunFridgeNoisy, IdentityNoiseEqualsIdeal) {
  for (int r = 1; r <= 5; ++r) {
    const FridgeSpec s = build_cooling_circuit(0.1, r);
    const CMat in = fixed_point_product(s);
    const CoolingReport ideal = run_fridge_ideal(s, in);
    const CoolingReport noisy = run_fridge_noisy(s, SuperOp::identity(), in);
    EXPECT_LE(max_abs(noisy.output - ideal.output), 1e-12);
    EXPECT_NEAR(noisy.reset_distance, ideal.reset_distance, 1e-12);
    EXPECT_EQ(noisy.mode, FridgeMode::Noisy);
  }
}

TEST(RunFridgeNoisy, AmplitudeDampingWithinBound) {
  for (double p : {0.001, 0.01, 0.02}) {
    for (double q : {0.05, 0.1, 0.3}) {
      const FridgeSpec s = build_cooling_circuit(q, 3);
      const CoolingReport rep = run_fridge_noisy(s, channels::amplitude_damping(p), fixed_point_product(s));
      EXPECT_TRUE(rep.within_bound);
      EXPECT_LE(rep.reset_distance, reset_residual(q, 3) + 1.1 * s.F * rep.location_distance + 1e-12);
    }
  }
}

TEST(RunFridgeNoisy, PerturbedInputStaysWithinDrift) {
  Rng rng(4);
  std::uniform_real_distribution<double> w(0.0, 0.2);
  const FridgeSpec s = build_cooling_circuit(0.1, 3);
  const CMat p = fixed_point_product(s);
  const double ideal = run_fridge_ideal(s, p).reset_distance;
  for (int i = 0; i < 100; ++i) {
    const CMat in = (1 - w(rng)) * p + w(rng) * random_density(8, 8, rng);
    const CMat norm_in = in / in.trace().real();
    const double drift = trace_norm(norm_in - p);
    const CoolingReport rep = run_fridge_noisy(s, SuperOp::identity(), norm_in);
    EXPECT_LE(rep.reset_distance, ideal + drift + 1e-12);
    EXPECT_TRUE(rep.within_bound);
  }
}

TEST(ApplyFridge, WorksOnAnEmbeddedBlock) {
  // Block on qubits (3, 1, 0) of a 4-qubit register; qubit 2 is a spectator.
  const FridgeSpec s = build_cooling_circuit(0.1, 3);
  Mat2 single = Mat2::Zero();
  single(0, 0) = 0.9;
  single(1, 1) = 0.1;
  const CMat factors[] = {single, single, basis_state(1, 1), single};
  const int block[] = {3, 1, 0};
  const CMat out = apply_fridge(product(factors), 4, s, SuperOp::identity(), block);
  const int reset[] = {3};
  const int spectator[] = {2};
  EXPECT_NEAR(partial_trace(out, 4, reset)(0, 0).real(), 0.972, 1e-12);
  EXPECT_NEAR(partial_trace(out, 4, spectator)(1, 1).real(), 1.0, 1e-15);
}

}  // namespace
}  // namespace ancilla
