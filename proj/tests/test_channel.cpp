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
#include <cmath>

#include "ancilla/densim.hpp"
#include "ancilla/distance.hpp"
#include "support.hpp"

namespace ancilla {
namespace {

using testing::max_abs;
using testing::random_rotation;

// Oracle: PTM entry (i, j) = tr[s_i sum_k A s_j A^dag] / 2, evaluated
// directly from the Kraus set.
Mat4r ptm_oracle(const KrausSet& k) {
  Mat4r m;
  for (int i = 0; i < 4; ++i) {
    for (int j = 0; j < 4; ++j) {
      Mat2 out = Mat2::Zero();
      for (const auto& a : k.ops) out += a * pauli::at(j) * a.adjoint();
      m(i, j) = 0.5 * (pauli::at(i) * out).trace().real();
    }
  }
  return m;
}

TEST(KrausToSuperOp, IdentityKrausGivesIdentityPtm) {
  const SuperOp c = kraus_to_superop(KrausSet{{Mat2::Identity()}});
  EXPECT_LE(max_abs(c.ptm() - Mat4r::Identity()), 1e-15);
}

TEST(KrausToSuperOp, DephasingTenPercent) {
  const SuperOp c = channels::dephasing(0.1);
  EXPECT_LE(c.shift().norm(), 1e-15);
  EXPECT_LE(max_abs(c.block() - Vec3(0.8, 0.8, 1).asDiagonal().toDenseMatrix()), 1e-12);
}

TEST(KrausToSuperOp, AmplitudeDampingPointThreeSix) {
  const SuperOp c = channels::amplitude_damping(0.36);
  EXPECT_LE((c.shift() - Vec3(0, 0, 0.36)).norm(), 1e-12);
  EXPECT_LE(max_abs(c.block() - Vec3(0.8, 0.8, 0.64).asDiagonal().toDenseMatrix()), 1e-12);
}

TEST(KrausToSuperOp, MatchesTraceFormulaOnRandomKraus) {
  Rng rng(11);
  for (int i = 0; i < 200; ++i) {
    const KrausSet k = channels::random_kraus(1 + i % 4, rng);
    EXPECT_LE(max_abs(kraus_to_superop(k).ptm() - ptm_oracle(k)), 1e-12);
  }
}

TEST(KrausToSuperOp, RejectsNonTracePreserving) {
  const KrausSet k{{0.9 * Mat2::Identity()}};
  try {
    kraus_to_superop(k);
    FAIL() << "expected rejection";
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::NotTracePreserving);
  }
}

TEST(SuperOpType, RejectsBadFirstRow) {
  Mat4r m = Mat4r::Identity();
  m(0, 3) = 0.1;
  EXPECT_THROW(SuperOp{m}, Error);
}

TEST(CanonicalForm, IdentityChannel) {
  const CanonicalForm f = canonical_form(SuperOp::identity());
  EXPECT_LE(f.t.norm(), 1e-15);
  EXPECT_LE((f.lambda - Vec3::Ones()).norm(), 1e-15);
  EXPECT_LE(max_abs(f.pre_rot - Mat3::Identity()), 1e-15);
  EXPECT_LE(max_abs(f.post_rot - Mat3::Identity()), 1e-15);
}

TEST(CanonicalForm, DepolarizingPointThree) {
  const CanonicalForm f = canonical_form(channels::depolarizing(0.3));
  EXPECT_LE(f.t.norm(), 1e-15);
  EXPECT_LE((f.lambda - Vec3::Constant(0.6)).norm(), 1e-12);
}

TEST(CanonicalForm, XAxisDephasingCarriesBasisChangeInRotations) {
  const double p = 0.15;
  const SuperOp h = channels::unitary(gates::H());
  const SuperOp c = h * channels::dephasing(p) * h;
  const CanonicalForm f = canonical_form(c);
  Vec3 mags = f.lambda.cwiseAbs();
  std::sort(mags.data(), mags.data() + 3);
  EXPECT_LE((mags - Vec3(1 - 2 * p, 1 - 2 * p, 1)).norm(), 1e-12);
  int open = 0;
  for (int i = 0; i < 3; ++i) {
    if (std::abs(std::abs(f.lambda(i)) - 1) < 1e-12) {
      open = i;
    }
  }
  // The uncontracted axis, seen in the lab frame, is x.
  EXPECT_NEAR(std::abs(f.post_rot.col(open)(0)), 1.0, 1e-12);
  EXPECT_LE(max_abs(f.reconstruct().ptm() - c.ptm()), 1e-12);
}

TEST(CanonicalForm, RotationsAreProper) {
  Rng rng(3);
  for (int i = 0; i < 500; ++i) {
    const CanonicalForm f = canonical_form(channels::random_channel(1 + i % 4, rng));
    EXPECT_NEAR(f.pre_rot.determinant(), 1.0, 1e-10);
    EXPECT_NEAR(f.post_rot.determinant(), 1.0, 1e-10);
  }
}

TEST(CanonicalForm, RoundTripTenThousandRandomChannels) {
  Rng rng(2026);
  double worst = 0;
  for (int i = 0; i < 10000; ++i) {
    SuperOp c = channels::random_channel(1 + i % 4, rng);
    if (i % 3 == 0) c = channels::unitary(haar_unitary(2, rng)) * c * channels::unitary(haar_unitary(2, rng));
    worst = std::max(worst, max_abs(canonical_form(c).reconstruct().ptm() - c.ptm()));
  }
  EXPECT_LE(worst, 1e-10);
}

TEST(IsUnital, NamedChannels) {
  EXPECT_TRUE(is_unital(channels::dephasing(0.2)));
  EXPECT_TRUE(is_unital(channels::depolarizing(0.2)));
  EXPECT_FALSE(is_unital(channels::amplitude_damping(0.2)));
  EXPECT_TRUE(is_unital(channels::amplitude_damping(0.0)));
}

CanonicalForm unital_form(const Vec3& lambda) {
  CanonicalForm f;
  f.lambda = lambda;
  return f;
}

TEST(CpCheck, Examples) {
  EXPECT_TRUE(cp_check(unital_form({1, 1, 1})));
  // |l_X - l_Y| = 0.1 > |1 - l_Z| = 0.
  EXPECT_FALSE(cp_check(unital_form({1, 0.9, 1})));
  EXPECT_FALSE(choi_positive(unital_form({1, 0.9, 1}).reconstruct()));
  // (1, 0.9, 0.9) is x-axis dephasing with p = 0.05 and sits on the boundary.
  EXPECT_TRUE(cp_check(unital_form({1, 0.9, 0.9})));
  EXPECT_TRUE(choi_positive(unital_form({1, 0.9, 0.9}).reconstruct()));
  EXPECT_TRUE(cp_check(unital_form({0.8, 0.8, 1})));
}

TEST(CpCheck, AgreesWithChoiOnTenThousandUnitalForms) {
  Rng rng(77);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  int agree = 0;
  int valid = 0;
  const int trials = 10000;
  for (int i = 0; i < trials; ++i) {
    CanonicalForm f = unital_form({u(rng), u(rng), u(rng)});
    f.pre_rot = random_rotation(rng);
    f.post_rot = random_rotation(rng);
    const bool choi = choi_positive(f.reconstruct());
    valid += choi ? 1 : 0;
    agree += cp_check(f) == choi ? 1 : 0;
  }
  EXPECT_EQ(agree, trials);
  // The sample must exercise both verdicts.
  EXPECT_GT(valid, trials / 10);
  EXPECT_LT(valid, trials - trials / 10);
}

TEST(CpCheck, NonUnitalFallsBackToChoi) {
  Rng rng(5);
  for (int i = 0; i < 200; ++i) {
    const CanonicalForm f = canonical_form(channels::random_channel(2, rng));
    EXPECT_TRUE(cp_check(f));
  }
  CanonicalForm bad;
  bad.t = Vec3(0, 0, 0.5);
  bad.lambda = Vec3(0.9, 0.9, 0.5);
  EXPECT_EQ(cp_check(bad), choi_positive(bad.reconstruct()));
  EXPECT_FALSE(cp_check(bad));
}

TEST(ChoiPositive, Examples) {
  EXPECT_TRUE(choi_positive(SuperOp::identity()));
  EXPECT_FALSE(choi_positive(channels::transpose_map()));
  Rng rng(9);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int i = 0; i < 100; ++i) {
    double px = u(rng), py = u(rng), pz = u(rng);
    const double s = px + py + pz + u(rng);
    EXPECT_TRUE(choi_positive(channels::pauli_channel(px / s, py / s, pz / s)));
  }
}

TEST(ChoiMatrix, TraceIsTwoAndOutputPartialTraceIsIdentity) {
  Rng rng(4);
  const Mat4 j = choi_matrix(channels::random_channel(3, rng));
  EXPECT_NEAR(j.trace().real(), 2.0, 1e-12);
  // Tracing the output factor (first) leaves the input identity.
  Mat2 in = Mat2::Zero();
  for (int a = 0; a < 2; ++a)
    for (int b = 0; b < 2; ++b)
      for (int o = 0; o < 2; ++o) in(a, b) += j(2 * o + a, 2 * o + b);
  EXPECT_LE(max_abs(in - Mat2::Identity()), 1e-12);
}

TEST(FixedPoint, AmplitudeDampingIsGroundState) {
  for (double p : {1e-6, 0.01, 0.1, 0.5, 0.9, 1.0}) {
    const Vec3 w = fixed_point(canonical_form(channels::amplitude_damping(p)));
    EXPECT_LE((w - Vec3(0, 0, 1)).norm(), 1e-12) << "p = " << p;
  }
}

TEST(FixedPoint, UnitalContractiveIsCenter) {
  EXPECT_LE(fixed_point(canonical_form(channels::depolarizing(0.2))).norm(), 1e-15);
  EXPECT_LE(fixed_point(canonical_form(channels::pauli_channel(0.1, 0.02, 0.03))).norm(), 1e-15);
}

TEST(FixedPoint, PerAxisClosedForm) {
  CanonicalForm f;
  f.t = Vec3(0, 0, 0.1);
  f.lambda = Vec3(0.5, 0.5, 0.8);
  EXPECT_LE((fixed_point(f) - Vec3(0, 0, 0.5)).norm(), 1e-12);
}

TEST(FixedPoint, ShiftedUncontractedAxisIsRejected) {
  CanonicalForm f;
  f.t = Vec3(0, 0, 0.1);
  f.lambda = Vec3(0.5, 0.5, 1.0);
  try {
    fixed_point(f);
    FAIL() << "expected rejection";
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::NonContractive);
  }
}

TEST(FixedPoint, InvariantUnderTheChannelAndMatchesPowerIteration) {
  Rng rng(21);
  for (int i = 0; i < 300; ++i) {
    const SuperOp c = channels::random_channel(2 + i % 3, rng);
    const Vec3 w = fixed_point(canonical_form(c));
    EXPECT_LE((bloch_to_density(c.apply(w)) - bloch_to_density(w)).norm(), 1e-10);
    const Mat3 m = c.block();
    if (m.jacobiSvd().singularValues()(0) > 0.99) continue;  // slow iteration
    Vec3 x = random_ball_point(rng);
    for (int k = 0; k < 20000 && (c.apply(x) - x).norm() > 1e-15; ++k) x = c.apply(x);
    EXPECT_LE((x - w).norm(), 1e-10);
  }
}

TEST(PauliProbs, Examples) {
  const auto zero = pauli_probs(unital_form({1, 1, 1}));
  EXPECT_EQ(zero.p_x, 0);
  EXPECT_EQ(zero.p_y, 0);
  EXPECT_EQ(zero.p_z, 0);
  const double p = 0.07;
  const auto deph = pauli_probs(unital_form({1 - 2 * p, 1 - 2 * p, 1}));
  EXPECT_NEAR(deph.p_x, 0, 1e-15);
  EXPECT_NEAR(deph.p_y, 0, 1e-15);
  EXPECT_NEAR(deph.p_z, p, 1e-15);
  const double l = 1 - 4 * p / 3;
  const auto dep = pauli_probs(unital_form({l, l, l}));
  EXPECT_NEAR(dep.p_x, p / 3, 1e-15);
  EXPECT_NEAR(dep.p_y, p / 3, 1e-15);
  EXPECT_NEAR(dep.p_z, p / 3, 1e-15);
}

TEST(PauliProbs, RejectsNonUnital) {
  EXPECT_THROW(pauli_probs(canonical_form(channels::amplitude_damping(0.1))), Error);
}

TEST(PauliProbs, ReconstructsRandomPauliChannels) {
  Rng rng(8);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int i = 0; i < 1000; ++i) {
    const double a = u(rng), b = u(rng), c = u(rng), d = u(rng);
    const double s = a + b + c + d;
    const SuperOp ch = channels::pauli_channel(a / s, b / s, c / s);
    const auto pp = pauli_probs(canonical_form(ch));
    EXPECT_LE(max_abs(channels::pauli_channel(pp.p_x, pp.p_y, pp.p_z).ptm() - ch.ptm()), 1e-10);
  }
}

TEST(Power, ZeroIsIdentity) {
  Rng rng(1);
  EXPECT_EQ(power(channels::random_channel(2, rng), 0).ptm(), Mat4r::Identity());
}

TEST(Power, DephasingSquared) {
  const SuperOp c = power(channels::dephasing(0.1), 2);
  EXPECT_LE((c.block().diagonal() - Vec3(0.64, 0.64, 1)).norm(), 1e-12);
}

TEST(Power, ReplacementIsIdempotent) {
  const SuperOp r = replacement_channel(Vec3(0.1, -0.2, 0.3));
  for (std::uint64_t k : {1, 2, 7, 1000}) EXPECT_LE(max_abs(power(r, k).ptm() - r.ptm()), 1e-15);
}

TEST(Power, AddsExponents) {
  Rng rng(12);
  for (int i = 0; i < 300; ++i) {
    const SuperOp c = channels::random_channel(1 + i % 4, rng);
    const std::uint64_t j = static_cast<std::uint64_t>(i % 17), k = static_cast<std::uint64_t>(i % 5);
    EXPECT_LE(max_abs(power(c, j + k).ptm() - (power(c, j) * power(c, k)).ptm()), 1e-10);
  }
}

TEST(ReplacementChannel, Examples) {
  Rng rng(6);
  const SuperOp center = replacement_channel(Vec3::Zero());
  const SuperOp ground = replacement_channel(Vec3(0, 0, 1));
  for (int i = 0; i < 20; ++i) {
    const Vec3 w = random_ball_point(rng);
    EXPECT_LE(center.apply(w).norm(), 1e-15);
    EXPECT_LE((ground.apply(w) - Vec3(0, 0, 1)).norm(), 1e-15);
  }
  EXPECT_LE((replacement_channel(Vec3(0, 0, 0.5)).apply(Vec3(0, 0, -1)) - Vec3(0, 0, 0.5)).norm(), 1e-15);
  EXPECT_THROW(replacement_channel(Vec3(0, 0, 1.1)), Error);
}

TEST(ChannelDistance, EqualChannelsAreZero) {
  const DistanceEstimate d = channel_distance(channels::dephasing(0.1), channels::dephasing(0.1));
  EXPECT_EQ(d.lower, 0);
  EXPECT_EQ(d.upper, 0);
}

TEST(ChannelDistance, IdentityVersusZIsTwo) {
  const DistanceEstimate d = channel_distance(SuperOp::identity(), channels::unitary(gates::Z()));
  EXPECT_NEAR(d.upper, 2.0, 1e-9);
  EXPECT_LE(d.lower, d.upper + 1e-12);
}

TEST(ChannelDistance, DephasingIsLinearInP) {
  std::vector<double> ps{0.01, 0.05, 0.1};
  std::vector<double> ratio;
  for (double p : ps) {
    const DistanceEstimate d = channel_distance(channels::dephasing(p), SuperOp::identity());
    EXPECT_LE(d.lower, d.upper + 1e-12);
    ratio.push_back(d.upper / p);
  }
  // Slope constant across the sweep to 5%.
  const auto [lo, hi] = std::minmax_element(ratio.begin(), ratio.end());
  EXPECT_LE(*hi / *lo - 1, 0.05);
  EXPECT_GT(*lo, 1.0);
  EXPECT_LT(*hi, 3.0);
}

TEST(ChannelDistance, SandwichAndTriangleInequality) {
  Rng rng(31);
  for (int i = 0; i < 15; ++i) {
    const SuperOp a = channels::random_channel(2, rng);
    const SuperOp b = channels::random_channel(3, rng);
    const SuperOp c = channels::random_channel(1 + i % 4, rng);
    const auto ab = channel_distance(a, b), bc = channel_distance(b, c), ac = channel_distance(a, c);
    for (const auto* d : {&ab, &bc, &ac}) {
      EXPECT_LE(d->lower, d->upper + 1e-12);
      EXPECT_LE(d->upper, d->ceiling + 1e-12);
      EXPECT_TRUE(d->converged);
    }
    EXPECT_LE(ac.upper, ab.upper + bc.upper + 1e-6);
  }
}

}  // namespace
}  // namespace ancilla
