#include "bellsim/detection.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

namespace bellsim {
namespace {

using namespace modes;
using enum StationOutcome;
constexpr double kTol = 1e-12;
constexpr double kPi = std::numbers::pi;

// Brute-force oracle: Born weights of the ten ideal kets (squared
// coefficients written out by hand), then every photon independently lost
// with probability 1 - eta, then classified by counting photons per port.
// Uses no amplitude algebra from the library.
JointProbabilityTable lossy_table_oracle(double t1, double t2, double eta) {
  struct Ket {
    int c_plus, c_minus, d_plus, d_minus;
    double weight;
  };
  const double sd = std::sin(t1 - t2), cd = std::cos(t1 - t2);
  const double s1 = std::sin(2 * t1), s2 = std::sin(2 * t2), c1 = std::cos(2 * t1), c2 = std::cos(2 * t2);
  const Ket kets[] = {
      {1, 0, 1, 0, sd * sd / 4}, {1, 0, 0, 1, cd * cd / 4}, {0, 1, 1, 0, cd * cd / 4}, {0, 1, 0, 1, sd * sd / 4},
      {2, 0, 0, 0, s1 * s1 / 8}, {0, 2, 0, 0, s1 * s1 / 8}, {1, 1, 0, 0, c1 * c1 / 4},
      {0, 0, 2, 0, s2 * s2 / 8}, {0, 0, 0, 2, s2 * s2 / 8}, {0, 0, 1, 1, c2 * c2 / 4},
  };
  auto binom = [eta](int n, int k) {
    const double choose = (n == 2 && k == 1) ? 2.0 : 1.0;
    return choose * std::pow(eta, k) * std::pow(1 - eta, n - k);
  };
  auto cls = [](int plus, int minus) {
    if (plus == 0 && minus == 0) return 3;
    if (plus == 0 && minus == 1) return 1;
    if (plus == 1 && minus == 0) return 2;
    if (plus == 1 && minus == 1) return 4;
    return plus == 2 ? 5 : 6;
  };
  JointProbabilityTable t;
  for (const Ket& k : kets)
    for (int a = 0; a <= k.c_plus; ++a)
      for (int b = 0; b <= k.c_minus; ++b)
        for (int c = 0; c <= k.d_plus; ++c)
          for (int d = 0; d <= k.d_minus; ++d) {
            const double w = k.weight * binom(k.c_plus, a) * binom(k.c_minus, b) * binom(k.d_plus, c) *
                             binom(k.d_minus, d);
            t.p[cls(a, b) - 1][cls(c, d) - 1] += w;
          }
  return t;
}

void expect_tables_near(const JointProbabilityTable& a, const JointProbabilityTable& b, double tol) {
  for (int i = 0; i < kOutcomeCount; ++i)
    for (int j = 0; j < kOutcomeCount; ++j) EXPECT_NEAR(a.p[i][j], b.p[i][j], tol) << "cell " << i + 1 << "," << j + 1;
}

TEST(ClassifyTest, CoincidenceAcrossStations) {
  EXPECT_EQ(classify({{c_perp, 1}, {d_par, 1}}), OutcomePair(single_minus, single_plus));
}

TEST(ClassifyTest, DoubleParallel) { EXPECT_EQ(classify({{c_par, 2}}), OutcomePair(double_plus, nothing)); }

TEST(ClassifyTest, OneInEachPortOfOneStation) {
  EXPECT_EQ(classify({{c_par, 1}, {c_perp, 1}}), OutcomePair(coincidence, nothing));
}

TEST(ClassifyTest, AncillaPhotonsAreUndetected) {
  EXPECT_EQ(classify({{c_par.loss_ancilla(), 1}, {d_perp, 1}}), OutcomePair(nothing, single_minus));
  EXPECT_EQ(classify({{d_perp.loss_ancilla(), 2}}), OutcomePair(nothing, nothing));
}

TEST(ClassifyTest, IsTotalOverUpToTwoPhotonsPerStation) {
  for (int plus = 0; plus <= 2; ++plus)
    for (int minus = 0; plus + minus <= 2; ++minus) {
      OccupationVector occ;
      occ.add(d_par, plus);
      occ.add(d_perp, minus);
      EXPECT_NO_THROW(classify(occ));
    }
}

TEST(ClassifyTest, MoreThanTwoPhotonsIsImpossible) {
  OccupationVector occ;
  occ.add(c_par, 2);
  occ.add(c_perp, 1);
  try {
    classify(occ);
    FAIL();
  } catch (const error& e) {
    EXPECT_EQ(e.code(), errc::impossible_count);
  }
}

TEST(ClassifyTest, PrePolarizerModesAreRejected) { EXPECT_THROW(classify({{cx, 1}}), error); }

TEST(JointTableTest, IdealSinglesAtQuarterPiDifference) {
  const JointProbabilityTable t = joint_table(kPi / 4, 0.0, 1.0);
  EXPECT_NEAR(t(single_minus, single_minus), 1.0 / 8.0, kTol);
}

TEST(JointTableTest, EqualAnglesHaveNoAnticoincidentSingles) {
  EXPECT_NEAR(joint_table(0.0, 0.0, 1.0).at(1, 1), 0.0, kTol);
}

TEST(JointTableTest, SinglePortEffectAtQuarterPi) {
  const JointProbabilityTable t = joint_table(kPi / 4, 0.3, 1.0);
  EXPECT_NEAR(t(coincidence, nothing), 0.0, kTol);
}

TEST(JointTableTest, OneSidedLossAtEqualZeroAngles) {
  // Brute force over the loss-expanded state gives ½η(1-η) = 0.045 at η = 0.9.
  const JointProbabilityTable oracle = lossy_table_oracle(0.0, 0.0, 0.9);
  EXPECT_NEAR(oracle.at(1, 3), 0.045, 1e-15);
  EXPECT_NEAR(joint_table(0.0, 0.0, 0.9).at(1, 3), 0.045, kTol);
}

TEST(JointTableTest, MetadataRecordsInputs) {
  const JointProbabilityTable t = joint_table(0.1, 0.2, 0.8);
  EXPECT_EQ(t.theta1, 0.1);
  EXPECT_EQ(t.theta2, 0.2);
  EXPECT_EQ(t.eta, 0.8);
  EXPECT_EQ(t.alpha, 1.0);
}

TEST(JointTableTest, RejectsBadEfficiency) { EXPECT_THROW(joint_table(0.0, 0.0, 0.0), error); }

TEST(ConfusionTest, AlphaOneIsIdentity) {
  const JointProbabilityTable t = joint_table(0.3, -0.4, 0.85);
  expect_tables_near(apply_alpha_confusion(t, 1.0), t, 0.0);
}

TEST(ConfusionTest, AlphaZeroMovesAllDoublesToSingles) {
  const JointProbabilityTable t = joint_table(0.3, -0.4, 1.0);
  const JointProbabilityTable c = apply_alpha_confusion(t, 0.0);
  EXPECT_NEAR(c(single_minus, nothing), t(single_minus, nothing) + t(double_minus, nothing), kTol);
  EXPECT_EQ(c(double_minus, nothing), 0.0);
  EXPECT_EQ(c(double_plus, nothing), 0.0);
  EXPECT_EQ(c.alpha, 0.0);
}

TEST(ConfusionTest, AlphaHalfKeepsHalfTheDoubles) {
  const JointProbabilityTable t = joint_table(0.3, -0.4, 1.0);
  EXPECT_NEAR(apply_alpha_confusion(t, 0.5)(double_minus, nothing), 0.5 * t(double_minus, nothing), kTol);
}

TEST(ConfusionTest, CoincidenceClassIsNeverConfused) {
  const JointProbabilityTable t = joint_table(0.1, 0.0, 1.0);
  EXPECT_EQ(apply_alpha_confusion(t, 0.0)(coincidence, nothing), t(coincidence, nothing));
}

TEST(ConfusionTest, RejectsBadAlphaAndConfusedInput) {
  const JointProbabilityTable t = joint_table(0.1, 0.0, 1.0);
  try {
    apply_alpha_confusion(t, 1.5);
    FAIL();
  } catch (const error& e) {
    EXPECT_EQ(e.code(), errc::bad_alpha);
  }
  EXPECT_THROW(apply_alpha_confusion(apply_alpha_confusion(t, 0.5), 0.5), error);
}

TEST(ValueAssignmentTest, OnlyLoneMinusClickScoresMinusOne) {
  const ValueAssignment v = ValueAssignment::standard();
  EXPECT_EQ(assigned_value(v, single_minus, 1), -1);
  EXPECT_EQ(assigned_value(v, single_minus, 2), -1);
  EXPECT_EQ(assigned_value(v, coincidence, 1), 1);
  EXPECT_EQ(assigned_value(v, nothing, 2), 1);
  for (int label = 2; label <= 6; ++label) {
    EXPECT_EQ(assigned_value(v, outcome_from_label(label), 1), 1);
    EXPECT_EQ(assigned_value(v, outcome_from_label(label), 2), 1);
  }
}

TEST(JointTableProperty, IdealTableMatchesClosedFormsOnGrid) {
  for (int a = 0; a < 20; ++a)
    for (int b = 0; b < 20; ++b) {
      const double t1 = -kPi + 2 * kPi * a / 20.0 + 0.013, t2 = -kPi + 2 * kPi * b / 20.0 - 0.029;
      const JointProbabilityTable t = joint_table(t1, t2, 1.0);
      const double c = std::cos(2 * (t1 - t2));
      EXPECT_NEAR(t.at(1, 1), (1 - c) / 8, kTol);
      EXPECT_NEAR(t.at(2, 2), (1 - c) / 8, kTol);
      EXPECT_NEAR(t.at(2, 1), (1 + c) / 8, kTol);
      EXPECT_NEAR(t.at(1, 2), (1 + c) / 8, kTol);
      EXPECT_NEAR(t.at(5, 3), std::pow(std::sin(2 * t1), 2) / 8, kTol);
      EXPECT_NEAR(t.at(6, 3), std::pow(std::sin(2 * t1), 2) / 8, kTol);
      EXPECT_NEAR(t.at(3, 5), std::pow(std::sin(2 * t2), 2) / 8, kTol);
      EXPECT_NEAR(t.at(3, 6), std::pow(std::sin(2 * t2), 2) / 8, kTol);
      EXPECT_NEAR(t.at(4, 3), std::pow(std::cos(2 * t1), 2) / 4, kTol);
      EXPECT_NEAR(t.at(3, 4), std::pow(std::cos(2 * t2), 2) / 4, kTol);
      for (int i = 0; i < kOutcomeCount; ++i)
        for (int j = 0; j < kOutcomeCount; ++j)
          if (!is_ideal_cell(outcome_at(i), outcome_at(j))) EXPECT_NEAR(t.p[i][j], 0.0, kTol);
    }
}

TEST(JointTableProperty, LossyTableMatchesBruteForceOracle) {
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> angle(-kPi, kPi), unit(0.01, 1.0);
  for (int trial = 0; trial < 200; ++trial) {
    const double t1 = angle(rng), t2 = angle(rng), eta = unit(rng);
    const JointProbabilityTable t = joint_table(t1, t2, eta);
    expect_tables_near(t, lossy_table_oracle(t1, t2, eta), kTol);
    expect_tables_near(t, closed_form_table(t1, t2, eta), kTol);
  }
}

TEST(JointTableProperty, NormalizationSymmetryAndCancellation) {
  std::mt19937_64 rng(19);
  std::uniform_real_distribution<double> angle(-kPi, kPi), unit(0.0, 1.0);
  for (int trial = 0; trial < 300; ++trial) {
    const double t1 = angle(rng), t2 = angle(rng), eta = 0.01 + 0.99 * unit(rng), alpha = unit(rng);
    const JointProbabilityTable raw = joint_table(t1, t2, eta);
    const JointProbabilityTable t = apply_alpha_confusion(raw, alpha);
    EXPECT_NEAR(t.total(), 1.0, kTol);
    EXPECT_NEAR(t(nothing, nothing), (1 - eta) * (1 - eta), kTol);
    EXPECT_NEAR(raw(double_plus, nothing), raw(double_minus, nothing), kTol);
    EXPECT_NEAR(raw(nothing, double_plus), raw(nothing, double_minus), kTol);
    EXPECT_NEAR(t(single_minus, nothing), t(single_plus, nothing), kTol);
    EXPECT_NEAR(t(nothing, single_minus), t(nothing, single_plus), kTol);
    for (const auto& row : t.p)
      for (double v : row) EXPECT_GE(v, 0.0);
  }
}

TEST(ConfusionProperty, PreservesMergedMarginalsAndTotal) {
  std::mt19937_64 rng(23);
  std::uniform_real_distribution<double> angle(-kPi, kPi), unit(0.0, 1.0);
  auto row = [](const JointProbabilityTable& t, int i) {
    double m = 0.0;
    for (int j = 0; j < kOutcomeCount; ++j) m += t.p[i][j];
    return m;
  };
  auto col = [](const JointProbabilityTable& t, int j) {
    double m = 0.0;
    for (int i = 0; i < kOutcomeCount; ++i) m += t.p[i][j];
    return m;
  };
  for (int trial = 0; trial < 200; ++trial) {
    const JointProbabilityTable raw = joint_table(angle(rng), angle(rng), 0.05 + 0.95 * unit(rng));
    const JointProbabilityTable t = apply_alpha_confusion(raw, unit(rng));
    EXPECT_NEAR(t.total(), raw.total(), 1e-15);
    // Receiving unions {1, 6} and {2, 5}; classes 3 and 4 untouched.
    EXPECT_NEAR(row(t, 0) + row(t, 5), row(raw, 0) + row(raw, 5), 1e-15);
    EXPECT_NEAR(row(t, 1) + row(t, 4), row(raw, 1) + row(raw, 4), 1e-15);
    EXPECT_NEAR(col(t, 0) + col(t, 5), col(raw, 0) + col(raw, 5), 1e-15);
    EXPECT_NEAR(col(t, 1) + col(t, 4), col(raw, 1) + col(raw, 4), 1e-15);
    EXPECT_NEAR(row(t, 2), row(raw, 2), 1e-15);
    EXPECT_NEAR(row(t, 3), row(raw, 3), 1e-15);
  }
}

}  // namespace
}  // namespace bellsim
