#include "bellsim/fock.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

namespace bellsim {
namespace {

using namespace modes;

TEST(FockTest, VacuumIsSingleUnitTerm) {
  const FockState v = vacuum();
  ASSERT_EQ(v.size(), 1u);
  EXPECT_EQ(v.amplitude_of({}), amplitude(1.0, 0.0));
  EXPECT_DOUBLE_EQ(norm(v), 1.0);
  EXPECT_DOUBLE_EQ(probability_of(v, {}), 1.0);
}

TEST(FockTest, CreateFirstQuantum) {
  const FockState s = create(vacuum(), c_par);
  ASSERT_EQ(s.size(), 1u);
  EXPECT_EQ(s.amplitude_of({{c_par, 1}}), amplitude(1.0));
}

TEST(FockTest, CreateTwiceOnOneModeCarriesBosonicFactor) {
  const FockState s = create(create(vacuum(), c_par), c_par);
  ASSERT_EQ(s.size(), 1u);
  EXPECT_NEAR(s.amplitude_of({{c_par, 2}}).real(), std::numbers::sqrt2, 1e-15);
  EXPECT_NEAR(norm(s), std::numbers::sqrt2, 1e-15);
  // so the normalized two-photon ket is (1/√2)(c∥†)²|0>
  const FockState ket = (1.0 / std::numbers::sqrt2) * s;
  EXPECT_NEAR(norm(ket), 1.0, 1e-15);
}

TEST(FockTest, CreateOnDistinctModesHasNoBosonicFactor) {
  const FockState s = create(create(vacuum(), c_par), d_perp);
  EXPECT_EQ(s.amplitude_of({{c_par, 1}, {d_perp, 1}}), amplitude(1.0));
  EXPECT_DOUBLE_EQ(norm(s), 1.0);
}

TEST(FockTest, CreateOrderDoesNotMatter) {
  const FockState a = create(create(vacuum(), c_par), d_perp);
  const FockState b = create(create(vacuum(), d_perp), c_par);
  EXPECT_EQ(a.terms(), b.terms());
}

TEST(FockTest, CreateBeyondTwoPhotonsIsCapacityError) {
  const FockState two = create(create(vacuum(), c_par), d_par);
  try {
    create(two, c_perp);
    FAIL() << "expected capacity error";
  } catch (const error& e) {
    EXPECT_EQ(e.code(), errc::capacity_exceeded);
  }
}

TEST(FockTest, NormOfZeroExpansionIsZero) { EXPECT_EQ(norm(FockState{}), 0.0); }

TEST(FockTest, NormOfPrintedFinalStateIsOne) {
  // Ten coefficients of the ideal final state at arbitrary angles; their
  // squared moduli sum to ¼[2 + sin²2θ1 + cos²2θ1 + sin²2θ2 + cos²2θ2] = 1.
  const double t1 = 0.37, t2 = -1.21;
  const amplitude i{0.0, 1.0};
  const double sd = std::sin(t1 - t2), cd = std::cos(t1 - t2), r2 = std::numbers::sqrt2;
  FockState s;
  s.add({{c_par, 1}, {d_par, 1}}, 0.5 * sd);
  s.add({{c_par, 1}, {d_perp, 1}}, 0.5 * cd);
  s.add({{c_perp, 1}, {d_par, 1}}, -0.5 * cd);
  s.add({{c_perp, 1}, {d_perp, 1}}, 0.5 * sd);
  s.add({{c_par, 2}}, 0.5 * i * std::sin(2 * t1) / r2);
  s.add({{c_perp, 2}}, 0.5 * i * std::sin(2 * t1) / r2);
  s.add({{c_par, 1}, {c_perp, 1}}, -0.5 * i * std::cos(2 * t1));
  s.add({{d_par, 2}}, 0.5 * i * std::sin(2 * t2) / r2);
  s.add({{d_perp, 2}}, 0.5 * i * std::sin(2 * t2) / r2);
  s.add({{d_par, 1}, {d_perp, 1}}, -0.5 * i * std::cos(2 * t2));
  EXPECT_NEAR(norm(s), 1.0, 1e-12);
}

TEST(FockTest, ProbabilityOfAbsentKetIsZero) {
  EXPECT_EQ(probability_of(create(vacuum(), c_par), {{d_par, 1}}), 0.0);
}

TEST(FockTest, ProbabilityOfRejectsUnnormalizedState) {
  try {
    probability_of(create(create(vacuum(), c_par), c_par), {{c_par, 2}});
    FAIL() << "expected not-normalized";
  } catch (const error& e) {
    EXPECT_EQ(e.code(), errc::not_normalized);
  }
}

TEST(FockTest, TermsCancellingBelowToleranceArePruned) {
  FockState s;
  s.add({{c_par, 1}}, 0.5);
  s.add({{c_par, 1}}, -0.5);
  EXPECT_TRUE(s.empty());
  s.add({{d_par, 1}}, 1e-16);
  EXPECT_TRUE(s.empty());
}

TEST(FockTest, OccupationVectorIsCanonical) {
  const OccupationVector a{{d_perp, 1}, {c_par, 1}};
  const OccupationVector b{{c_par, 1}, {d_perp, 1}};
  EXPECT_EQ(a, b);
  EXPECT_EQ(a.total(), 2);
  EXPECT_EQ(a.count(c_par), 1);
  EXPECT_EQ(a.count(c_perp), 0);
}

TEST(FockTest, RenderingIsSortedAndDeterministic) {
  FockState s;
  s.add({{d_perp, 1}, {c_par, 1}}, 0.5);
  s.add({{c_par, 2}}, amplitude(0.0, -0.25));
  s.add({{c_par, 1}, {c_perp, 1}}, amplitude(0.0, 0.5));
  EXPECT_EQ(to_string(s), "(0+0.5i)|c∥,c⊥⟩ + (0.5+0i)|c∥,d⊥⟩ + (0-0.25i)|2c∥⟩");
  EXPECT_EQ(to_string(modes::c_par.loss_ancilla()), "r(c∥)");
}

// Property: create is linear for random small states.
TEST(FockProperty, CreateIsLinear) {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  const ModeId pool[] = {a1x, cx, c_par, c_perp, d_par, d_perp};
  for (int trial = 0; trial < 200; ++trial) {
    FockState s1, s2;
    for (int k = 0; k < 3; ++k) {
      s1.add({{pool[rng() % 6], 1}}, {u(rng), u(rng)});
      s2.add({{pool[rng() % 6], 1}}, {u(rng), u(rng)});
    }
    s1.add({}, {u(rng), u(rng)});
    const amplitude a{u(rng), u(rng)}, b{u(rng), u(rng)};
    const ModeId m = pool[rng() % 6];
    const FockState lhs = create(a * s1 + b * s2, m);
    const FockState rhs = a * create(s1, m) + b * create(s2, m);
    for (const auto& [occ, amp] : lhs.terms()) EXPECT_NEAR(std::abs(amp - rhs.amplitude_of(occ)), 0.0, 1e-12);
    for (const auto& [occ, amp] : rhs.terms()) EXPECT_NEAR(std::abs(amp - lhs.amplitude_of(occ)), 0.0, 1e-12);
  }
}

TEST(FockProperty, ProbabilitiesOfNormalizedStateSumToOne) {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  const ModeId pool[] = {c_par, c_perp, d_par, d_perp};
  for (int trial = 0; trial < 100; ++trial) {
    FockState s;
    for (int k = 0; k < 6; ++k) {
      s.add({{pool[rng() % 4], 1}, {pool[rng() % 4], 1}}, {u(rng), u(rng)});
    }
    s = amplitude(1.0 / norm(s)) * s;
    double total = 0.0;
    for (const auto& [occ, amp] : s.terms()) total += probability_of(s, occ);
    EXPECT_NEAR(total, 1.0, 1e-12);
  }
}

}  // namespace
}  // namespace bellsim
