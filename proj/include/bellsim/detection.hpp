#pragma once

// Per-station outcome classes, joint probability tables and the
// double-click confusion channel.

#include <array>
#include <cmath>
#include <string>
#include <utility>

#include "bellsim/error.hpp"
#include "bellsim/fock.hpp"
#include "bellsim/optics.hpp"

namespace bellsim {

/// Outcome classes at one station; D+ is the parallel port, D- the perpendicular one.
enum class StationOutcome : int {
  single_minus = 1,  // one photon in D-, none in D+
  single_plus = 2,   // one photon in D+, none in D-
  nothing = 3,
  coincidence = 4,   // one photon in each of D+ and D-
  double_plus = 5,   // two photons in D+
  double_minus = 6,  // two photons in D-
};

inline constexpr int kOutcomeCount = 6;

constexpr int index_of(StationOutcome o) { return static_cast<int>(o) - 1; }
constexpr StationOutcome outcome_at(int index) { return static_cast<StationOutcome>(index + 1); }
constexpr int label_of(StationOutcome o) { return static_cast<int>(o); }

inline StationOutcome outcome_from_label(int label) {
  if (label < 1 || label > kOutcomeCount) {
    throw error(errc::bad_argument, "outcome label must be 1..6, got " + std::to_string(label));
  }
  return static_cast<StationOutcome>(label);
}

using OutcomePair = std::pair<StationOutcome, StationOutcome>;

inline StationOutcome classify_counts(int plus, int minus) {
  if (plus + minus > 2) {
    throw error(errc::impossible_count, std::to_string(plus + minus) + " photons at one station");
  }
  if (plus == 0 && minus == 0) return StationOutcome::nothing;
  if (plus == 0 && minus == 1) return StationOutcome::single_minus;
  if (plus == 1 && minus == 0) return StationOutcome::single_plus;
  if (plus == 1 && minus == 1) return StationOutcome::coincidence;
  if (plus == 2) return StationOutcome::double_plus;
  return StationOutcome::double_minus;
}

/// Maps an occupation of the detected modes to the two stations' classes.
/// Photons in loss ancillas are never seen and are ignored.
inline OutcomePair classify(const OccupationVector& occ) {
  int plus[2] = {0, 0}, minus[2] = {0, 0};
  for (const auto& e : occ.entries()) {
    if (e.mode.ancilla) continue;
    if (!e.mode.is_detected()) {
      throw error(errc::unknown_mode, to_string(e.mode) + " is not a detected mode");
    }
    const int s = e.mode.station() - 1;
    (e.mode.channel == Channel::parallel ? plus[s] : minus[s]) += e.count;
  }
  return {classify_counts(plus[0], minus[0]), classify_counts(plus[1], minus[1])};
}

struct DetectorModel {
  double alpha = 1.0;  // probability that a double click is recognized as such
  double eta = 1.0;    // detector efficiency

  void validate() const {
    check_alpha(alpha);
    check_efficiency(eta);
  }
};

struct JointProbabilityTable {
  std::array<std::array<double, kOutcomeCount>, kOutcomeCount> p{};
  double theta1 = 0.0;
  double theta2 = 0.0;
  double eta = 1.0;
  double alpha = 1.0;

  double& operator()(StationOutcome i, StationOutcome j) { return p[index_of(i)][index_of(j)]; }
  double operator()(StationOutcome i, StationOutcome j) const { return p[index_of(i)][index_of(j)]; }

  /// Entry by the 1-based class labels.
  double at(int i, int j) const { return p.at(i - 1).at(j - 1); }

  double total() const {
    double sum = 0.0;
    for (const auto& row : p)
      for (double v : row) sum += v;
    return sum;
  }
};

/// Joint outcome distribution at polarizer angles (theta1, theta2), built by
/// summing Born probabilities of the loss-expanded final state per class pair.
inline JointProbabilityTable joint_table(double theta1, double theta2, double eta) {
  const FockState state = build_experiment_state({theta1, theta2, eta, true});
  JointProbabilityTable t;
  t.theta1 = theta1;
  t.theta2 = theta2;
  t.eta = eta;
  t.alpha = 1.0;
  for (const auto& [occ, amp] : state.terms()) {
    const auto [o1, o2] = classify(occ);
    t(o1, o2) += probability_of(state, occ);
  }
  return t;
}

/// Per-station relabeling of unrecognized double clicks: class 6 is read as 1
/// and class 5 as 2, each with probability 1 - alpha.
inline std::array<std::array<double, kOutcomeCount>, kOutcomeCount> confusion_matrix(double alpha) {
  std::array<std::array<double, kOutcomeCount>, kOutcomeCount> m{};
  for (int i = 0; i < kOutcomeCount; ++i) m[i][i] = 1.0;
  m[index_of(StationOutcome::double_minus)][index_of(StationOutcome::double_minus)] = alpha;
  m[index_of(StationOutcome::double_minus)][index_of(StationOutcome::single_minus)] = 1.0 - alpha;
  m[index_of(StationOutcome::double_plus)][index_of(StationOutcome::double_plus)] = alpha;
  m[index_of(StationOutcome::double_plus)][index_of(StationOutcome::single_plus)] = 1.0 - alpha;
  return m;
}

inline JointProbabilityTable apply_alpha_confusion(const JointProbabilityTable& t, double alpha) {
  check_alpha(alpha);
  if (t.alpha != 1.0) {
    throw error(errc::bad_argument, "confusion must be applied to an unconfused (alpha = 1) table");
  }
  const auto m = confusion_matrix(alpha);
  JointProbabilityTable out = t;
  out.alpha = alpha;
  for (auto& row : out.p) row.fill(0.0);
  for (int i = 0; i < kOutcomeCount; ++i)
    for (int j = 0; j < kOutcomeCount; ++j) {
      if (t.p[i][j] == 0.0) continue;
      for (int k = 0; k < kOutcomeCount; ++k)
        for (int l = 0; l < kOutcomeCount; ++l) out.p[k][l] += m[i][k] * m[j][l] * t.p[i][j];
    }
  return out;
}

/// Joint table with both efficiency and double-click confusion applied.
inline JointProbabilityTable joint_table(double theta1, double theta2, const DetectorModel& model) {
  model.validate();
  return apply_alpha_confusion(joint_table(theta1, theta2, model.eta), model.alpha);
}

/// ±1 value attached to each outcome class at either station.
struct ValueAssignment {
  std::array<int, kOutcomeCount> a{};
  std::array<int, kOutcomeCount> b{};

  /// Class 1 (lone D- click) scores -1 at both stations, everything else +1.
  static ValueAssignment standard() {
    ValueAssignment v;
    v.a.fill(1);
    v.b.fill(1);
    v.a[index_of(StationOutcome::single_minus)] = -1;
    v.b[index_of(StationOutcome::single_minus)] = -1;
    return v;
  }
};

inline int assigned_value(const ValueAssignment& v, StationOutcome outcome, int station) {
  if (station != 1 && station != 2) throw error(errc::bad_argument, "station must be 1 or 2");
  return station == 1 ? v.a[index_of(outcome)] : v.b[index_of(outcome)];
}

/// Closed-form joint table for ideal detectors scaled to efficiency eta:
/// eta² times the two-detected distribution, ½η(1-η) for each lone click with
/// the partner photon lost, and (1-η)² for no click at all.
inline JointProbabilityTable closed_form_table(double theta1, double theta2, double eta = 1.0) {
  check_efficiency(eta);
  using enum StationOutcome;
  JointProbabilityTable t;
  t.theta1 = theta1;
  t.theta2 = theta2;
  t.eta = eta;
  const double e2 = eta * eta;
  const double c = std::cos(2.0 * (theta1 - theta2));
  const double s1 = std::sin(2.0 * theta1), s2 = std::sin(2.0 * theta2);
  const double c1 = std::cos(2.0 * theta1), c2 = std::cos(2.0 * theta2);
  t(single_minus, single_minus) = t(single_plus, single_plus) = e2 * (1.0 - c) / 8.0;
  t(single_plus, single_minus) = t(single_minus, single_plus) = e2 * (1.0 + c) / 8.0;
  t(double_plus, nothing) = t(double_minus, nothing) = e2 * s1 * s1 / 8.0;
  t(nothing, double_plus) = t(nothing, double_minus) = e2 * s2 * s2 / 8.0;
  t(coincidence, nothing) = e2 * c1 * c1 / 4.0;
  t(nothing, coincidence) = e2 * c2 * c2 / 4.0;
  const double one_lost = 0.5 * eta * (1.0 - eta);
  t(single_minus, nothing) = t(single_plus, nothing) = one_lost;
  t(nothing, single_minus) = t(nothing, single_plus) = one_lost;
  t(nothing, nothing) = (1.0 - eta) * (1.0 - eta);
  return t;
}

/// Cells that carry probability with ideal detectors.
inline bool is_ideal_cell(StationOutcome i, StationOutcome j) {
  using enum StationOutcome;
  const bool singles = (i == single_minus || i == single_plus) && (j == single_minus || j == single_plus);
  const bool station1_pair = (i == coincidence || i == double_plus || i == double_minus) && j == nothing;
  const bool station2_pair = i == nothing && (j == coincidence || j == double_plus || j == double_minus);
  return singles || station1_pair || station2_pair;
}

}  // namespace bellsim
