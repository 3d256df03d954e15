#pragma once

// Correlation functions and the CHSH combination.

#include <array>
#include <cmath>
#include <numbers>
#include <string_view>

#include "bellsim/detection.hpp"

namespace bellsim {

/// Analyzer phases. Polarizer angles follow 2θ_k = (-1)^(k-1) ψ_k, i.e.
/// ψ1 = 2θ1 and ψ2 = -2θ2. Both directions are exact in binary floating point.
struct PsiAngles {
  double psi1 = 0.0;
  double psi2 = 0.0;

  static constexpr PsiAngles from_thetas(double theta1, double theta2) { return {2.0 * theta1, -2.0 * theta2}; }
  constexpr double theta1() const { return psi1 / 2.0; }
  constexpr double theta2() const { return -psi2 / 2.0; }
};

/// Wraps x into [lo, lo + 2π).
inline double wrap_angle(double x, double lo = 0.0) {
  constexpr double two_pi = 2.0 * std::numbers::pi;
  double r = std::fmod(x - lo, two_pi);
  if (r < 0.0) r += two_pi;
  if (r >= two_pi) r -= two_pi;
  return lo + r;
}

enum class SettingLabel : int { AB = 0, ApB = 1, ABp = 2, ApBp = 3 };

inline constexpr std::array<SettingLabel, 4> kSettingLabels{SettingLabel::AB, SettingLabel::ApB, SettingLabel::ABp,
                                                            SettingLabel::ApBp};

constexpr std::string_view to_string(SettingLabel s) {
  switch (s) {
    case SettingLabel::AB: return "AB";
    case SettingLabel::ApB: return "A'B";
    case SettingLabel::ABp: return "AB'";
    case SettingLabel::ApBp: return "A'B'";
  }
  return "?";
}

/// +1 for the three added terms of CHSH, -1 for the subtracted one.
constexpr int chsh_sign(SettingLabel s) { return s == SettingLabel::ApBp ? -1 : 1; }

struct ChshSettings {
  double psi1 = 0.0;
  double psi1p = 0.0;
  double psi2 = 0.0;
  double psi2p = 0.0;

  constexpr PsiAngles at(SettingLabel s) const {
    switch (s) {
      case SettingLabel::AB: return {psi1, psi2};
      case SettingLabel::ApB: return {psi1p, psi2};
      case SettingLabel::ABp: return {psi1, psi2p};
      case SettingLabel::ApBp: return {psi1p, psi2p};
    }
    return {};
  }

  constexpr std::array<double, 4> as_array() const { return {psi1, psi1p, psi2, psi2p}; }
  static constexpr ChshSettings from_array(const std::array<double, 4>& x) { return {x[0], x[1], x[2], x[3]}; }

  /// Reporting form: ψ1, ψ1', ψ2' in [0, 2π) and ψ2 in [-π, π).
  ChshSettings canonical() const {
    return {wrap_angle(psi1), wrap_angle(psi1p), wrap_angle(psi2, -std::numbers::pi), wrap_angle(psi2p)};
  }

  /// Settings reaching 1 + √2 with ideal detectors and full double-click
  /// discrimination: cos(ψ1 + ψ2) = -1/√2 on the three added terms and
  /// +1/√2 on the subtracted one.
  static ChshSettings standard_optimal() {
    constexpr double pi = std::numbers::pi;
    return {0.0, pi / 2.0, 3.0 * pi / 4.0, 5.0 * pi / 4.0};
  }
};

enum class Route { closed_form, table };

/// E = Σ_ij a_i b_j p_ij.
inline double correlation_from_table(const JointProbabilityTable& t,
                                     const ValueAssignment& v = ValueAssignment::standard()) {
  double e = 0.0;
  for (int i = 0; i < kOutcomeCount; ++i)
    for (int j = 0; j < kOutcomeCount; ++j) e += v.a[i] * v.b[j] * t.p[i][j];
  return e;
}

/// η²[-½cos(ψ1+ψ2) + ½α + ¼(1-α)(cos²ψ1 + cos²ψ2)] + (1-η)².
inline double correlation_closed_form(PsiAngles psi, const DetectorModel& model) {
  model.validate();
  const double a = model.alpha, eta = model.eta;
  const double c1 = std::cos(psi.psi1), c2 = std::cos(psi.psi2);
  const double ideal = -0.5 * std::cos(psi.psi1 + psi.psi2) + 0.5 * a + 0.25 * (1.0 - a) * (c1 * c1 + c2 * c2);
  return eta * eta * ideal + (1.0 - eta) * (1.0 - eta);
}

inline double correlation(PsiAngles psi, const DetectorModel& model, Route route = Route::closed_form) {
  if (route == Route::closed_form) return correlation_closed_form(psi, model);
  return correlation_from_table(joint_table(psi.theta1(), psi.theta2(), model));
}

inline double chsh(const ChshSettings& s, const DetectorModel& model, Route route = Route::closed_form) {
  double sum = 0.0;
  for (SettingLabel label : kSettingLabels) sum += chsh_sign(label) * correlation(s.at(label), model, route);
  return sum;
}

/// Probabilities of both photons arriving at the same station (ideal detectors).
struct HomPortProbabilities {
  double p43 = 0.0;  // station 1: one photon in each port
  double p34 = 0.0;
  double p53 = 0.0;  // station 1: both in D+
  double p63 = 0.0;  // station 1: both in D-
  double p35 = 0.0;
  double p36 = 0.0;

  double total() const { return p43 + p34 + p53 + p63 + p35 + p36; }
};

inline HomPortProbabilities hom_port_probabilities(double theta1, double theta2) {
  using enum StationOutcome;
  const JointProbabilityTable t = joint_table(theta1, theta2, 1.0);
  return {t(coincidence, nothing), t(nothing, coincidence), t(double_plus, nothing),
          t(double_minus, nothing), t(nothing, double_plus), t(nothing, double_minus)};
}

}  // namespace bellsim
