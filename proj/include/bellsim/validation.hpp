#pragma once

// Self-check suite behind `bellsim validate`: each check exercises one
// property of the library over randomized or gridded inputs.

#include <algorithm>
#include <cmath>
#include <functional>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "bellsim/bellsim.hpp"

namespace bellsim::validation {

struct CheckResult {
  std::string name;
  bool passed = false;
  std::string detail;
};

namespace detail {

inline std::string fmt(double x) {
  std::ostringstream os;
  os.precision(3);
  os << x;
  return os.str();
}

inline double max_amplitude_gap(const FockState& a, const FockState& b) {
  double gap = 0.0;
  for (const auto& [occ, amp] : a.terms()) gap = std::max(gap, std::abs(amp - b.amplitude_of(occ)));
  for (const auto& [occ, amp] : b.terms()) gap = std::max(gap, std::abs(amp - a.amplitude_of(occ)));
  return gap;
}

inline CheckResult bounded(std::string name, double worst, double tol) {
  return {std::move(name), worst <= tol, "max deviation " + fmt(worst) + " (tol " + fmt(tol) + ")"};
}

}  // namespace detail

inline std::vector<CheckResult> run_all(std::uint64_t seed = 20260101) {
  using detail::bounded;
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> angle(-std::numbers::pi, std::numbers::pi);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::vector<CheckResult> out;

  {  // create is linear
    double worst = 0.0;
    for (int k = 0; k < 50; ++k) {
      FockState s1, s2;
      s1.add({{modes::c_par, 1}}, {unit(rng), unit(rng)});
      s1.add({}, {unit(rng), unit(rng)});
      s2.add({{modes::d_perp, 1}}, {unit(rng), unit(rng)});
      s2.add({{modes::c_par, 1}}, {unit(rng), unit(rng)});
      const amplitude a{unit(rng), unit(rng)}, b{unit(rng), unit(rng)};
      const FockState lhs = create(a * s1 + b * s2, modes::c_par);
      const FockState rhs = a * create(s1, modes::c_par) + b * create(s2, modes::c_par);
      worst = std::max(worst, detail::max_amplitude_gap(lhs, rhs));
    }
    out.push_back(bounded("fock: create is linear", worst, 1e-12));
  }
  {
    const double same = norm(create(create(vacuum(), modes::c_par), modes::c_par));
    const double distinct = norm(create(create(vacuum(), modes::c_par), modes::d_par));
    out.push_back(bounded("fock: bosonic factor sqrt(2) / 1",
                          std::max(std::abs(same - std::numbers::sqrt2), std::abs(distinct - 1.0)), 1e-15));
  }
  {
    double worst_unitary = 0.0, worst_state = 0.0, worst_norm = 0.0, worst_order = 0.0, worst_prob = 0.0;
    worst_unitary = std::max(worst_unitary, beamsplitter_5050().unitarity_defect());
    const FockState after_bs = apply(beamsplitter_5050(), initial_state());
    for (int k = 0; k < 100; ++k) {
      const double t1 = angle(rng), t2 = angle(rng), eta = 0.05 + 0.95 * unit(rng);
      worst_unitary = std::max({worst_unitary, polarizer_stage(t1, t2).unitarity_defect(),
                                loss_stage(eta).unitarity_defect()});
      const FockState ideal = build_experiment_state({t1, t2, 1.0, false});
      worst_state = std::max(worst_state, detail::max_amplitude_gap(ideal, closed_form_final_state(t1, t2)));
      const FockState lossy = build_experiment_state({t1, t2, eta, true});
      worst_norm = std::max(worst_norm, std::abs(norm(lossy) - 1.0));
      double total = 0.0;
      for (const auto& [occ, amp] : lossy.terms()) total += probability_of(lossy, occ);
      worst_prob = std::max(worst_prob, std::abs(total - 1.0));
      const auto id_c = ModeTransform::identity({modes::cx, modes::cy});
      const auto id_d = ModeTransform::identity({modes::d_par, modes::d_perp});
      const auto id_cp = ModeTransform::identity({modes::c_par, modes::c_perp});
      const auto id_dx = ModeTransform::identity({modes::dx, modes::dy});
      const FockState one_then_two =
          apply(direct_sum(id_cp, polarizer_rotation(2, t2)),
                apply(direct_sum(polarizer_rotation(1, t1), id_dx), after_bs));
      const FockState two_then_one =
          apply(direct_sum(polarizer_rotation(1, t1), id_d),
                apply(direct_sum(id_c, polarizer_rotation(2, t2)), after_bs));
      worst_order = std::max(worst_order, detail::max_amplitude_gap(one_then_two, two_then_one));
    }
    out.push_back(bounded("optics: transforms are unitary", worst_unitary, 1e-12));
    out.push_back(bounded("optics: ideal final state matches closed form", worst_state, 1e-12));
    out.push_back(bounded("optics: polarizer order independence", worst_order, 1e-12));
    out.push_back(bounded("optics: final state normalized", worst_norm, 1e-12));
    out.push_back(bounded("fock: Born probabilities sum to 1", worst_prob, 1e-12));
  }
  {
    double worst_ideal = 0.0, worst_sym = 0.0, worst_total = 0.0, worst_33 = 0.0, worst_cancel = 0.0,
           worst_alpha = 0.0, worst_loss = 0.0, worst_oracle = 0.0, min_entry = 0.0, worst_bound = 0.0;
    for (int k = 0; k < 200; ++k) {
      const double t1 = angle(rng), t2 = angle(rng), eta = 0.05 + 0.95 * unit(rng), alpha = unit(rng);
      const JointProbabilityTable ideal = joint_table(t1, t2, 1.0);
      const JointProbabilityTable expected = closed_form_table(t1, t2, 1.0);
      for (int i = 0; i < kOutcomeCount; ++i)
        for (int j = 0; j < kOutcomeCount; ++j) worst_ideal = std::max(worst_ideal, std::abs(ideal.p[i][j] - expected.p[i][j]));
      const JointProbabilityTable raw = joint_table(t1, t2, eta);
      const JointProbabilityTable t = apply_alpha_confusion(raw, alpha);
      using enum StationOutcome;
      worst_sym = std::max({worst_sym, std::abs(raw(double_plus, nothing) - raw(double_minus, nothing)),
                            std::abs(raw(nothing, double_plus) - raw(nothing, double_minus))});
      worst_cancel = std::max({worst_cancel, std::abs(t(single_minus, nothing) - t(single_plus, nothing)),
                               std::abs(t(nothing, single_minus) - t(nothing, single_plus))});
      worst_total = std::max({worst_total, std::abs(t.total() - 1.0), std::abs(raw.total() - 1.0)});
      worst_33 = std::max(worst_33, std::abs(t(nothing, nothing) - (1.0 - eta) * (1.0 - eta)));
      for (const auto& row : t.p)
        for (double v : row) min_entry = std::min(min_entry, v);
      // Confusion only moves mass 6 -> 1 and 5 -> 2 within each station.
      const auto merged = [](const JointProbabilityTable& x, int i) {
        double m = 0.0;
        for (int j = 0; j < kOutcomeCount; ++j) m += x.p[i][j];
        return m;
      };
      worst_alpha = std::max({worst_alpha, std::abs((merged(raw, 0) + merged(raw, 5)) - (merged(t, 0) + merged(t, 5))),
                              std::abs((merged(raw, 1) + merged(raw, 4)) - (merged(t, 1) + merged(t, 4))),
                              std::abs(merged(raw, 2) - merged(t, 2)), std::abs(merged(raw, 3) - merged(t, 3))});
      const PsiAngles psi = PsiAngles::from_thetas(t1, t2);
      const double e_table = correlation_from_table(t);
      const double e_ideal = correlation_from_table(apply_alpha_confusion(ideal, alpha));
      worst_loss = std::max(worst_loss, std::abs(e_table - (eta * eta * e_ideal + (1.0 - eta) * (1.0 - eta))));
      worst_oracle = std::max(worst_oracle, std::abs(e_table - correlation_closed_form(psi, {alpha, eta})));
      worst_bound = std::max(worst_bound, std::abs(e_table) - 1.0);
    }
    out.push_back(bounded("detection: ideal table matches closed form", worst_ideal, 1e-12));
    out.push_back(bounded("detection: p53 = p63 and p35 = p36", worst_sym, 1e-12));
    out.push_back(bounded("detection: lone clicks cancel (p13 = p23, p31 = p32)", worst_cancel, 1e-12));
    out.push_back(bounded("detection: tables sum to 1", worst_total, 1e-12));
    out.push_back(bounded("detection: p33 = (1-eta)^2", worst_33, 1e-12));
    out.push_back(bounded("detection: entries nonnegative", -min_entry, 0.0));
    out.push_back(bounded("detection: confusion preserves merged marginals", worst_alpha, 1e-12));
    out.push_back(bounded("bell: table and closed-form correlations agree", worst_oracle, 1e-10));
    out.push_back(bounded("bell: E(eta) = eta^2 E(1) + (1-eta)^2", worst_loss, 1e-10));
    out.push_back(bounded("bell: |E| <= 1", std::max(0.0, worst_bound), 1e-12));
  }
  {
    double worst_period = 0.0, worst_chsh = 0.0;
    for (int k = 0; k < 500; ++k) {
      const ChshSettings s{angle(rng), angle(rng), angle(rng), angle(rng)};
      const DetectorModel m{unit(rng), 0.05 + 0.95 * unit(rng)};
      const PsiAngles p{s.psi1, s.psi2};
      worst_period = std::max({worst_period,
                               std::abs(correlation_closed_form(p, m) -
                                        correlation_closed_form({p.psi1 + 2.0 * std::numbers::pi, p.psi2}, m)),
                               std::abs(correlation_closed_form(p, m) -
                                        correlation_closed_form({p.psi1, p.psi2 - 2.0 * std::numbers::pi}, m))});
      worst_chsh = std::max(worst_chsh, chsh(s, {1.0, 1.0}) - (1.0 + std::numbers::sqrt2));
    }
    out.push_back(bounded("bell: E is 2pi-periodic", worst_period, 1e-12));
    out.push_back(bounded("bell: ideal CHSH never exceeds 1 + sqrt(2)", std::max(0.0, worst_chsh), 1e-9));
  }
  {
    SamplerConfig cfg;
    cfg.seed = seed;
    cfg.n_per_setting = 100000;
    cfg.model = {0.3, 0.9};
    cfg.settings = ChshSettings::standard_optimal();
    const auto a = sample_setting(cfg, SettingLabel::AB);
    const auto b = sample_setting(cfg, SettingLabel::AB);
    out.push_back({"montecarlo: fixed seed is deterministic", a == b, a == b ? "identical" : "sequences differ"});
    const PsiAngles psi = cfg.settings.at(SettingLabel::AB);
    const JointProbabilityTable expected = joint_table(psi.theta1(), psi.theta2(), cfg.model.eta);
    const JointProbabilityTable seen = empirical_table(a);
    double worst = 0.0;
    for (int i = 0; i < kOutcomeCount; ++i)
      for (int j = 0; j < kOutcomeCount; ++j) worst = std::max(worst, std::abs(seen.p[i][j] - expected.p[i][j]));
    out.push_back(bounded("montecarlo: empirical table converges", worst, 5.0 / std::sqrt(100000.0)));
  }
  {
    std::vector<double> maxima;
    bool bound_ok = true, reeval_ok = true;
    for (double alpha : {0.0, 0.25, 0.5, 0.75, 1.0}) {
      const OptimizationResult r = maximize_chsh({alpha, 1.0});
      maxima.push_back(r.best_value);
      bound_ok = bound_ok && r.best_value <= 2.0 * std::numbers::sqrt2 + 1e-9;
      reeval_ok = reeval_ok && std::abs(chsh(r.settings, {alpha, 1.0}) - r.best_value) <= 1e-9;
    }
    const bool monotone = std::is_sorted(maxima.begin(), maxima.end(), [](double x, double y) { return x < y - 1e-9; });
    out.push_back({"optimize: max CHSH non-decreasing in alpha", monotone,
                   "values " + detail::fmt(maxima.front()) + " .. " + detail::fmt(maxima.back())});
    out.push_back({"optimize: value within algebraic bound", bound_ok, bound_ok ? "ok" : "bound exceeded"});
    out.push_back({"optimize: settings reproduce value", reeval_ok, reeval_ok ? "ok" : "stale value"});
  }
  return out;
}

}  // namespace bellsim::validation
