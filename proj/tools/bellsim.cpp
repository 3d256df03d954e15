// bellsim: command-line front end for the two-photon Bell experiment model.
//
// Exit status: 0 success, 1 failed validation or runtime error, 2 usage error.

#include <cmath>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <numbers>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "bellsim/bellsim.hpp"
#include "bellsim/io.hpp"
#include "bellsim/validation.hpp"

namespace {

using namespace bellsim;
using io::json;
using io::number;

constexpr int kExitOk = 0;
constexpr int kExitFailure = 1;
constexpr int kExitUsage = 2;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

enum class Format { json, csv };

struct Common {
  bool degrees = false;
  std::string format = "json";

  double angle(double x) const { return degrees ? x * std::numbers::pi / 180.0 : x; }

  Format fmt() const {
    if (format == "json") return Format::json;
    if (format == "csv") return Format::csv;
    throw UsageError("unknown format '" + format + "' (expected json or csv)");
  }
};

void emit(const json& envelope) { std::cout << envelope.dump(2) << '\n'; }

/// Thresholds quoted for the original experiment, keyed by alpha.
std::optional<double> reference_threshold(double alpha) {
  static const std::map<double, double> table{{0.0, 0.926}, {0.5, 0.92}, {0.75, 0.92}, {0.875, 0.91}, {1.0, 0.91}};
  auto it = table.find(alpha);
  if (it == table.end()) return std::nullopt;
  return it->second;
}

void add_angle_flag(CLI::App* cmd, Common& c) {
  cmd->add_flag("--degrees", c.degrees, "Interpret input angles as degrees (outputs stay in radians)");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Two-photon Bell experiment simulator: joint tables, correlations, CHSH, thresholds, sampling"};
  app.require_subcommand(1);
  Common common;
  std::function<int()> action;

  // probs
  double p_theta1 = 0.0, p_theta2 = 0.0, p_eta = 1.0, p_alpha = 1.0;
  auto* probs = app.add_subcommand("probs", "Joint outcome table P(i, theta1; j, theta2) with closed-form comparison");
  probs->add_option("--theta1", p_theta1, "Station-1 polarizer angle")->required();
  probs->add_option("--theta2", p_theta2, "Station-2 polarizer angle")->required();
  probs->add_option("--eta", p_eta, "Detector efficiency in (0, 1]")->capture_default_str();
  probs->add_option("--alpha", p_alpha, "Double-click distinguishability in [0, 1]")->capture_default_str();
  probs->add_option("--format", common.format, "json or csv")->capture_default_str();
  add_angle_flag(probs, common);
  probs->callback([&] {
    action = [&] {
      const Format f = common.fmt();
      const double t1 = common.angle(p_theta1), t2 = common.angle(p_theta2);
      check_alpha(p_alpha);
      const JointProbabilityTable raw = joint_table(t1, t2, p_eta);
      const JointProbabilityTable table = apply_alpha_confusion(raw, p_alpha);
      if (f == Format::csv) {
        io::write_table_csv(std::cout, table);
        return kExitOk;
      }
      const JointProbabilityTable closed = closed_form_table(t1, t2, p_eta);
      double deviation = 0.0;
      for (int i = 0; i < kOutcomeCount; ++i)
        for (int j = 0; j < kOutcomeCount; ++j) deviation = std::max(deviation, std::abs(raw.p[i][j] - closed.p[i][j]));
      json params{{"theta1", number(t1)}, {"theta2", number(t2)}, {"eta", number(p_eta)}, {"alpha", number(p_alpha)}};
      json results{{"table", io::table_records(table)},
                   {"closed_form", io::table_records(closed)},
                   {"max_deviation", number(deviation)}};
      emit(io::envelope("probs", std::move(params), std::move(results)));
      return kExitOk;
    };
  });

  // correlation
  double c_psi1 = 0.0, c_psi2 = 0.0, c_eta = 1.0, c_alpha = 1.0;
  auto* corr = app.add_subcommand("correlation", "Correlation E(psi1, psi2) by closed form and by joint table");
  corr->add_option("--psi1", c_psi1)->required();
  corr->add_option("--psi2", c_psi2)->required();
  corr->add_option("--eta", c_eta)->capture_default_str();
  corr->add_option("--alpha", c_alpha)->capture_default_str();
  add_angle_flag(corr, common);
  corr->callback([&] {
    action = [&] {
      const PsiAngles psi{common.angle(c_psi1), common.angle(c_psi2)};
      const DetectorModel m{c_alpha, c_eta};
      const double closed = correlation(psi, m, Route::closed_form);
      const double table = correlation(psi, m, Route::table);
      json params{{"psi1", number(psi.psi1)}, {"psi2", number(psi.psi2)}, {"eta", number(c_eta)},
                  {"alpha", number(c_alpha)}};
      json results{{"theta1", number(psi.theta1())}, {"theta2", number(psi.theta2())},
                   {"closed_form", number(closed)}, {"table", number(table)}, {"difference", number(table - closed)}};
      emit(io::envelope("correlation", std::move(params), std::move(results)));
      return kExitOk;
    };
  });

  // chsh
  ChshSettings h_settings;
  double h_eta = 1.0, h_alpha = 1.0;
  auto* chsh_cmd = app.add_subcommand("chsh", "Evaluate the CHSH combination at four analyzer phases");
  chsh_cmd->add_option("--psi1", h_settings.psi1)->required();
  chsh_cmd->add_option("--psi1p", h_settings.psi1p, "psi1'")->required();
  chsh_cmd->add_option("--psi2", h_settings.psi2)->required();
  chsh_cmd->add_option("--psi2p", h_settings.psi2p, "psi2'")->required();
  chsh_cmd->add_option("--eta", h_eta)->capture_default_str();
  chsh_cmd->add_option("--alpha", h_alpha)->capture_default_str();
  add_angle_flag(chsh_cmd, common);
  chsh_cmd->callback([&] {
    action = [&] {
      const ChshSettings s{common.angle(h_settings.psi1), common.angle(h_settings.psi1p),
                           common.angle(h_settings.psi2), common.angle(h_settings.psi2p)};
      const DetectorModel m{h_alpha, h_eta};
      const double closed = chsh(s, m, Route::closed_form);
      const double table = chsh(s, m, Route::table);
      json params = io::settings_json(s);
      params["eta"] = number(h_eta);
      params["alpha"] = number(h_alpha);
      json results{{"chsh", number(closed)},
                   {"chsh_table", number(table)},
                   {"margin", number(closed - kLocalRealismBound)},
                   {"violates", closed > kLocalRealismBound}};
      emit(io::envelope("chsh", std::move(params), std::move(results)));
      return kExitOk;
    };
  });

  // optimize
  double o_eta = 1.0, o_alpha = 1.0, o_tol = kDefaultSimplexTolerance;
  int o_starts = kDefaultStarts;
  auto* opt = app.add_subcommand("optimize", "Maximize CHSH over the four analyzer phases");
  opt->add_option("--eta", o_eta)->capture_default_str();
  opt->add_option("--alpha", o_alpha)->capture_default_str();
  opt->add_option("--starts", o_starts, "Multistart count")->capture_default_str();
  opt->add_option("--tol", o_tol, "Simplex spread tolerance")->capture_default_str();
  opt->callback([&] {
    action = [&] {
      OptimizeOptions opts;
      opts.starts = o_starts;
      opts.tol = o_tol;
      const OptimizationResult r = maximize_chsh({o_alpha, o_eta}, opts);
      json params{{"eta", number(o_eta)}, {"alpha", number(o_alpha)}, {"starts", o_starts}, {"tol", number(o_tol)}};
      json results{{"best_value", number(r.best_value)}, {"table_value", number(r.table_value)},
                   {"settings", io::settings_json(r.settings)}, {"starts_used", r.starts_used},
                   {"converged", r.converged}};
      emit(io::envelope("optimize", std::move(params), std::move(results)));
      return kExitOk;
    };
  });

  // critical-eta
  double k_alpha = 1.0, k_tol = kDefaultEfficiencyTolerance;
  auto* crit = app.add_subcommand("critical-eta", "Minimum detector efficiency for a CHSH violation");
  crit->add_option("--alpha", k_alpha)->capture_default_str();
  crit->add_option("--tol", k_tol, "Bisection tolerance in eta")->capture_default_str();
  crit->callback([&] {
    action = [&] {
      const ThresholdResult r = critical_efficiency(k_alpha, k_tol);
      json params{{"alpha", number(k_alpha)}, {"tol", number(k_tol)}};
      json results{{"eta_critical", number(r.eta_critical)},
                   {"bracket_width", number(r.bracket_width)},
                   {"eta_lower", number(r.eta_lower)},
                   {"eta_upper", number(r.eta_upper)},
                   {"settings_at_threshold", io::settings_json(r.settings_at_threshold)}};
      if (const auto ref = reference_threshold(k_alpha)) {
        results["reference"] = number(*ref);
        std::cerr << "eta_critical: " << io::format9(r.eta_critical) << "\nreference: " << *ref << '\n';
      }
      emit(io::envelope("critical-eta", std::move(params), std::move(results)));
      return kExitOk;
    };
  });

  // hom-scan
  int s_points = 50;
  double s_min = 0.0, s_max = std::numbers::pi / 2.0, s_theta2 = 0.0;
  auto* hom = app.add_subcommand("hom-scan", "Scan the same-station (two photons on one side) probabilities over theta1");
  hom->add_option("--points", s_points)->capture_default_str();
  hom->add_option("--theta-min", s_min)->capture_default_str();
  hom->add_option("--theta-max", s_max)->capture_default_str();
  hom->add_option("--theta2", s_theta2)->capture_default_str();
  hom->add_option("--format", common.format, "json or csv")->capture_default_str();
  add_angle_flag(hom, common);
  hom->callback([&] {
    action = [&] {
      if (s_points < 2) throw UsageError("--points must be at least 2");
      const Format f = common.fmt();
      const double lo = common.angle(s_min), hi = common.angle(s_max), t2 = common.angle(s_theta2);
      json rows = json::array();
      double min_p43 = INFINITY, argmin = lo;
      if (f == Format::csv) std::cout << "theta1,theta2,p43,p34,p53,p63,p35,p36\n";
      for (int k = 0; k < s_points; ++k) {
        const double t1 = lo + (hi - lo) * k / (s_points - 1);
        const HomPortProbabilities h = hom_port_probabilities(t1, t2);
        if (h.p43 < min_p43) min_p43 = h.p43, argmin = t1;
        if (f == Format::csv) {
          std::cout << io::format9(t1) << ',' << io::format9(t2) << ',' << io::format9(h.p43) << ','
                    << io::format9(h.p34) << ',' << io::format9(h.p53) << ',' << io::format9(h.p63) << ','
                    << io::format9(h.p35) << ',' << io::format9(h.p36) << '\n';
          continue;
        }
        rows.push_back(json{{"theta1", number(t1)}, {"p43", number(h.p43)}, {"p34", number(h.p34)},
                            {"p53", number(h.p53)}, {"p63", number(h.p63)}, {"p35", number(h.p35)},
                            {"p36", number(h.p36)}});
      }
      if (f == Format::csv) return kExitOk;
      json params{{"points", s_points}, {"theta_min", number(lo)}, {"theta_max", number(hi)}, {"theta2", number(t2)}};
      json results{{"rows", std::move(rows)}, {"min_p43", number(min_p43)}, {"argmin_theta1", number(argmin)}};
      emit(io::envelope("hom-scan", std::move(params), std::move(results)));
      return kExitOk;
    };
  });

  // sample
  SamplerConfig m_cfg;
  m_cfg.settings = ChshSettings::standard_optimal();
  std::string m_out;
  auto* sample = app.add_subcommand("sample", "Draw seeded detection events for the four CHSH settings");
  sample->add_option("--seed", m_cfg.seed)->capture_default_str();
  sample->add_option("--n", m_cfg.n_per_setting, "Events per setting")->capture_default_str();
  sample->add_option("--eta", m_cfg.model.eta)->capture_default_str();
  sample->add_option("--alpha", m_cfg.model.alpha)->capture_default_str();
  sample->add_option("--psi1", m_cfg.settings.psi1)->capture_default_str();
  sample->add_option("--psi1p", m_cfg.settings.psi1p)->capture_default_str();
  sample->add_option("--psi2", m_cfg.settings.psi2)->capture_default_str();
  sample->add_option("--psi2p", m_cfg.settings.psi2p)->capture_default_str();
  sample->add_option("--out", m_out, "CSV file for the event records")->required();
  add_angle_flag(sample, common);
  sample->callback([&] {
    action = [&] {
      SamplerConfig cfg = m_cfg;
      cfg.settings = {common.angle(cfg.settings.psi1), common.angle(cfg.settings.psi1p),
                      common.angle(cfg.settings.psi2), common.angle(cfg.settings.psi2p)};
      cfg.validate();
      const auto events = sample_events(cfg);
      std::ofstream file(m_out, std::ios::binary);
      if (!file) throw std::runtime_error("cannot open " + m_out + " for writing");
      write_events_csv(file, events);
      file.close();
      if (!file) throw std::runtime_error("failed writing " + m_out);
      const Estimate s = estimate_chsh(events);
      json params = io::settings_json(cfg.settings);
      params["seed"] = cfg.seed;
      params["n_per_setting"] = cfg.n_per_setting;
      params["eta"] = number(cfg.model.eta);
      params["alpha"] = number(cfg.model.alpha);
      json per_setting = json::object();
      for (SettingLabel label : kSettingLabels) {
        const auto begin = events.begin() + static_cast<std::ptrdiff_t>(static_cast<int>(label) * cfg.n_per_setting);
        const Estimate e =
            estimate_correlation(std::span<const EventRecord>(&*begin, static_cast<std::size_t>(cfg.n_per_setting)));
        per_setting[std::string(to_string(label))] = json{{"mean", number(e.value)}, {"std_error", number(e.std_error)}};
      }
      json results{{"out", m_out},
                   {"events", events.size()},
                   {"correlations", std::move(per_setting)},
                   {"chsh", number(s.value)},
                   {"chsh_std_error", number(s.std_error)},
                   {"chsh_exact", number(chsh(cfg.settings, cfg.model))}};
      emit(io::envelope("sample", std::move(params), std::move(results)));
      return kExitOk;
    };
  });

  // validate
  auto* validate = app.add_subcommand("validate", "Run the built-in property checks");
  validate->callback([&] {
    action = [&] {
      const auto checks = validation::run_all();
      int failed = 0;
      for (const auto& c : checks) {
        std::cout << (c.passed ? "PASS  " : "FAIL  ") << c.name << "  [" << c.detail << "]\n";
        failed += c.passed ? 0 : 1;
      }
      std::cout << checks.size() - failed << "/" << checks.size() << " checks passed\n";
      return failed == 0 ? kExitOk : kExitFailure;
    };
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  try {
    return action();
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const bellsim::error& e) {
    std::cerr << "error: " << e.what() << '\n';
    switch (e.code()) {
      case errc::bad_efficiency:
      case errc::bad_alpha:
      case errc::bad_argument:
        return kExitUsage;
      default:
        return kExitFailure;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitFailure;
  }
}
