#pragma once

// JSON and CSV serialization of tables and command output envelopes.
// Every number is written with 9 significant digits.

#include <cstdio>
#include <cstdlib>
#include <ostream>
#include <string>

#include "json.hpp"

#include "bellsim/bell.hpp"
#include "bellsim/detection.hpp"

namespace bellsim::io {

using json = nlohmann::ordered_json;

inline constexpr int kSchemaVersion = 1;

/// x rounded to 9 significant digits, so serialization re-parses exactly.
inline double sig9(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.9g", x);
  return std::strtod(buf, nullptr);
}

inline std::string format9(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.9g", x);
  return buf;
}

inline json number(double x) { return sig9(x); }

inline json envelope(std::string command, json parameters, json results) {
  json out;
  out["command"] = std::move(command);
  out["schema_version"] = kSchemaVersion;
  out["parameters"] = std::move(parameters);
  out["results"] = std::move(results);
  return out;
}

/// Flat records {i, j, theta1, theta2, eta, alpha, p}, rows in (i, j) order.
inline json table_records(const JointProbabilityTable& t) {
  json rows = json::array();
  for (int i = 1; i <= kOutcomeCount; ++i)
    for (int j = 1; j <= kOutcomeCount; ++j) {
      json r;
      r["i"] = i;
      r["j"] = j;
      r["theta1"] = number(t.theta1);
      r["theta2"] = number(t.theta2);
      r["eta"] = number(t.eta);
      r["alpha"] = number(t.alpha);
      r["p"] = number(t.at(i, j));
      rows.push_back(std::move(r));
    }
  return rows;
}

inline constexpr const char* kTableCsvHeader = "i,j,theta1,theta2,eta,alpha,p";

inline void write_table_csv(std::ostream& out, const JointProbabilityTable& t) {
  out << kTableCsvHeader << '\n';
  for (int i = 1; i <= kOutcomeCount; ++i)
    for (int j = 1; j <= kOutcomeCount; ++j) {
      out << i << ',' << j << ',' << format9(t.theta1) << ',' << format9(t.theta2) << ',' << format9(t.eta) << ','
          << format9(t.alpha) << ',' << format9(t.at(i, j)) << '\n';
    }
}

/// Rebuilds a table from its flat records.
inline JointProbabilityTable table_from_records(const json& rows) {
  JointProbabilityTable t;
  for (const auto& r : rows) {
    const int i = r.at("i").get<int>(), j = r.at("j").get<int>();
    t.p.at(i - 1).at(j - 1) = r.at("p").get<double>();
    t.theta1 = r.at("theta1").get<double>();
    t.theta2 = r.at("theta2").get<double>();
    t.eta = r.at("eta").get<double>();
    t.alpha = r.at("alpha").get<double>();
  }
  return t;
}

inline json settings_json(const ChshSettings& s) {
  json out;
  out["psi1"] = number(s.psi1);
  out["psi1_prime"] = number(s.psi1p);
  out["psi2"] = number(s.psi2);
  out["psi2_prime"] = number(s.psi2p);
  return out;
}

}  // namespace bellsim::io
