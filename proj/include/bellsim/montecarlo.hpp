#pragma once

// Seeded sampling of detection events and finite-statistics estimators.
//
// Randomness contract: every event consumes one Philox4x32-10 block keyed by
// the 64-bit seed, with counter (event index within chunk, chunk index,
// setting label, 0). Words 0-1 pick the raw outcome cell by inverse CDF over
// the 36 cells in (i, j) lexicographic order; words 2 and 3 drive the
// double-click confusion at stations 1 and 2. Results therefore do not
// depend on the number of worker threads.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "bellsim/bell.hpp"
#include "bellsim/detection.hpp"
#include "bellsim/error.hpp"
#include "bellsim/parallel.hpp"
#include "bellsim/philox.hpp"

namespace bellsim {

inline constexpr std::size_t kChunkSize = std::size_t{1} << 16;

struct EventRecord {
  std::uint64_t index = 0;
  SettingLabel setting = SettingLabel::AB;
  double psi1 = 0.0;
  double psi2 = 0.0;
  OutcomePair raw{StationOutcome::nothing, StationOutcome::nothing};
  OutcomePair observed{StationOutcome::nothing, StationOutcome::nothing};
  int a = 1;
  int b = 1;

  friend bool operator==(const EventRecord&, const EventRecord&) = default;
};

struct SamplerConfig {
  std::uint64_t seed = 0;
  std::uint64_t n_per_setting = 1;
  DetectorModel model{};
  ChshSettings settings{};
  unsigned threads = 0;  // 0: default_thread_count()

  void validate() const {
    if (n_per_setting < 1) throw error(errc::bad_argument, "n_per_setting must be at least 1");
    if (n_per_setting > std::uint64_t{0xFFFFFFFF} * kChunkSize) {
      throw error(errc::bad_argument, "n_per_setting exceeds the generator's counter space");
    }
    model.validate();
  }
};

/// Cumulative distribution over the 36 cells, cell k = 6 i + j.
inline std::array<double, kOutcomeCount * kOutcomeCount> cell_cdf(const JointProbabilityTable& t) {
  std::array<double, kOutcomeCount * kOutcomeCount> cdf{};
  double acc = 0.0;
  for (int k = 0; k < kOutcomeCount * kOutcomeCount; ++k) {
    acc += t.p[k / kOutcomeCount][k % kOutcomeCount];
    cdf[k] = acc;
  }
  return cdf;
}

/// Inverse-CDF lookup: the first cell whose cumulative mass exceeds u.
/// Zero-probability cells are never returned.
inline OutcomePair draw_cell(const std::array<double, kOutcomeCount * kOutcomeCount>& cdf, double u) {
  auto it = std::upper_bound(cdf.begin(), cdf.end(), u);
  int k = static_cast<int>(it - cdf.begin());
  if (it == cdf.end()) {
    // u fell in the rounding gap above the total: take the last nonempty cell.
    k = static_cast<int>(cdf.size()) - 1;
    while (k > 0 && cdf[k] == cdf[k - 1]) --k;
  }
  return {outcome_at(k / kOutcomeCount), outcome_at(k % kOutcomeCount)};
}

/// Relabels an unrecognized double click (6 -> 1, 5 -> 2) when u < 1 - alpha.
inline StationOutcome confuse(StationOutcome raw, double alpha, double u) {
  if (u >= 1.0 - alpha) return raw;
  if (raw == StationOutcome::double_minus) return StationOutcome::single_minus;
  if (raw == StationOutcome::double_plus) return StationOutcome::single_plus;
  return raw;
}

/// Events for one CHSH setting; indices continue the global numbering
/// (setting position × n_per_setting + i).
inline std::vector<EventRecord> sample_setting(const SamplerConfig& cfg, SettingLabel label) {
  cfg.validate();
  const PsiAngles psi = cfg.settings.at(label);
  const auto cdf = cell_cdf(joint_table(psi.theta1(), psi.theta2(), cfg.model.eta));
  const ValueAssignment values = ValueAssignment::standard();
  const Philox4x32 rng(cfg.seed);
  const auto setting_word = static_cast<std::uint32_t>(label);
  const std::uint64_t n = cfg.n_per_setting;
  const std::uint64_t base = static_cast<std::uint64_t>(label) * n;

  std::vector<EventRecord> events(n);
  const std::size_t chunks = (n + kChunkSize - 1) / kChunkSize;
  parallel_for(chunks, cfg.threads, [&](std::size_t chunk) {
    const std::uint64_t begin = chunk * kChunkSize;
    const std::uint64_t end = std::min<std::uint64_t>(n, begin + kChunkSize);
    for (std::uint64_t i = begin; i < end; ++i) {
      const auto w = rng({static_cast<std::uint32_t>(i - begin), static_cast<std::uint32_t>(chunk), setting_word, 0u});
      EventRecord& ev = events[i];
      ev.index = base + i;
      ev.setting = label;
      ev.psi1 = psi.psi1;
      ev.psi2 = psi.psi2;
      ev.raw = draw_cell(cdf, uniform53(w[0], w[1]));
      ev.observed = {confuse(ev.raw.first, cfg.model.alpha, uniform32(w[2])),
                     confuse(ev.raw.second, cfg.model.alpha, uniform32(w[3]))};
      ev.a = assigned_value(values, ev.observed.first, 1);
      ev.b = assigned_value(values, ev.observed.second, 2);
    }
  });
  return events;
}

/// All four settings in order AB, A'B, AB', A'B'.
inline std::vector<EventRecord> sample_events(const SamplerConfig& cfg) {
  std::vector<EventRecord> all;
  all.reserve(4 * cfg.n_per_setting);
  for (SettingLabel label : kSettingLabels) {
    auto part = sample_setting(cfg, label);
    all.insert(all.end(), part.begin(), part.end());
  }
  return all;
}

struct Estimate {
  double value = 0.0;
  double std_error = 0.0;
};

/// Running mean and variance of a·b products.
class CorrelationAccumulator {
 public:
  void add(int product) {
    ++n_;
    sum_ += product;
    sum_sq_ += static_cast<double>(product) * product;
  }

  std::uint64_t count() const { return n_; }

  Estimate estimate() const {
    if (n_ == 0) throw error(errc::empty_input, "no events to estimate from");
    const double n = static_cast<double>(n_);
    const double mean = sum_ / n;
    double var = n_ > 1 ? (sum_sq_ - n * mean * mean) / (n - 1.0) : 0.0;
    if (var < 0.0) var = 0.0;
    return {mean, std::sqrt(var / n)};
  }

 private:
  std::uint64_t n_ = 0;
  double sum_ = 0.0;
  double sum_sq_ = 0.0;
};

/// Sample mean of a·b with standard error √(s²/n); events must share one setting.
inline Estimate estimate_correlation(std::span<const EventRecord> events) {
  if (events.empty()) throw error(errc::empty_input, "no events to estimate from");
  CorrelationAccumulator acc;
  const SettingLabel label = events.front().setting;
  for (const auto& ev : events) {
    if (ev.setting != label) throw error(errc::mixed_settings, "events span more than one setting");
    acc.add(ev.a * ev.b);
  }
  return acc.estimate();
}

/// E_AB + E_A'B + E_AB' - E_A'B' with standard errors added in quadrature.
inline Estimate estimate_chsh(std::span<const EventRecord> events) {
  std::array<CorrelationAccumulator, 4> acc;
  for (const auto& ev : events) acc[static_cast<int>(ev.setting)].add(ev.a * ev.b);
  Estimate s;
  double var = 0.0;
  for (SettingLabel label : kSettingLabels) {
    const auto& a = acc[static_cast<int>(label)];
    if (a.count() == 0) {
      throw error(errc::missing_setting, "no events for setting " + std::string(to_string(label)));
    }
    const Estimate e = a.estimate();
    s.value += chsh_sign(label) * e.value;
    var += e.std_error * e.std_error;
  }
  s.std_error = std::sqrt(var);
  return s;
}

/// Relative frequencies of raw (or observed) outcome pairs.
inline JointProbabilityTable empirical_table(std::span<const EventRecord> events, bool observed = false) {
  if (events.empty()) throw error(errc::empty_input, "no events");
  JointProbabilityTable t;
  const double w = 1.0 / static_cast<double>(events.size());
  for (const auto& ev : events) {
    const OutcomePair& o = observed ? ev.observed : ev.raw;
    t(o.first, o.second) += w;
  }
  return t;
}

inline constexpr const char* kEventCsvHeader = "index,setting,psi1,psi2,raw1,raw2,obs1,obs2,a,b";

/// One row per event; angles with 9 significant digits, outcomes as 1..6.
inline void write_events_csv(std::ostream& out, std::span<const EventRecord> events) {
  out << kEventCsvHeader << '\n';
  char line[160];
  for (const auto& ev : events) {
    const int len = std::snprintf(line, sizeof line, "%llu,%s,%.9g,%.9g,%d,%d,%d,%d,%d,%d\n",
                                  static_cast<unsigned long long>(ev.index), to_string(ev.setting).data(), ev.psi1,
                                  ev.psi2, label_of(ev.raw.first), label_of(ev.raw.second),
                                  label_of(ev.observed.first), label_of(ev.observed.second), ev.a, ev.b);
    out.write(line, len);
  }
}

}  // namespace bellsim
