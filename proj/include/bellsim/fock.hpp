#pragma once

// Few-photon multimode Fock states with exact bosonic amplitude algebra.
//
// A FockState is a sparse map from occupation vectors to complex amplitudes.
// States never hold more than kMaxPhotons photons; the cap is enforced by
// `create` and turns runaway expansions into a typed error.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <cstdio>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "bellsim/error.hpp"

namespace bellsim {

using amplitude = std::complex<double>;

inline constexpr int kMaxPhotons = 2;
inline constexpr double kPruneTolerance = 1e-15;
inline constexpr double kNormalizationTolerance = 1e-9;

/// Optical beam a mode belongs to: the two source beams before the 50-50
/// beamsplitter, and its two exit beams c (station 1) and d (station 2).
enum class Port : std::uint8_t { a1, a2, c, d };

/// Polarization channel: x/y before the polarizing beamsplitters,
/// parallel/perp (D+ / D-) after them.
enum class Channel : std::uint8_t { x, y, parallel, perp };

struct ModeId {
  Port port;
  Channel channel;
  // Loss ancilla (reflected arm of a detector-efficiency beamsplitter) bound
  // to the detected mode {port, channel}.
  bool ancilla = false;

  friend constexpr auto operator<=>(const ModeId&, const ModeId&) = default;

  /// 1 for station-1 modes (c), 2 for station-2 modes (d), 0 for source beams.
  constexpr int station() const {
    switch (port) {
      case Port::c: return 1;
      case Port::d: return 2;
      default: return 0;
    }
  }

  constexpr bool is_detected() const {
    return !ancilla && station() != 0 && (channel == Channel::parallel || channel == Channel::perp);
  }

  /// The ancilla that collects photons lost in front of this detector.
  constexpr ModeId loss_ancilla() const { return ModeId{port, channel, true}; }

  /// The detected mode an ancilla is bound to (identity for ordinary modes).
  constexpr ModeId detected_mode() const { return ModeId{port, channel, false}; }
};

namespace modes {
inline constexpr ModeId a1x{Port::a1, Channel::x};
inline constexpr ModeId a1y{Port::a1, Channel::y};
inline constexpr ModeId a2x{Port::a2, Channel::x};
inline constexpr ModeId a2y{Port::a2, Channel::y};
inline constexpr ModeId cx{Port::c, Channel::x};
inline constexpr ModeId cy{Port::c, Channel::y};
inline constexpr ModeId dx{Port::d, Channel::x};
inline constexpr ModeId dy{Port::d, Channel::y};
inline constexpr ModeId c_par{Port::c, Channel::parallel};
inline constexpr ModeId c_perp{Port::c, Channel::perp};
inline constexpr ModeId d_par{Port::d, Channel::parallel};
inline constexpr ModeId d_perp{Port::d, Channel::perp};
}  // namespace modes

inline std::string to_string(const ModeId& mode) {
  std::string name;
  switch (mode.port) {
    case Port::a1: name = "a1"; break;
    case Port::a2: name = "a2"; break;
    case Port::c: name = "c"; break;
    case Port::d: name = "d"; break;
  }
  switch (mode.channel) {
    case Channel::x: name += "x"; break;
    case Channel::y: name += "y"; break;
    case Channel::parallel: name += "∥"; break;
    case Channel::perp: name += "⊥"; break;
  }
  return mode.ancilla ? "r(" + name + ")" : name;
}

/// Photon counts per mode, kept sorted by ModeId with no zero entries so
/// that equal occupations compare equal.
class OccupationVector {
 public:
  struct Entry {
    ModeId mode;
    int count;
    friend constexpr auto operator<=>(const Entry&, const Entry&) = default;
  };

  OccupationVector() = default;

  OccupationVector(std::initializer_list<Entry> entries) {
    for (const auto& e : entries) add(e.mode, e.count);
  }

  int count(const ModeId& mode) const {
    auto it = find(mode);
    return it != entries_.end() && it->mode == mode ? it->count : 0;
  }

  int total() const {
    int n = 0;
    for (const auto& e : entries_) n += e.count;
    return n;
  }

  bool empty() const { return entries_.empty(); }

  std::span<const Entry> entries() const { return entries_; }

  /// Adds `n` photons (n may be negative as long as the count stays >= 0).
  void add(const ModeId& mode, int n) {
    auto it = find(mode);
    if (it != entries_.end() && it->mode == mode) {
      it->count += n;
      if (it->count < 0) throw error(errc::bad_argument, "negative photon count");
      if (it->count == 0) entries_.erase(it);
    } else if (n > 0) {
      entries_.insert(it, Entry{mode, n});
    } else if (n < 0) {
      throw error(errc::bad_argument, "negative photon count");
    }
  }

  friend auto operator<=>(const OccupationVector&, const OccupationVector&) = default;
  friend bool operator==(const OccupationVector&, const OccupationVector&) = default;

 private:
  std::vector<Entry>::iterator find(const ModeId& mode) {
    return std::lower_bound(entries_.begin(), entries_.end(), mode,
                            [](const Entry& e, const ModeId& m) { return e.mode < m; });
  }
  std::vector<Entry>::const_iterator find(const ModeId& mode) const {
    return std::lower_bound(entries_.begin(), entries_.end(), mode,
                            [](const Entry& e, const ModeId& m) { return e.mode < m; });
  }

  std::vector<Entry> entries_;
};

/// Ket label in the conventional notation, e.g. "c∥,d⊥" or "2c∥".
inline std::string to_string(const OccupationVector& occ) {
  std::string out;
  for (const auto& e : occ.entries()) {
    if (!out.empty()) out += ",";
    if (e.count > 1) out += std::to_string(e.count);
    out += to_string(e.mode);
  }
  return out;
}

class FockState {
 public:
  using term_map = std::map<OccupationVector, amplitude>;

  FockState() = default;

  /// Adds `amp` to the coefficient of `occ`, dropping it if it cancels.
  void add(const OccupationVector& occ, amplitude amp) {
    auto [it, inserted] = terms_.try_emplace(occ, amp);
    if (!inserted) it->second += amp;
    if (std::abs(it->second) <= kPruneTolerance) terms_.erase(it);
  }

  amplitude amplitude_of(const OccupationVector& occ) const {
    auto it = terms_.find(occ);
    return it == terms_.end() ? amplitude{} : it->second;
  }

  const term_map& terms() const { return terms_; }
  std::size_t size() const { return terms_.size(); }
  bool empty() const { return terms_.empty(); }

  friend FockState operator+(FockState lhs, const FockState& rhs) {
    for (const auto& [occ, amp] : rhs.terms_) lhs.add(occ, amp);
    return lhs;
  }

  friend FockState operator*(amplitude scale, const FockState& s) {
    FockState out;
    for (const auto& [occ, amp] : s.terms_) out.add(occ, scale * amp);
    return out;
  }

 private:
  term_map terms_;
};

inline FockState vacuum() {
  FockState s;
  s.add(OccupationVector{}, 1.0);
  return s;
}

/// Raw creation-operator action a†|n> = sqrt(n+1)|n+1>, without renormalizing.
inline FockState create(const FockState& state, const ModeId& mode) {
  FockState out;
  for (const auto& [occ, amp] : state.terms()) {
    if (occ.total() + 1 > kMaxPhotons) {
      throw error(errc::capacity_exceeded,
                  "creating a photon in " + to_string(mode) + " exceeds the two-photon cap");
    }
    const int n = occ.count(mode);
    OccupationVector next = occ;
    next.add(mode, 1);
    out.add(next, amp * std::sqrt(static_cast<double>(n + 1)));
  }
  return out;
}

inline double norm(const FockState& state) {
  double sum = 0.0;
  for (const auto& [occ, amp] : state.terms()) sum += std::norm(amp);
  return std::sqrt(sum);
}

/// Born-rule probability of an occupation; the state must be normalized.
inline double probability_of(const FockState& state, const OccupationVector& occ) {
  const double n = norm(state);
  if (std::abs(n - 1.0) > kNormalizationTolerance) {
    throw error(errc::not_normalized, "state norm is " + std::to_string(n));
  }
  return std::norm(state.amplitude_of(occ));
}

inline std::string format_amplitude(amplitude amp) {
  char buf[64];
  const double im = amp.imag();
  std::snprintf(buf, sizeof buf, "(%.9g%s%.9gi)", amp.real() == 0.0 ? 0.0 : amp.real(),
                std::signbit(im) && im != 0.0 ? "-" : "+", std::abs(im));
  return buf;
}

/// Deterministic rendering: one `(re+imi)|ket⟩` per term in canonical order.
inline std::string to_string(const FockState& state) {
  std::string out;
  for (const auto& [occ, amp] : state.terms()) {
    if (!out.empty()) out += " + ";
    out += format_amplitude(amp) + "|" + to_string(occ) + "⟩";
  }
  return out.empty() ? "0" : out;
}

}  // namespace bellsim
