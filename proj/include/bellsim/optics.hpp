#pragma once

// Linear optical elements as unitary maps on creation operators, and the
// source -> beamsplitter -> polarizers -> detectors pipeline.

#include <cmath>
#include <complex>
#include <numbers>
#include <string>
#include <vector>

#include "bellsim/error.hpp"
#include "bellsim/fock.hpp"

namespace bellsim {

/// a_i† -> sum_j u(i, j) b_j† for inputs a_i and outputs b_j.
class ModeTransform {
 public:
  ModeTransform(std::vector<ModeId> inputs, std::vector<ModeId> outputs, std::vector<amplitude> matrix)
      : inputs_(std::move(inputs)), outputs_(std::move(outputs)), matrix_(std::move(matrix)) {
    if (matrix_.size() != inputs_.size() * outputs_.size()) {
      throw error(errc::bad_argument, "transform matrix does not match its mode lists");
    }
  }

  static ModeTransform identity(std::vector<ModeId> modes) {
    const std::size_t n = modes.size();
    std::vector<amplitude> m(n * n);
    for (std::size_t i = 0; i < n; ++i) m[i * n + i] = 1.0;
    return ModeTransform(modes, modes, std::move(m));
  }

  const std::vector<ModeId>& inputs() const { return inputs_; }
  const std::vector<ModeId>& outputs() const { return outputs_; }
  amplitude operator()(std::size_t in, std::size_t out) const { return matrix_[in * outputs_.size() + out]; }

  /// Index of `mode` among the inputs, or npos.
  std::size_t input_index(const ModeId& mode) const {
    for (std::size_t i = 0; i < inputs_.size(); ++i) {
      if (inputs_[i] == mode) return i;
    }
    return npos;
  }

  /// Max-entry deviation of u·u† from the identity; infinite for non-square maps.
  double unitarity_defect() const {
    const std::size_t n = inputs_.size();
    if (outputs_.size() != n) return INFINITY;
    double worst = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t k = 0; k < n; ++k) {
        amplitude sum{};
        for (std::size_t j = 0; j < n; ++j) sum += (*this)(i, j) * std::conj((*this)(k, j));
        worst = std::max(worst, std::abs(sum - (i == k ? 1.0 : 0.0)));
      }
    }
    return worst;
  }

  bool is_unitary(double tol = 1e-12) const { return unitarity_defect() <= tol; }

  static constexpr std::size_t npos = static_cast<std::size_t>(-1);

 private:
  std::vector<ModeId> inputs_;
  std::vector<ModeId> outputs_;
  std::vector<amplitude> matrix_;
};

/// Block-diagonal combination of two transforms acting on disjoint modes.
inline ModeTransform direct_sum(const ModeTransform& a, const ModeTransform& b) {
  for (const auto& m : b.inputs()) {
    if (a.input_index(m) != ModeTransform::npos) {
      throw error(errc::bad_argument, "direct_sum operands share input mode " + to_string(m));
    }
  }
  std::vector<ModeId> in = a.inputs(), out = a.outputs();
  in.insert(in.end(), b.inputs().begin(), b.inputs().end());
  out.insert(out.end(), b.outputs().begin(), b.outputs().end());
  std::vector<amplitude> m(in.size() * out.size());
  for (std::size_t i = 0; i < a.inputs().size(); ++i)
    for (std::size_t j = 0; j < a.outputs().size(); ++j) m[i * out.size() + j] = a(i, j);
  const std::size_t ri = a.inputs().size(), cj = a.outputs().size();
  for (std::size_t i = 0; i < b.inputs().size(); ++i)
    for (std::size_t j = 0; j < b.outputs().size(); ++j) m[(ri + i) * out.size() + cj + j] = b(i, j);
  return ModeTransform(std::move(in), std::move(out), std::move(m));
}

/// Polarization-insensitive 50-50 beamsplitter with an i phase on reflection:
/// a1† -> (i c† + d†)/√2, a2† -> (c† + i d†)/√2 for both polarizations.
inline ModeTransform beamsplitter_5050() {
  using namespace modes;
  const double h = 1.0 / std::numbers::sqrt2;
  const amplitude i{0.0, h};
  // outputs: cx cy dx dy
  return ModeTransform({a1x, a1y, a2x, a2y}, {cx, cy, dx, dy},
                       {i, 0, h, 0,
                        0, i, 0, h,
                        h, 0, i, 0,
                        0, h, 0, i});
}

/// Polarizing beamsplitter at angle theta from the x axis for one station:
/// n_x† -> cosθ n_∥† + sinθ n_⊥†, n_y† -> sinθ n_∥† - cosθ n_⊥†.
inline ModeTransform polarizer_rotation(int station, double theta) {
  if (station != 1 && station != 2) {
    throw error(errc::bad_argument, "station must be 1 or 2");
  }
  const Port p = station == 1 ? Port::c : Port::d;
  const double c = std::cos(theta), s = std::sin(theta);
  return ModeTransform({{p, Channel::x}, {p, Channel::y}}, {{p, Channel::parallel}, {p, Channel::perp}},
                       {c, s,
                        s, -c});
}

/// Detector inefficiency as a beamsplitter of reflectivity √(1-η) in front of
/// an ideal detector: a† -> √η t† + √(1-η) r†, where the transmitted mode keeps
/// the detected label and r is `ancilla`. The ancilla's own input port closes
/// the map into a 2x2 unitary.
inline ModeTransform loss_channel(const ModeId& mode, double eta, const ModeId& ancilla) {
  check_efficiency(eta);
  if (ancilla == mode) {
    throw error(errc::bad_argument, "loss ancilla must differ from the detected mode");
  }
  const double t = std::sqrt(eta), r = std::sqrt(1.0 - eta);
  return ModeTransform({mode, ancilla}, {mode, ancilla},
                       {t, r,
                        -r, t});
}

inline ModeTransform loss_channel(const ModeId& mode, double eta) {
  return loss_channel(mode, eta, mode.loss_ancilla());
}

/// Substitutes every creation operator of `s` by its image under `t` and
/// collects like kets. Modes not carried by `t` are an error.
inline FockState apply(const ModeTransform& t, const FockState& s) {
  FockState out;
  for (const auto& [occ, amp] : s.terms()) {
    // |n> = prod_m (a_m†)^{n_m} / sqrt(n_m!) |0>
    double factorials = 1.0;
    for (const auto& e : occ.entries()) factorials *= std::tgamma(e.count + 1.0);
    FockState partial;
    partial.add(OccupationVector{}, amp / std::sqrt(factorials));
    for (const auto& e : occ.entries()) {
      const std::size_t row = t.input_index(e.mode);
      if (row == ModeTransform::npos) {
        throw error(errc::unknown_mode, "transform does not carry mode " + to_string(e.mode));
      }
      for (int k = 0; k < e.count; ++k) {
        FockState next;
        for (std::size_t j = 0; j < t.outputs().size(); ++j) {
          const amplitude u = t(row, j);
          if (u == amplitude{}) continue;
          next = next + u * create(partial, t.outputs()[j]);
        }
        partial = std::move(next);
      }
    }
    out = out + partial;
  }
  return out;
}

struct ExperimentConfig {
  double theta1 = 0.0;  // station-1 polarizer angle from the x axis, radians
  double theta2 = 0.0;
  double eta = 1.0;
  bool include_loss = false;
};

inline const std::vector<ModeId>& detected_modes() {
  static const std::vector<ModeId> all{modes::c_par, modes::c_perp, modes::d_par, modes::d_perp};
  return all;
}

/// Source pair after the wave plate: a_1x† a_2y† |0>.
inline FockState initial_state() { return create(create(vacuum(), modes::a1x), modes::a2y); }

inline ModeTransform polarizer_stage(double theta1, double theta2) {
  return direct_sum(polarizer_rotation(1, theta1), polarizer_rotation(2, theta2));
}

inline ModeTransform loss_stage(double eta) {
  const auto& det = detected_modes();
  ModeTransform t = loss_channel(det[0], eta);
  for (std::size_t i = 1; i < det.size(); ++i) t = direct_sum(t, loss_channel(det[i], eta));
  return t;
}

/// State reaching the four detectors, with loss ancillas when requested.
inline FockState build_experiment_state(const ExperimentConfig& cfg) {
  check_efficiency(cfg.eta);
  FockState s = apply(beamsplitter_5050(), initial_state());
  s = apply(polarizer_stage(cfg.theta1, cfg.theta2), s);
  if (cfg.include_loss) s = apply(loss_stage(cfg.eta), s);
  return s;
}

/// Closed-form final state for ideal detectors. The two-photons-in-⊥ kets
/// carry -i sin(2θ)/(2√2): substituting n_x†n_y† = ½sin2θ (n_∥†² - n_⊥†²)
/// - cos2θ n_∥†n_⊥† fixes their sign opposite to the ∥ kets.
inline FockState closed_form_final_state(double theta1, double theta2) {
  using namespace modes;
  const amplitude i{0.0, 1.0};
  const double r2 = std::numbers::sqrt2;
  const double sd = std::sin(theta1 - theta2), cd = std::cos(theta1 - theta2);
  const double s1 = std::sin(2.0 * theta1), s2 = std::sin(2.0 * theta2);
  const double c1 = std::cos(2.0 * theta1), c2 = std::cos(2.0 * theta2);
  FockState s;
  s.add({{c_par, 1}, {d_par, 1}}, 0.5 * sd);
  s.add({{c_par, 1}, {d_perp, 1}}, 0.5 * cd);
  s.add({{c_perp, 1}, {d_par, 1}}, -0.5 * cd);
  s.add({{c_perp, 1}, {d_perp, 1}}, 0.5 * sd);
  s.add({{c_par, 2}}, 0.5 * i * s1 / r2);
  s.add({{c_perp, 2}}, -0.5 * i * s1 / r2);
  s.add({{c_par, 1}, {c_perp, 1}}, -0.5 * i * c1);
  s.add({{d_par, 2}}, 0.5 * i * s2 / r2);
  s.add({{d_perp, 2}}, -0.5 * i * s2 / r2);
  s.add({{d_par, 1}, {d_perp, 1}}, -0.5 * i * c2);
  return s;
}

}  // namespace bellsim
