#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace bellsim {

enum class errc {
  capacity_exceeded,
  not_normalized,
  bad_efficiency,
  bad_alpha,
  unknown_mode,
  impossible_count,
  empty_input,
  mixed_settings,
  missing_setting,
  bad_argument,
  no_convergence,
  no_violation,
};

constexpr std::string_view to_string(errc code) {
  switch (code) {
    case errc::capacity_exceeded: return "capacity-exceeded";
    case errc::not_normalized: return "not-normalized";
    case errc::bad_efficiency: return "bad-efficiency";
    case errc::bad_alpha: return "bad-alpha";
    case errc::unknown_mode: return "unknown-mode";
    case errc::impossible_count: return "impossible-count";
    case errc::empty_input: return "empty-input";
    case errc::mixed_settings: return "mixed-settings";
    case errc::missing_setting: return "missing-setting";
    case errc::bad_argument: return "bad-argument";
    case errc::no_convergence: return "no-convergence";
    case errc::no_violation: return "no-violation";
  }
  return "unknown";
}

/// Every failure raised by the library carries one of the `errc` codes.
class error : public std::runtime_error {
 public:
  error(errc code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  errc code() const noexcept { return code_; }

 private:
  errc code_;
};

inline void check_efficiency(double eta) {
  if (!(eta > 0.0 && eta <= 1.0)) {
    throw error(errc::bad_efficiency, "efficiency must lie in (0, 1], got " + std::to_string(eta));
  }
}

inline void check_alpha(double alpha) {
  if (!(alpha >= 0.0 && alpha <= 1.0)) {
    throw error(errc::bad_alpha, "alpha must lie in [0, 1], got " + std::to_string(alpha));
  }
}

}  // namespace bellsim
