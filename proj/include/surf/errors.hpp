#pragma once

#include <stdexcept>
#include <string>

namespace surf {

// All domain failures carry a stable `kind` tag so callers (and the CLI)
// can match on them without parsing messages.
class Error : public std::runtime_error {
 public:
  Error(std::string kind, const std::string& msg)
      : std::runtime_error(kind + ": " + msg), kind_(std::move(kind)) {}
  const std::string& kind() const { return kind_; }

 private:
  std::string kind_;
};

inline Error identity_word_error(const std::string& m) { return Error("identity-word", m); }
inline Error resource_error(const std::string& m) { return Error("resource", m); }
inline Error non_hyperbolic_error(const std::string& m) { return Error("non-hyperbolic", m); }
inline Error coincident_point_error(const std::string& m) { return Error("coincident-point", m); }
inline Error saturation_error(const std::string& m) { return Error("saturation", m); }
inline Error invalid_crossing_error(const std::string& m) { return Error("invalid-crossing", m); }
inline Error construction_error(const std::string& m) { return Error("construction", m); }
inline Error spectrum_degenerate_error(const std::string& m) { return Error("spectrum-degenerate", m); }
inline Error degenerate_wedge_error(const std::string& m) { return Error("degenerate-wedge", m); }
inline Error transversality_error(const std::string& m) { return Error("transversality", m); }
inline Error non_lagrangian_error(const std::string& m) { return Error("non-lagrangian", m); }
inline Error parse_error(const std::string& m) { return Error("parse", m); }
inline Error non_disjoint_list_error(const std::string& m) { return Error("non-disjoint-list", m); }
inline Error axiom_error(const std::string& m) { return Error("axiom-unverified", m); }
inline Error fixed_point_collision_error(const std::string& m) { return Error("fixed-point-collision", m); }
inline Error budget_error(const std::string& m) { return Error("budget-exhausted", m); }
inline Error relation_violation_error(const std::string& m) { return Error("relation-violation", m); }
inline Error non_finite_mass_error(const std::string& m) { return Error("non-finite-mass", m); }
inline Error missing_class_error(const std::string& m) { return Error("missing-class", m); }
inline Error insufficient_data_error(const std::string& m) { return Error("insufficient-data", m); }
inline Error pool_too_small_error(const std::string& m) { return Error("pool-too-small", m); }
inline Error window_error(const std::string& m) { return Error("window-exceeded", m); }
inline Error config_error(const std::string& m) { return Error("config-parse", m); }

}  // namespace surf
