#pragma once

#include "lurecert/equilibria.hpp"
#include "lurecert/metrics.hpp"
#include "lurecert/nonlinearity.hpp"
#include "lurecert/signals.hpp"
#include "lurecert/simulate.hpp"

#include <yaml-cpp/yaml.h>

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace lurecert {

/// Malformed or inconsistent configuration input (distinct from mathematical
/// failure of a certificate or estimate).
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

Matrix yaml_to_matrix(const YAML::Node& node);
Vector yaml_to_vector(const YAML::Node& node);
YAML::Node matrix_to_yaml(const Matrix& M);
YAML::Node vector_to_yaml(const Vector& v);

/// Structural signal serialization (children embedded, no name references).
YAML::Node signal_to_yaml(const Signal& s);
Signal signal_from_yaml(const YAML::Node& node);

struct NonlinearitySpec {
  std::string kind = "zero";  // zero | saturation | slope_sine | linear
  double slope = 0.0;         // slope_sine
  Matrix S;                   // linear

  Nonlinearity build(int m1, int p1) const;
  /// Unit-scale structure for threshold scans; the scanned bound is
  /// scale * pattern.
  Matrix pattern(int m1, int p1) const;
};

struct SignalDef {
  std::string name;
  Signal signal;
};

struct TrajectoryDef {
  std::string name;
  std::string forcing;  // signal name
  Vector x0;
};

struct PairCheck {
  std::string first, second;          // trajectory names
  std::vector<std::string> checks;    // contraction | dissipation | ls |
                                      // stepanov | stepanov_io | cumulative_io
  double s = 1.0;                     // order for ls / stepanov
  double beta0 = -1.0;                // <0: derive from xi
  double tol = kAutoTol;
};

struct ThresholdSpec {
  bool present = false;
  double lo = 0.0, hi = 0.0, tol = 1e-2;
};

struct EquilibriumSpec {
  bool present = false;
  Vector w_star;
  double tol = 1e-9;
  int restarts = 20;
  std::optional<PerronWeight> weight;  // user-supplied (v, rho)
  double hold_horizon = 20.0;
};

struct ProblemConfig {
  std::optional<LureSystem> system;
  NonlinearitySpec nonlinearity;
  double xi = -1.0;  // <0: pick automatically from the closed-loop decay
  std::optional<Vector> q, r, c;
  std::vector<SignalDef> signals;
  std::vector<TrajectoryDef> trajectories;
  SimConfig sim;
  WindowSpec windows;
  std::vector<PairCheck> pairs;
  ThresholdSpec threshold;
  EquilibriumSpec equilibrium;

  const LureSystem& sys() const {
    if (!system) throw ConfigError("config: missing system section");
    return *system;
  }
  const Signal& find_signal(const std::string& name) const;
  const TrajectoryDef& find_trajectory(const std::string& name) const;
};

ProblemConfig parse_config(const YAML::Node& root);
ProblemConfig load_config(const std::string& path);

/// Canonical re-serialization of the parsed configuration (echoed into run
/// reports so results carry their inputs).
YAML::Node config_to_yaml(const ProblemConfig& cfg);

}  // namespace lurecert
