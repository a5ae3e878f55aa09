#include "lurecert/builtin.hpp"

#include <cmath>

namespace lurecert::builtin {

namespace {
constexpr double kPi = 3.14159265358979323846;
}

LureSystem example1_system() {
  Matrix A = 0.01 * Matrix::Ones(3, 3);
  A(0, 0) += -1.0;
  A(1, 1) += -10.0;
  A(2, 2) += -100.0;
  Matrix B1 = Matrix::Identity(3, 3);
  Matrix B2(3, 2);
  B2 << 0, 0, 1, 0, 0, 1;
  Matrix C1(3, 3);
  C1 << 0, 1, 1, 0, 0, 1, 0, 0, 1;
  Matrix C2(1, 3);
  C2 << 1, 0, 0;
  return LureSystem(std::move(A), std::move(B1), std::move(B2), std::move(C1),
                    std::move(C2));
}

Nonlinearity example1_nonlinearity(double slope) {
  return make_slope_sine_nonlinearity(slope, 3);
}

Signal example1_forcing(double k) { return make_converging_rational_signal(k); }

Vector example1_x0_a(double k) {
  Vector x0(3);
  x0 << -1.0, 1.0, 1.0;
  return 4.0 * k * x0;
}

Vector example1_x0_b(double k) {
  Vector x0(3);
  x0 << -1.0, 0.0, -1.0;
  return 4.0 * k * x0;
}

ProblemConfig example1_config(double k) {
  ProblemConfig cfg;
  cfg.system = example1_system();
  cfg.nonlinearity.kind = "slope_sine";
  cfg.nonlinearity.slope = 89.0;

  cfg.signals.push_back({"forcing", example1_forcing(k)});
  cfg.trajectories.push_back({"from_zero", "forcing", Vector::Zero(3)});
  cfg.trajectories.push_back({"from_a", "forcing", example1_x0_a(k)});
  cfg.trajectories.push_back({"from_b", "forcing", example1_x0_b(k)});

  cfg.sim.dt = 1e-3;
  cfg.sim.horizon = 40.0;

  cfg.threshold.present = true;
  cfg.threshold.lo = 0.0;
  cfg.threshold.hi = 200.0;
  cfg.threshold.tol = 1e-2;

  cfg.equilibrium.present = true;
  cfg.equilibrium.w_star = Vector::Constant(2, k);
  cfg.equilibrium.tol = 1e-9;
  cfg.equilibrium.restarts = 20;
  cfg.equilibrium.hold_horizon = 20.0;

  PairCheck pc;
  pc.first = "from_a";
  pc.second = "from_b";
  pc.checks = {"contraction", "ls"};
  pc.s = 2.0;
  cfg.pairs.push_back(std::move(pc));
  return cfg;
}

LureSystem example2_system() {
  Matrix A = -7.0 * Matrix::Identity(4, 4);
  Matrix B1 = Matrix::Ones(4, 1);
  Matrix B2 = Matrix::Zero(4, 1);
  B2(0, 0) = 1.0;
  Matrix C1 = Matrix::Ones(1, 4);
  Matrix C2 = Matrix::Zero(1, 4);
  C2(0, 3) = 1.0;
  return LureSystem(std::move(A), std::move(B1), std::move(B2), std::move(C1),
                    std::move(C2));
}

LureSystem example2_absorbed_system() {
  const LureSystem base = example2_system();
  const Matrix Delta = Matrix::Identity(1, 1);
  return LureSystem(base.closed_loop_A(Delta), base.B1(), base.B2(), base.C1(),
                    base.C2());
}

Nonlinearity example2_nonlinearity() { return make_saturation_nonlinearity(1); }

Signal example2_almost_periodic() {
  return make_almost_periodic_signal({1.0, 1.0},
                                     {2.0 * kPi, 2.0 * std::sqrt(3.0) * kPi},
                                     {0.0, 0.0});
}

Signal example2_asymptotically_ap() {
  return make_sum_signal(example2_almost_periodic(),
                         make_poly_exp_signal({{{5.0, 1, 1.0}}}));
}

Signal example2_stepanov() {
  const double root2 = std::sqrt(2.0);
  return make_mod_trig_signal(
      2.0, {{1.0, 1.0, 1.5 * kPi}, {1.0, root2, 1.5 * kPi / root2}});
}

Signal example2_asymptotically_stepanov() {
  return make_sum_signal(example2_stepanov(),
                         make_poly_exp_signal({{{5.0, 1, 0.25}}}));
}

Signal example2_periodic() {
  Vector offset(1);
  offset << 1.0;
  return make_trig_signal({{{1.0, 2.0 * kPi, 0.0}}}, std::move(offset), 1.0);
}

ProblemConfig example2_config() {
  ProblemConfig cfg;
  cfg.system = example2_system();
  cfg.nonlinearity.kind = "saturation";
  cfg.xi = 0.1;
  cfg.q = Vector::Ones(1);
  cfg.r = Vector::Constant(1, 0.05);

  cfg.signals.push_back({"ap", example2_almost_periodic()});
  cfg.signals.push_back({"ap_plus_transient", example2_asymptotically_ap()});
  cfg.signals.push_back({"step_ap", example2_stepanov()});
  cfg.signals.push_back(
      {"step_ap_plus_transient", example2_asymptotically_stepanov()});
  cfg.signals.push_back({"rest", make_zero_signal(1)});
  cfg.signals.push_back({"periodic", example2_periodic()});

  const Vector zero4 = Vector::Zero(4);
  cfg.trajectories.push_back({"ap", "ap", zero4});
  cfg.trajectories.push_back({"ap_plus_transient", "ap_plus_transient", zero4});
  cfg.trajectories.push_back({"step_ap", "step_ap", zero4});
  cfg.trajectories.push_back(
      {"step_ap_plus_transient", "step_ap_plus_transient", zero4});
  cfg.trajectories.push_back({"rest", "rest", zero4});

  cfg.sim.dt = 1e-3;
  cfg.sim.horizon = 40.0;

  const auto pair = [](std::string a, std::string b,
                       std::vector<std::string> checks) {
    PairCheck pc;
    pc.first = std::move(a);
    pc.second = std::move(b);
    pc.checks = std::move(checks);
    pc.s = 1.0;
    pc.tol = 1e-5;
    return pc;
  };
  cfg.pairs.push_back(pair("ap", "rest", {"cumulative_io", "dissipation"}));
  cfg.pairs.push_back(
      pair("ap", "ap_plus_transient", {"cumulative_io", "dissipation"}));
  cfg.pairs.push_back(pair("step_ap", "step_ap_plus_transient",
                           {"cumulative_io", "dissipation"}));
  // Stepanov checks run with the automatic quadrature-aware tolerance.
  PairCheck stepanov = pair("step_ap", "step_ap_plus_transient",
                            {"stepanov", "stepanov_io"});
  stepanov.tol = kAutoTol;
  cfg.pairs.push_back(std::move(stepanov));
  return cfg;
}

}  // namespace lurecert::builtin
