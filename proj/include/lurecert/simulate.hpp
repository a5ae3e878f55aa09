#pragma once

#include "lurecert/nonlinearity.hpp"
#include "lurecert/signals.hpp"

#include <functional>
#include <vector>

namespace lurecert {

/// Uniformly sampled trajectory. Row j of each matrix holds the sample at
/// time t0 + j * dt; x is (N, n), y1 is (N, p1), y2 is (N, p2), w is (N, m2).
struct Trajectory {
  double t0 = 0.0;
  double dt = 0.0;
  Matrix x, y1, y2, w;

  int samples() const { return static_cast<int>(x.rows()); }
  double time(int j) const { return t0 + j * dt; }
  double t_end() const { return t0 + (samples() - 1) * dt; }
};

enum class Integrator { RK4, Euler };

struct SimConfig {
  double dt = 1e-3;
  double horizon = 10.0;
  double t0 = 0.0;
  Integrator method = Integrator::RK4;
  /// When set and the initial state and sampled forcing are nonnegative,
  /// asserts the state stays above -1e-6 (positive invariance).
  bool positivity_check = false;
};

/// Fixed-step integration of dx/dt = A x + B1 f(t, C1 x) + B2 w(t). The
/// forcing is evaluated analytically at interior stage times. Throws
/// std::runtime_error on state blow-up (non-finite or above 1e12 in max
/// norm), reporting the step index and time.
Trajectory simulate(const LureSystem& sys, const Nonlinearity& f,
                    const Signal& w, const Vector& x0, const SimConfig& cfg);

/// Max defect of the variation-of-parameters identity
///   x(t1) = e^{A (t1 - t0)} x(t0)
///          + int_{t0}^{t1} e^{A (t1 - s)} (B1 f(s, y1(s)) + B2 w(s)) ds
/// over a set of sampled (start, end) index pairs, with the integral taken by
/// trapezoid on the stored grid. An independent consistency check of the
/// integrator; the defect is quadrature limited, O(dt^2).
double vop_residual(const Trajectory& traj, const LureSystem& sys,
                    const Nonlinearity& f, int checks = 4);

/// Runs jobs with at most `threads` workers and returns results in input
/// order. thread_count <= 0 means: use the LURECERT_THREADS environment
/// variable when set, otherwise hardware concurrency.
std::vector<Trajectory> simulate_batch(
    const std::vector<std::function<Trajectory()>>& jobs, int threads = 0);

}  // namespace lurecert
