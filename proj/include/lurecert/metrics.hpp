#pragma once

#include "lurecert/certify.hpp"
#include "lurecert/simulate.hpp"

#include <cstdint>
#include <vector>

namespace lurecert {

/// Weighted L^s norm of a sampled signal over a window aligned to the grid:
///   ( int_{t0}^{t1} (e^{alpha t} |z(t)|_weight)^s dt )^{1/s},
/// esssup of e^{alpha t} |z(t)|_weight for s = infinity. Trapezoid
/// quadrature. Window endpoints must lie on the sample grid.
struct NormSpec {
  double s = 1.0;
  double alpha = 0.0;
  Vector weight;
};

double weighted_Ls_norm(const Matrix& series, double t_start, double dt,
                        const NormSpec& spec, double win_t0, double win_t1);

/// sup over unit windows [a, a+1] inside the sampled range of the window
/// L^s norm of |z|_weight. Requires at least one full unit window.
double stepanov_norm(const Matrix& series, double dt, double s,
                     const Vector& weight);

/// Window pairs (t0, t1) on which an estimate is checked: all ordered pairs
/// from an evenly spaced coarse grid plus seeded random pairs.
struct WindowSpec {
  int coarse_points = 25;
  int random_pairs = 100;
  std::uint64_t seed = 0;
};

struct EstimateReport {
  bool holds = false;
  double worst_margin = 0.0;  // min over windows of RHS - LHS
  double tol = 0.0;           // tolerance actually applied
  int windows_checked = 0;
  double violating_t0 = 0.0, violating_t1 = 0.0;  // worst window when failing
};

/// Pass tol < 0 to use the automatic tolerance 1e-6 + 1e-3 * (grid error
/// scale); the grid error scale is the first-order trapezoid bound
/// dt * total-variation of the integrand samples, which dominates the actual
/// quadrature error so discretization never produces false violations.
inline constexpr double kAutoTol = -1.0;

/// Pointwise contraction estimate between two trajectories under a common
/// forcing-to-state weight: for every checked window,
///   |dx(t1)|_p <= e^{-xi (t1 - t0)} |dx(t0)|_p
///                + int_{t0}^{t1} e^{-xi (t1 - s)} |dw(s)|_weight ds.
/// The default weight is B2^T p; a certificate supply weight r may be passed
/// instead. All integrals are accumulated in normalized form so large xi * t
/// cannot overflow.
EstimateReport verify_contraction_estimate(const Trajectory& a,
                                           const Trajectory& b,
                                           const CertificateH1& cert,
                                           const Vector& weight,
                                           const WindowSpec& ws = {},
                                           double tol = kAutoTol);

/// Integral dissipation estimate for a full certificate: for every window,
///   int e^{-xi (t1-s)} (|dy2|_q + |dw|_k + |dx|_l) ds + |dx(t1)|_p
///   <= e^{-xi (t1-t0)} |dx(t0)|_p + int e^{-xi (t1-s)} |dw|_r ds.
EstimateReport verify_dissipation_estimate(const Trajectory& a,
                                           const Trajectory& b,
                                           const CertificateH2& cert,
                                           const WindowSpec& ws = {},
                                           double tol = kAutoTol);

/// L^s forcing variant of the contraction estimate:
///   |dx(t1)|_p <= e^{-xi (t1-t0)} |dx(t0)|_p
///                + alpha_s(xi, s) * || dw ||_{L^s(t0, t1; weight)}.
EstimateReport verify_ls_estimate(const Trajectory& a, const Trajectory& b,
                                  const CertificateH1& cert, double s,
                                  const Vector& weight,
                                  const WindowSpec& ws = {},
                                  double tol = kAutoTol);

/// Stepanov forcing variant with explicit constants (beta0, xi0):
///   |dx(t1)|_p <= beta0 ( e^{-xi0 (t1-t0)} |dx(t0)|_p
///                         + sup_{a >= t0} || dw ||_{L^s(a, a+1; weight)} ).
/// The supremum runs over full unit windows inside the sampled range.
EstimateReport verify_stepanov_estimate(const Trajectory& a,
                                        const Trajectory& b,
                                        const CertificateH1& cert,
                                        double beta0, double xi0, double s,
                                        const Vector& weight,
                                        const WindowSpec& ws = {},
                                        double tol = kAutoTol);

/// Stepanov input-to-output estimate from a full certificate: for sampled t0,
///   sup_{a >= t0} || dy2 ||_{L^1(a, a+1; q)}
///   <= beta0 |dx(t0)|_p + (beta0 + e^{xi}) sup_{a >= t0} || dw ||_{L^1(a, a+1; r)}.
EstimateReport verify_stepanov_io_estimate(const Trajectory& a,
                                           const Trajectory& b,
                                           const CertificateH2& cert,
                                           double beta0,
                                           const WindowSpec& ws = {},
                                           double tol = kAutoTol);

/// Cumulative input-output comparison from time zero: at every grid point t,
///   int_0^t e^{xi s} |dy2(s)|_q ds <= int_0^t e^{xi s} |dw(s)|_r ds + tol.
/// Margin is the worst slack over the grid. Intended for moderate xi * t.
EstimateReport verify_cumulative_io_bound(const Trajectory& a,
                                          const Trajectory& b, double xi,
                                          const Vector& q, const Vector& r,
                                          double tol);

enum class ConvergenceMode { Plain, Exponential };

struct ConvergenceReport {
  bool converged = false;
  double final_deviation = 0.0;
  /// Least-squares slope of log(deviation) over the trailing half of the
  /// samples; -infinity when the tail sits at numerical zero.
  double rate = 0.0;
};

ConvergenceReport convergence_diagnostic(const std::vector<double>& times,
                                         const std::vector<double>& deviations,
                                         ConvergenceMode mode, double tol);

/// Euclidean distance of each sample to a fixed target state.
std::vector<double> deviation_norms(const Trajectory& traj, const Vector& target);

/// Euclidean distance between paired samples of two trajectories on the same
/// grid.
std::vector<double> difference_norms(const Trajectory& a, const Trajectory& b);

/// Least-squares slope of log(v) against t, ignoring entries below 1e-300.
/// Returns -infinity when fewer than two usable entries remain.
double log_slope(const std::vector<double>& t, const std::vector<double>& v);

/// sup over grid times t >= t_min (with t + tau still sampled) of
/// |x(t + tau) - x(t)| in max norm; tau must be a grid multiple.
double periodic_response_residual(const Trajectory& traj, double tau,
                                  double t_min);

}  // namespace lurecert
