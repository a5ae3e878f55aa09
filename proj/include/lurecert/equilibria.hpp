#pragma once

#include "lurecert/nonlinearity.hpp"

#include <cstdint>

namespace lurecert {

/// Contraction weight for the fixed-point map
///   F(y) = G11(0) f(y) + C1 (-A)^{-1} B2 w*:
/// v >> 0 with v^T G11(0) Delta <= rho v^T and rho < 1, so F contracts the
/// v-weighted one-norm with factor rho.
struct PerronWeight {
  Vector v;
  double rho = 0.0;
};

/// Derives a contraction weight from the gain matrix L = G11(0) Delta:
/// the trivial weight when Delta = 0, the scalar entry when p1 = 1, and the
/// dominant left eigenvector when L is irreducible. Throws
/// std::runtime_error when the spectral bound is >= 1 (no contraction; use a
/// dissipation certificate instead) and std::invalid_argument when L is
/// reducible and non-scalar (supply a weight explicitly and validate it).
PerronWeight find_perron_weight(const LureSystem& sys, const Matrix& Delta);

struct WeightCheck {
  bool ok = false;
  double margin = 0.0;  // min over components of rho v - (G11(0) Delta)^T v
};

/// Checks a user-supplied weight: v strictly positive of size p1,
/// 0 <= rho < 1, and v^T G11(0) Delta <= rho v^T within tol.
WeightCheck validate_perron_weight(const LureSystem& sys, const Matrix& Delta,
                                   const PerronWeight& pw,
                                   double tol = kConeTol);

struct EquilibriumResult {
  Vector y_star;  // fixed point of F, the equilibrium feedback output C1 x*
  Vector x_star;  // equilibrium state
  double residual = 0.0;  // inf-norm of A x* + B1 f(C1 x*) + B2 w*
  int iterations = 0;
  /// Largest observed ratio of successive increment norms; certified to stay
  /// at or below rho, so an excess signals an invalid declared weight.
  double observed_ratio = 0.0;
  bool ratio_violated = false;
};

/// Fixed-point iteration for the equilibrium of the forced loop at constant
/// forcing w*. Stops once the a-posteriori geometric bound certifies
/// |y - y*|_v <= tol, then verifies the state equation residual is <= 10 tol
/// (iterating further if needed). Divergence or iteration exhaustion throws
/// std::runtime_error quoting the observed contraction ratio. Requires a
/// time-invariant nonlinearity.
EquilibriumResult solve_equilibrium(const LureSystem& sys,
                                    const Nonlinearity& f,
                                    const Vector& w_star,
                                    const PerronWeight& pw, double tol = 1e-10,
                                    int max_iter = 200000);

struct UniquenessReport {
  bool agree = false;
  int runs = 0;
  int diverged = 0;
  double max_spread = 0.0;  // max inf-distance of restart limits to baseline
};

/// Reruns the iteration from seeded random initial guesses spanning several
/// orders of magnitude; agree means every run converged to the baseline fixed
/// point within 100 tol.
UniquenessReport uniqueness_probe(const LureSystem& sys, const Nonlinearity& f,
                                  const Vector& w_star, const PerronWeight& pw,
                                  int restarts, std::uint64_t seed,
                                  double tol = 1e-10);

}  // namespace lurecert
