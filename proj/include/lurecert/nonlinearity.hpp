#pragma once

#include "lurecert/system.hpp"

#include <cstdint>
#include <functional>
#include <string>
#include <utility>
#include <vector>

namespace lurecert {

/// Feedback nonlinearity f : R x R^{p1} -> R^{m1} carrying its declared
/// incremental bound: |f(t, z1) - f(t, z2)| <= Delta |z1 - z2| componentwise,
/// uniformly in t, with Delta >= 0. The callable must be reentrant.
struct Nonlinearity {
  int m1 = 0;
  int p1 = 0;
  Matrix Delta;  // m1 x p1, nonnegative
  bool time_varying = false;
  std::string name;
  std::function<Vector(double, const Vector&)> eval;

  Vector operator()(double t, const Vector& z) const { return eval(t, z); }
};

/// f identically zero with Delta = 0 (the open-loop case).
Nonlinearity make_zero_nonlinearity(int m1, int p1);

/// Diagonal map f_i(z) = g(z_i) applied to each channel, with a shared scalar
/// slope bound: |g(a) - g(b)| <= slope_bound |a - b|. Delta = slope_bound * I.
Nonlinearity make_diagonal_nonlinearity(std::function<double(double)> g,
                                        double slope_bound, int channels,
                                        std::string name = "diagonal");

/// Scalar slope-plus-sine channel g(z) = (slope/2) z + (slope/2) sin z applied
/// diagonally. Exact incremental bound slope (the derivative lies in
/// [0, slope]).
Nonlinearity make_slope_sine_nonlinearity(double slope, int channels);

/// Scalar saturation g(z) = z / (1 + |z|) applied diagonally; slope bound 1.
Nonlinearity make_saturation_nonlinearity(int channels);

/// Linear map f(z) = S z with Delta = |S| (entrywise absolute value).
Nonlinearity make_linear_nonlinearity(Matrix S, std::string name = "linear");

struct IncrementBoundReport {
  bool holds = true;
  double worst_ratio = 0.0;  // max over samples of |df|_i / (Delta |dz|)_i
  double worst_violation = 0.0;
};

/// Randomized check of the declared incremental bound on sample pairs drawn
/// uniformly from [-radius, radius]^{p1} and, for time-varying f, times from
/// the given list. Violations beyond an absolute slack of 1e-9 fail the check.
IncrementBoundReport verify_increment_bound(const Nonlinearity& f, int samples,
                                            double radius,
                                            const std::vector<double>& times = {},
                                            std::uint64_t seed = 0);

/// Loop shifting: moves a linear gain K out of the nonlinearity, giving the
/// equivalent system (A + B1 K C1, f(t,z) - K z). The caller supplies the
/// incremental bound of the shifted nonlinearity. The shifted state matrix
/// must remain Metzler.
std::pair<LureSystem, Nonlinearity> loop_shift(const LureSystem& sys,
                                               const Nonlinearity& f,
                                               const Matrix& K,
                                               const Matrix& Delta_shifted);

}  // namespace lurecert
