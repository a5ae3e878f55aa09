#pragma once

#include <Eigen/Dense>

namespace lurecert {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

/// Default absolute tolerance for componentwise cone comparisons.
inline constexpr double kConeTol = 1e-9;

/// Entries with magnitude below this are treated as structural zeros.
inline constexpr double kPatternTol = 1e-12;

/// True if every entry of M is >= -tol.
bool is_nonneg(const Matrix& M, double tol = kConeTol);

/// True if every entry of M is > tol.
bool is_strictly_positive(const Matrix& M, double tol = kConeTol);

/// Weighted one-seminorm v^T |z|. Requires v >= 0 and matching sizes.
/// A norm on R^n whenever v is strictly positive.
double weighted_seminorm(const Vector& z, const Vector& v);

/// True if every off-diagonal entry of M is >= -tol. Requires M square.
bool is_metzler(const Matrix& M, double tol = kConeTol);

/// Largest real part over the spectrum of M. Throws std::runtime_error if the
/// QR iteration fails to converge.
double spectral_abscissa(const Matrix& M);

/// Largest modulus over the spectrum of M. Throws on QR iteration failure.
double spectral_radius(const Matrix& M);

/// True if spectral_abscissa(M) < 0.
bool is_hurwitz(const Matrix& M);

/// For Metzler M, decides Hurwitz both through the spectral abscissa and
/// through the sign of M^{-1} (a Metzler matrix is Hurwitz exactly when it is
/// invertible with nonpositive inverse). Throws std::logic_error if the two
/// routes disagree outside a small neutral band around the boundary.
bool is_hurwitz_metzler_crosscheck(const Matrix& M);

/// True if the directed graph with an edge j -> i whenever |M(i,j)| exceeds
/// the pattern tolerance is strongly connected. Uses Tarjan's SCC algorithm.
bool is_irreducible(const Matrix& M, double pattern_tol = kPatternTol);

struct PerronPair {
  double rho = 0.0;   // spectral radius
  Vector v;           // left eigenvector, strictly positive, sums to 1
};

/// Dominant left eigenpair of a nonnegative irreducible matrix, computed by
/// shifted power iteration on M^T + cI (the shift makes the iteration
/// converge even for imprimitive matrices). Throws std::invalid_argument on a
/// negative or reducible input and std::runtime_error on stagnation.
PerronPair perron_left_vector(const Matrix& M, double residual_tol = 1e-10,
                              int max_iter = 200000);

/// e^{Mt} by scaling and squaring with a degree-13 Pade approximant.
/// For Metzler M and t >= 0 the result is entrywise nonnegative; entries in
/// [-1e-12, 0) are clamped to zero and anything below that range raises
/// std::runtime_error.
Matrix matrix_exp(const Matrix& M, double t);

}  // namespace lurecert
