// Random problem instances shared by the property tests and the acceptance
// study. Everything is driven by an explicit engine so failures reproduce.
#pragma once

#include "lurecert/certify.hpp"
#include "lurecert/nonlinearity.hpp"
#include "lurecert/signals.hpp"
#include "lurecert/system.hpp"

#include <random>
#include <vector>

namespace lurecert::testgen {

inline Matrix random_nonneg(std::mt19937_64& rng, int rows, int cols,
                            double density = 0.7, double scale = 1.0) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  Matrix M = Matrix::Zero(rows, cols);
  for (int i = 0; i < rows; ++i)
    for (int j = 0; j < cols; ++j)
      if (unit(rng) < density) M(i, j) = scale * unit(rng);
  return M;
}

// Metzler and Hurwitz by strict diagonal dominance (Gershgorin).
inline Matrix random_metzler_hurwitz(std::mt19937_64& rng, int n) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::uniform_real_distribution<double> margin(0.5, 2.0);
  Matrix A = random_nonneg(rng, n, n, 0.6, 1.0);
  for (int i = 0; i < n; ++i) {
    double off = 0.0;
    for (int j = 0; j < n; ++j)
      if (j != i) off += A(i, j);
    A(i, i) = -off - margin(rng);
  }
  return A;
}

// Metzler with no stability guarantee; roughly half the draws are unstable.
inline Matrix random_metzler(std::mt19937_64& rng, int n) {
  Matrix A = random_metzler_hurwitz(rng, n);
  std::uniform_real_distribution<double> shift(-1.0, 2.5);
  A.diagonal().array() += shift(rng);
  return A;
}

struct RandomInstance {
  LureSystem sys;
  Nonlinearity f;
  double theta = 0.0;  // target spectral radius of the loop gain
};

// A positive four-block system whose loop gain is rescaled so that
// rho(G11(0) Delta) lands at a prescribed value in (0, 1); the attached
// nonlinearity meets its increment bound with equality at the origin.
inline RandomInstance random_certified_instance(std::mt19937_64& rng,
                                                int n_max = 6) {
  std::uniform_int_distribution<int> dim(2, n_max);
  std::uniform_real_distribution<double> theta_dist(0.2, 0.9);
  for (;;) {
    const int n = dim(rng);
    const int m1 = std::uniform_int_distribution<int>(1, 3)(rng);
    const int p1 = std::uniform_int_distribution<int>(1, 3)(rng);
    const int m2 = std::uniform_int_distribution<int>(1, 2)(rng);
    const int p2 = std::uniform_int_distribution<int>(1, 2)(rng);

    const Matrix A = random_metzler_hurwitz(rng, n);
    const Matrix B1 = random_nonneg(rng, n, m1, 0.8);
    Matrix B2 = random_nonneg(rng, n, m2, 0.8);
    if (B2.cwiseAbs().maxCoeff() == 0.0) B2(0, 0) = 1.0;
    const Matrix C1 = random_nonneg(rng, p1, n, 0.8);
    Matrix C2 = random_nonneg(rng, p2, n, 0.8);
    if (C2.cwiseAbs().maxCoeff() == 0.0) C2(0, n - 1) = 1.0;
    const LureSystem sys(A, B1, B2, C1, C2);

    Matrix Delta0 = random_nonneg(rng, m1, p1, 0.8);
    Delta0.array() += 0.05;  // keep the loop alive
    const Matrix G0 = transfer_block(sys, 0.0, 1, 1);
    const double rho0 = spectral_radius(G0 * Delta0);
    if (rho0 < 1e-8) continue;
    const double theta = theta_dist(rng);
    const Matrix Delta = (theta / rho0) * Delta0;

    Nonlinearity f;
    f.m1 = m1;
    f.p1 = p1;
    f.Delta = Delta;
    f.time_varying = false;
    f.name = "random_tanh";
    f.eval = [Delta, m1](double, const Vector& z) {
      Vector out = Vector::Zero(m1);
      for (Eigen::Index i = 0; i < Delta.rows(); ++i)
        for (Eigen::Index j = 0; j < Delta.cols(); ++j)
          out[i] += Delta(i, j) * std::tanh(z[j]);
      return out;
    };
    return RandomInstance{sys, std::move(f), theta};
  }
}

inline Signal random_forcing(std::mt19937_64& rng, int dim) {
  std::uniform_real_distribution<double> offset(0.5, 1.5);
  std::uniform_real_distribution<double> amp(0.0, 0.5);
  std::uniform_real_distribution<double> omega(0.5, 3.0);
  std::uniform_real_distribution<double> phase(0.0, 6.283185307179586);
  std::vector<std::vector<TrigTerm>> terms(dim);
  Vector off(dim);
  for (int i = 0; i < dim; ++i) {
    off[i] = offset(rng);
    terms[i].push_back({amp(rng), omega(rng), phase(rng)});
    terms[i].push_back({amp(rng), omega(rng), phase(rng)});
  }
  return make_trig_signal(terms, off);
}

inline Vector random_state(std::mt19937_64& rng, int n, double scale = 2.0) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  Vector x(n);
  for (int i = 0; i < n; ++i) x[i] = scale * unit(rng);
  return x;
}

}  // namespace lurecert::testgen
