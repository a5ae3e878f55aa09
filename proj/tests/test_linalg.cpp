#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "generators.hpp"
#include "lurecert/linalg.hpp"

#include <cmath>
#include <random>

using namespace lurecert;

TEST_CASE("weighted seminorm matches a hand computation") {
  Vector z(3), v(3);
  z << 0.3, -0.7, 0.2;
  v << 0.5, 0.25, 1.2;
  CHECK(weighted_seminorm(z, v) == doctest::Approx(0.565).epsilon(1e-15));
}

TEST_CASE("weighted seminorm input validation") {
  Vector z(2), v(3);
  z << 1.0, 2.0;
  v << 1.0, 1.0, 1.0;
  CHECK_THROWS_AS(weighted_seminorm(z, v), std::invalid_argument);
  Vector vneg(2);
  vneg << 1.0, -0.5;
  CHECK_THROWS_AS(weighted_seminorm(z, vneg), std::invalid_argument);
}

TEST_CASE("weighted seminorm is homogeneous and subadditive") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> coef(-2.0, 2.0);
  std::uniform_real_distribution<double> wdist(0.0, 2.0);
  for (int trial = 0; trial < 50; ++trial) {
    const int n = 1 + static_cast<int>(rng() % 6);
    Vector a(n), b(n), v(n);
    for (int i = 0; i < n; ++i) {
      a[i] = coef(rng);
      b[i] = coef(rng);
      v[i] = wdist(rng);
    }
    const double lam = coef(rng);
    CHECK(weighted_seminorm(lam * a, v) ==
          doctest::Approx(std::abs(lam) * weighted_seminorm(a, v))
              .epsilon(1e-12));
    CHECK(weighted_seminorm(a + b, v) <=
          weighted_seminorm(a, v) + weighted_seminorm(b, v) + 1e-12);
  }
}

TEST_CASE("metzler recognition") {
  Matrix M(2, 2);
  M << -1.0, 0.5, 0.0, -2.0;
  CHECK(is_metzler(M));
  M(0, 1) = -0.5;
  CHECK_FALSE(is_metzler(M));
  CHECK(is_metzler(Matrix::Identity(3, 3) * -4.0));
}

TEST_CASE("spectral abscissa and radius on triangular oracles") {
  Matrix T(2, 2);
  T << -3.0, 1.0, 0.0, -0.5;
  CHECK(spectral_abscissa(T) == doctest::Approx(-0.5).epsilon(1e-12));
  CHECK(spectral_radius(Matrix::Ones(4, 4)) ==
        doctest::Approx(4.0).epsilon(1e-12));
  Matrix R(2, 2);
  R << 0.0, 1.0, -1.0, 0.0;
  CHECK(spectral_abscissa(R) == doctest::Approx(0.0).epsilon(1e-12));
  CHECK_FALSE(is_hurwitz(R));
  CHECK(is_hurwitz(Matrix::Identity(3, 3) * -0.1));
}

TEST_CASE("positive semigroup and inverse-sign facts on random Metzler") {
  std::mt19937_64 rng(29);
  for (int trial = 0; trial < 100; ++trial) {
    const int n = 2 + static_cast<int>(rng() % 7);
    const Matrix M = testgen::random_metzler(rng, n);

    for (const double t : {0.1, 1.0}) {
      const Matrix E = matrix_exp(M, t);
      CHECK(E.minCoeff() >= -1e-12);
    }

    const bool hurwitz = is_hurwitz(M);
    CHECK(is_hurwitz_metzler_crosscheck(M) == hurwitz);
    if (hurwitz) {
      const Matrix inv = M.fullPivLu().inverse();
      CHECK(inv.maxCoeff() <= 1e-10);
    }
  }
}

TEST_CASE("matrix exponential closed forms") {
  Matrix D = Matrix::Zero(3, 3);
  D.diagonal() << -1.0, 0.5, -2.0;
  const Matrix E = matrix_exp(D, 0.3);
  for (int i = 0; i < 3; ++i)
    CHECK(E(i, i) == doctest::Approx(std::exp(0.3 * D(i, i))).epsilon(1e-14));

  Matrix N(2, 2);
  N << 0.0, 1.0, 0.0, 0.0;
  const Matrix EN = matrix_exp(N, 0.7);
  CHECK(EN(0, 0) == doctest::Approx(1.0));
  CHECK(EN(0, 1) == doctest::Approx(0.7));
  CHECK(EN(1, 0) == doctest::Approx(0.0));

  Matrix R(2, 2);
  R << 0.0, 1.0, -1.0, 0.0;
  const Matrix ER = matrix_exp(R, 0.7);
  CHECK(ER(0, 0) == doctest::Approx(std::cos(0.7)).epsilon(1e-13));
  CHECK(ER(0, 1) == doctest::Approx(std::sin(0.7)).epsilon(1e-13));
  CHECK(ER(1, 0) == doctest::Approx(-std::sin(0.7)).epsilon(1e-13));
}

TEST_CASE("matrix exponential semigroup property") {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 20; ++trial) {
    const int n = 2 + static_cast<int>(rng() % 5);
    const Matrix M = testgen::random_metzler(rng, n);
    const Matrix whole = matrix_exp(M, 1.0);
    const Matrix half = matrix_exp(M, 0.5);
    CHECK((whole - half * half).cwiseAbs().maxCoeff() <=
          1e-10 * std::max(1.0, whole.cwiseAbs().maxCoeff()));
  }
}

TEST_CASE("irreducibility classification") {
  Matrix cycle = Matrix::Zero(4, 4);
  cycle(0, 1) = 1.0;
  cycle(1, 2) = 1.0;
  cycle(2, 3) = 1.0;
  cycle(3, 0) = 1.0;
  CHECK(is_irreducible(cycle));

  Matrix blockdiag = Matrix::Zero(4, 4);
  blockdiag.block(0, 0, 2, 2) = Matrix::Ones(2, 2);
  blockdiag.block(2, 2, 2, 2) = Matrix::Ones(2, 2);
  CHECK_FALSE(is_irreducible(blockdiag));

  Matrix upper = Matrix::Zero(3, 3);
  upper(0, 1) = 1.0;
  upper(1, 2) = 1.0;
  CHECK_FALSE(is_irreducible(upper));

  CHECK(is_irreducible(Matrix::Zero(1, 1)));
  CHECK(is_irreducible(Matrix::Ones(3, 3)));
}

TEST_CASE("Perron left vector on closed-form cases") {
  Matrix swap(2, 2);
  swap << 0.0, 1.0, 1.0, 0.0;
  const PerronPair pp = perron_left_vector(swap);
  CHECK(pp.rho == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(pp.v[0] == doctest::Approx(0.5).epsilon(1e-10));
  CHECK(pp.v[1] == doctest::Approx(0.5).epsilon(1e-10));

  const PerronPair ones = perron_left_vector(Matrix::Ones(3, 3));
  CHECK(ones.rho == doctest::Approx(3.0).epsilon(1e-12));
  for (int i = 0; i < 3; ++i)
    CHECK(ones.v[i] == doctest::Approx(1.0 / 3.0).epsilon(1e-10));
}

TEST_CASE("Perron residual stays small on random irreducible matrices") {
  std::mt19937_64 rng(83);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (int trial = 0; trial < 40; ++trial) {
    const int n = 2 + static_cast<int>(rng() % 15);
    Matrix M(n, n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) M(i, j) = 0.05 + unit(rng);
    const PerronPair pp = perron_left_vector(M);
    const Vector residual = M.transpose() * pp.v - pp.rho * pp.v;
    CHECK(residual.cwiseAbs().maxCoeff() <= 1e-10 * std::max(1.0, pp.rho));
    CHECK(pp.v.minCoeff() > 0.0);
    CHECK(pp.rho == doctest::Approx(spectral_radius(M)).epsilon(1e-10));
  }
}

TEST_CASE("Perron rejects reducible or signed input") {
  Matrix upper = Matrix::Zero(2, 2);
  upper(0, 1) = 1.0;
  CHECK_THROWS_AS(perron_left_vector(upper), std::invalid_argument);
  Matrix neg(2, 2);
  neg << 1.0, -0.5, 1.0, 1.0;
  CHECK_THROWS_AS(perron_left_vector(neg), std::invalid_argument);
}
