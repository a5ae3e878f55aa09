#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "generators.hpp"
#include "lurecert/builtin.hpp"
#include "lurecert/certify.hpp"

#include <cmath>
#include <random>

using namespace lurecert;

TEST_CASE("three equivalent routes to the small-gain hypothesis") {
  // (i) a strictly positive certificate exists at some positive rate,
  // (ii) the closed loop is Hurwitz for every increment matrix below the
  //      bound, (iii) the open loop is Hurwitz with loop gain radius < 1.
  std::mt19937_64 rng(401);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  int holds_count = 0;
  for (int trial = 0; trial < 200; ++trial) {
    testgen::RandomInstance inst = testgen::random_certified_instance(rng, 5);
    Matrix Delta = inst.f.Delta;
    const bool push_unstable = trial % 2 == 1;
    if (push_unstable) Delta *= 1.5 / inst.theta;  // radius 1.5

    const H1Report rep = check_H1(inst.sys, Delta);
    CHECK(rep.routes_agree);

    const Matrix G0 = transfer_block(inst.sys, 0.0, 1, 1);
    const bool route_iii =
        is_hurwitz(inst.sys.A()) && spectral_radius(G0 * Delta) < 1.0;
    CHECK(rep.holds == route_iii);

    const bool route_ii_full = is_hurwitz(inst.sys.closed_loop_A(Delta));
    CHECK(rep.holds == route_ii_full);
    if (rep.holds) {
      ++holds_count;
      // sampled interior increment matrices keep the loop stable
      for (int probe = 0; probe < 3; ++probe) {
        Matrix S = Delta;
        for (Eigen::Index i = 0; i < S.rows(); ++i)
          for (Eigen::Index j = 0; j < S.cols(); ++j) S(i, j) *= unit(rng);
        CHECK(is_hurwitz(inst.sys.closed_loop_A(S)));
      }
      // route (i): the constructed certificate verifies
      const CertificateH1 cert = construct_H1_certificate(inst.sys, Delta);
      const CertificateCheck check = verify_H1_certificate(inst.sys, Delta, cert);
      CHECK(check.ok);
      CHECK(check.margin >= -1e-10);
      CHECK(check.min_p > 0.0);
      CHECK(cert.xi > 0.0);
    }
  }
  CHECK(holds_count == 100);
}

TEST_CASE("certificate construction rejects an unattainable rate") {
  const LureSystem sys = builtin::example2_system();
  const Matrix Delta = Matrix::Ones(1, 1);
  const double decay = -spectral_abscissa(sys.closed_loop_A(Delta));
  CHECK(decay == doctest::Approx(3.0).epsilon(1e-9));
  CHECK_THROWS_AS(construct_H1_certificate(sys, Delta, decay + 0.5,
                                           Vector::Ones(4)),
                  std::invalid_argument);
  const CertificateH1 cert =
      construct_H1_certificate(sys, Delta, 0.1, Vector::Ones(4));
  CHECK(verify_H1_certificate(sys, Delta, cert).ok);
}

TEST_CASE("linear dissipativity construction and frequency route agree") {
  std::mt19937_64 rng(733);
  for (int trial = 0; trial < 60; ++trial) {
    const int n = 2 + static_cast<int>(rng() % 5);
    const int m = 1 + static_cast<int>(rng() % 2);
    const int p = 1 + static_cast<int>(rng() % 2);
    const Matrix A = testgen::random_metzler_hurwitz(rng, n);
    const Matrix B = testgen::random_nonneg(rng, n, m, 0.9);
    const Matrix C = testgen::random_nonneg(rng, p, n, 0.9);
    const Matrix D = testgen::random_nonneg(rng, p, m, 0.3);
    const double xi = 0.1;
    Vector q(p);
    for (int i = 0; i < p; ++i) q[i] = 0.5 + 0.001 * (rng() % 1000);

    // frequency response at -xi computed independently
    const Matrix resolvent =
        (-xi * Matrix::Identity(n, n) - A).fullPivLu().inverse();
    const Vector gain_ref = (C * resolvent * B + D).transpose() * q;

    Vector r_ok = gain_ref.array() + 0.01;
    const DissipationReport ok_rep =
        check_linear_dissipativity(A, B, C, D, xi, q, r_ok);
    CHECK(ok_rep.holds);
    CHECK(ok_rep.residual_state <= 1e-9);
    CHECK(ok_rep.residual_input <= 1e-9);
    CHECK((ok_rep.gain - gain_ref).cwiseAbs().maxCoeff() <= 1e-9);
    CHECK(ok_rep.l.cwiseAbs().maxCoeff() <= 1e-12);
    CHECK(ok_rep.k.minCoeff() >= 0.0);

    Eigen::Index worst = 0;
    gain_ref.maxCoeff(&worst);
    if (gain_ref[worst] > 1e-6) {
      Vector r_bad = gain_ref;
      r_bad[worst] *= 0.5;  // below the required budget, still nonnegative
      const DissipationReport bad_rep =
          check_linear_dissipativity(A, B, C, D, xi, q, r_bad);
      CHECK_FALSE(bad_rep.holds);
    }
  }
}

TEST_CASE("dissipation certificate for the four-state example") {
  const LureSystem sys = builtin::example2_system();
  const Matrix Delta = Matrix::Ones(1, 1);
  Vector q(1), r(1);
  q << 1.0;
  r << 0.05;
  const H2Report rep = check_H2(sys, Delta, 0.1, q, r);

  REQUIRE(rep.status == H2Status::Ok);
  CHECK(rep.holds);
  // storage vector, closed forms 1/20.01 and 1/6.9 + 1/20.01
  CHECK(rep.cert.p[0] == doctest::Approx(0.04997501249375312).epsilon(1e-12));
  CHECK(rep.cert.p[1] == doctest::Approx(0.04997501249375312).epsilon(1e-12));
  CHECK(rep.cert.p[2] == doctest::Approx(0.04997501249375312).epsilon(1e-12));
  CHECK(rep.cert.p[3] == doctest::Approx(0.19490254872563717).epsilon(1e-12));
  CHECK(rep.residual_state <= 1e-9);
  CHECK(rep.residual_input <= 1e-9);
  CHECK(rep.woodbury_gap >= 0.0);
  CHECK(rep.woodbury_gap <= 1e-8);
  CHECK(rep.margin[0] == doctest::Approx(2.498750624688e-5).epsilon(1e-6));
  CHECK(rep.max_q_scale == doctest::Approx(1.0005).epsilon(1e-9));
  CHECK(rep.p_strictly_positive);
  CHECK(rep.observability_ok);
}

TEST_CASE("dissipation check failure modes are distinguished") {
  const LureSystem sys = builtin::example2_system();
  const Matrix Delta = Matrix::Ones(1, 1);
  Vector q(1), r(1);
  q << 1.0;

  r << 0.05;
  const H2Report pre = check_H2(sys, Delta, 3.5, q, r);
  CHECK(pre.status == H2Status::PreconditionFailed);
  CHECK_FALSE(pre.holds);
  CHECK_FALSE(pre.message.empty());

  r << 0.04;  // below the closed-loop gain 1/20.01
  const H2Report infeasible = check_H2(sys, Delta, 0.1, q, r);
  CHECK(infeasible.status == H2Status::Infeasible);
  CHECK_FALSE(infeasible.holds);
  CHECK(infeasible.margin.minCoeff() < 0.0);
}

TEST_CASE("forcing constants for the exponentially weighted norms") {
  CHECK(alpha_s(0.1, 1.0) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(alpha_s(0.1, std::numeric_limits<double>::infinity()) ==
        doctest::Approx(10.0).epsilon(1e-12));
  CHECK(alpha_s(0.1, 2.0) ==
        doctest::Approx(2.23606797749979).epsilon(1e-12));
  CHECK(stepanov_beta0(0.1) ==
        doctest::Approx(11.613502862850691).epsilon(1e-12));
  CHECK(stepanov_beta0(5.0) >= 1.0);
  CHECK_THROWS_AS(stepanov_beta0(0.0), std::invalid_argument);
}

TEST_CASE("threshold bisection recovers a scalar pole") {
  // scalar plant dx = -2x + u, y = x: the loop is stable iff the slope < 2
  const LureSystem sys(Matrix::Constant(1, 1, -2.0), Matrix::Ones(1, 1),
                       Matrix::Ones(1, 1), Matrix::Ones(1, 1),
                       Matrix::Ones(1, 1));
  const ThresholdResult res =
      find_h1_threshold(sys, Matrix::Ones(1, 1), 0.0, 10.0, 1e-4);
  CHECK(res.threshold == doctest::Approx(2.0).epsilon(1e-3));
  CHECK(res.scale_low < res.scale_high);
  CHECK(res.scale_high - res.scale_low <= 1e-4 + 1e-12);

  CHECK_THROWS_AS(find_h1_threshold(sys, Matrix::Ones(1, 1), 5.0, 10.0, 1e-3),
                  std::runtime_error);
  CHECK_THROWS_AS(find_h1_threshold(sys, Matrix::Ones(1, 1), 0.0, 1.0, 1e-3),
                  std::runtime_error);
}

TEST_CASE("three-state example loop gain and threshold bracket") {
  const LureSystem sys = builtin::example1_system();
  const Matrix G0 = transfer_block(sys, 0.0, 1, 1);
  CHECK(spectral_radius(G0) ==
        doctest::Approx(0.011123470522803113).epsilon(1e-10));
  CHECK(G0.minCoeff() >= 0.0);

  const H1Report at89 = check_H1(sys, 89.0 * Matrix::Identity(3, 3));
  CHECK(at89.holds);
  CHECK(at89.rho == doctest::Approx(0.98998887652948).epsilon(1e-9));
  const H1Report at91 = check_H1(sys, 91.0 * Matrix::Identity(3, 3));
  CHECK_FALSE(at91.holds);
}

TEST_CASE("transfer evaluation rejects spectrum points") {
  const LureSystem sys = builtin::example2_system();
  CHECK_THROWS_AS(transfer_block(sys, -7.0, 1, 1), std::invalid_argument);
  const TransferBlocks blocks = transfer_eval(sys, 0.0);
  CHECK(blocks.G11(0, 0) == doctest::Approx(4.0 / 7.0).epsilon(1e-12));
  CHECK(blocks.G22(0, 0) == doctest::Approx(0.0).epsilon(1e-15));
}

TEST_CASE("loop shift preserves trajectories of the original system") {
  const LureSystem sys = builtin::example2_system();
  const Nonlinearity f = builtin::example2_nonlinearity();
  const Matrix K = Matrix::Constant(1, 1, 0.5);
  const auto [shifted_sys, shifted_f] =
      loop_shift(sys, f, K, Matrix::Constant(1, 1, 0.5));
  // A + B1 K C1 must match and the shifted nonlinearity compensates exactly
  CHECK((shifted_sys.A() - (sys.A() + sys.B1() * K * sys.C1()))
            .cwiseAbs()
            .maxCoeff() <= 1e-14);
  Vector y(1);
  for (const double z : {-2.0, -0.3, 0.0, 0.7, 5.0}) {
    y[0] = z;
    const Vector lhs = sys.B1() * f(0.0, y);
    const Vector rhs =
        shifted_sys.B1() * shifted_f(0.0, y) + sys.B1() * K * y;
    CHECK((lhs - rhs).cwiseAbs().maxCoeff() <= 1e-12);
  }
}

TEST_CASE("increment bound verifier separates honest and inflated bounds") {
  std::mt19937_64 rng(91);
  const Nonlinearity honest = builtin::example2_nonlinearity();
  const IncrementBoundReport ok = verify_increment_bound(honest, 200, 4.0);
  CHECK(ok.holds);
  CHECK(ok.worst_ratio <= 1.0 + 1e-9);

  Nonlinearity lying = honest;
  lying.Delta = Matrix::Constant(1, 1, 0.2);  // claims a slope it exceeds
  const IncrementBoundReport bad = verify_increment_bound(lying, 200, 4.0);
  CHECK_FALSE(bad.holds);
  (void)rng;
}
