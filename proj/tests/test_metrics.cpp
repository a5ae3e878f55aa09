#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "generators.hpp"
#include "lurecert/builtin.hpp"
#include "lurecert/metrics.hpp"
#include "lurecert/simulate.hpp"

#include <cmath>
#include <random>

using namespace lurecert;

namespace {

struct CertifiedPair {
  testgen::RandomInstance inst;
  CertificateH1 cert;
  Trajectory a;
  Trajectory b;
};

CertifiedPair make_pair(std::mt19937_64& rng, double horizon = 12.0,
                        double dt = 5e-3) {
  testgen::RandomInstance inst = testgen::random_certified_instance(rng, 5);
  const CertificateH1 cert =
      construct_H1_certificate(inst.sys, inst.f.Delta);
  SimConfig cfg;
  cfg.dt = dt;
  cfg.horizon = horizon;
  Trajectory a =
      simulate(inst.sys, inst.f, testgen::random_forcing(rng, inst.sys.m2()),
               testgen::random_state(rng, inst.sys.n()), cfg);
  Trajectory b =
      simulate(inst.sys, inst.f, testgen::random_forcing(rng, inst.sys.m2()),
               testgen::random_state(rng, inst.sys.n()), cfg);
  return CertifiedPair{std::move(inst), cert, std::move(a), std::move(b)};
}

Trajectory constant_series(double value, int samples, double dt) {
  Trajectory t;
  t.t0 = 0.0;
  t.dt = dt;
  t.x = Matrix::Constant(samples, 1, value);
  t.y1 = t.x;
  t.y2 = t.x;
  t.w = Matrix::Zero(samples, 1);
  return t;
}

}  // namespace

TEST_CASE("weighted integral norms against closed forms") {
  const int samples = 2001;
  const double dt = 1e-3;
  const double T = dt * (samples - 1);
  Matrix series = Matrix::Constant(samples, 1, 0.75);
  Vector weight = Vector::Ones(1);

  NormSpec l1;
  l1.s = 1.0;
  l1.weight = weight;
  CHECK(weighted_Ls_norm(series, 0.0, dt, l1, 0.0, T) ==
        doctest::Approx(0.75 * T).epsilon(1e-12));

  NormSpec l2;
  l2.s = 2.0;
  l2.weight = weight;
  CHECK(weighted_Ls_norm(series, 0.0, dt, l2, 0.0, T) ==
        doctest::Approx(0.75 * std::sqrt(T)).epsilon(1e-12));

  NormSpec linf;
  linf.s = std::numeric_limits<double>::infinity();
  linf.weight = weight;
  CHECK(weighted_Ls_norm(series, 0.0, dt, linf, 0.0, T) ==
        doctest::Approx(0.75).epsilon(1e-12));

  NormSpec weighted;
  weighted.s = 1.0;
  weighted.alpha = 0.3;
  weighted.weight = weight;
  const double exact = 0.75 * (std::exp(0.3 * T) - 1.0) / 0.3;
  CHECK(weighted_Ls_norm(series, 0.0, dt, weighted, 0.0, T) ==
        doctest::Approx(exact).epsilon(1e-6));
}

TEST_CASE("unit-window supremum norm on periodic data") {
  const double dt = 1e-3;
  const int samples = 20001;
  Matrix series(samples, 1);
  for (int j = 0; j < samples; ++j)
    series(j, 0) = std::sin(2.0 * 3.141592653589793 * j * dt);
  const double s1 = stepanov_norm(series, dt, 1.0, Vector::Ones(1));
  CHECK(s1 == doctest::Approx(2.0 / 3.141592653589793).epsilon(1e-3));
  const double sinf = stepanov_norm(
      series, dt, std::numeric_limits<double>::infinity(), Vector::Ones(1));
  CHECK(sinf == doctest::Approx(1.0).epsilon(1e-4));
  // Hoelder ordering between window exponents
  const double s2 = stepanov_norm(series, dt, 2.0, Vector::Ones(1));
  CHECK(s1 <= s2 + 1e-9);
  CHECK(s2 <= sinf + 1e-9);
}

TEST_CASE("contraction estimate holds on random certified pairs") {
  std::mt19937_64 rng(1234);
  int flipped = 0;
  for (int trial = 0; trial < 40; ++trial) {
    CertifiedPair cp = make_pair(rng);
    const Vector weight = cp.inst.sys.B2().transpose() * cp.cert.p;
    WindowSpec ws;
    ws.seed = trial;
    const EstimateReport rep =
        verify_contraction_estimate(cp.a, cp.b, cp.cert, weight, ws);
    CHECK(rep.holds);
    CHECK(rep.windows_checked > 100);

    CertificateH1 bad = cp.cert;
    bad.xi *= 10.0;
    const EstimateReport corrupted =
        verify_contraction_estimate(cp.a, cp.b, bad, weight, ws);
    if (!corrupted.holds) ++flipped;
  }
  CHECK(flipped >= 1);
}

TEST_CASE("supply-rate estimate holds when the gain condition is feasible") {
  std::mt19937_64 rng(4321);
  int checked = 0;
  int flipped = 0;
  for (int trial = 0; trial < 60 && checked < 25; ++trial) {
    CertifiedPair cp = make_pair(rng);
    const double decay =
        -spectral_abscissa(cp.inst.sys.closed_loop_A(cp.inst.f.Delta));
    const double xi = 0.5 * decay;
    const Vector q = Vector::Ones(cp.inst.sys.p2());
    // probe the gain first, then pick a feasible budget
    const H2Report probe =
        check_H2(cp.inst.sys, cp.inst.f.Delta, xi, q,
                 Vector::Zero(cp.inst.sys.m2()));
    REQUIRE(probe.status != H2Status::PreconditionFailed);
    const Vector r = probe.gain.array() * 1.25 + 0.01;
    const H2Report rep = check_H2(cp.inst.sys, cp.inst.f.Delta, xi, q, r);
    // draws whose storage vector is not strictly positive stay infeasible
    // by design; only the certifiable subset is exercised here
    if (!rep.holds) continue;
    ++checked;

    WindowSpec ws;
    ws.seed = 1000 + trial;
    const EstimateReport est =
        verify_dissipation_estimate(cp.a, cp.b, rep.cert, ws);
    CHECK(est.holds);

    CertificateH2 bad = rep.cert;
    bad.xi *= 10.0;
    const EstimateReport corrupted =
        verify_dissipation_estimate(cp.a, cp.b, bad, ws);
    if (!corrupted.holds) ++flipped;
  }
  CHECK(checked >= 25);
  CHECK(flipped >= 1);
}

TEST_CASE("integrated norm estimate holds for several exponents") {
  std::mt19937_64 rng(777);
  for (int trial = 0; trial < 12; ++trial) {
    CertifiedPair cp = make_pair(rng);
    const Vector weight = cp.inst.sys.B2().transpose() * cp.cert.p;
    WindowSpec ws;
    ws.seed = 7 * trial;
    for (const double s :
         {1.0, 2.0, std::numeric_limits<double>::infinity()}) {
      const EstimateReport rep =
          verify_ls_estimate(cp.a, cp.b, cp.cert, s, weight, ws);
      CHECK(rep.holds);
    }
  }
}

TEST_CASE("window-supremum estimates hold with the explicit constants") {
  std::mt19937_64 rng(3131);
  for (int trial = 0; trial < 12; ++trial) {
    CertifiedPair cp = make_pair(rng, 15.0, 5e-3);
    const Vector weight = cp.inst.sys.B2().transpose() * cp.cert.p;
    const double beta0 = stepanov_beta0(cp.cert.xi);
    WindowSpec ws;
    ws.seed = 17 * trial;
    for (const double s : {1.0, std::numeric_limits<double>::infinity()}) {
      const EstimateReport rep = verify_stepanov_estimate(
          cp.a, cp.b, cp.cert, beta0, cp.cert.xi, s, weight, ws);
      CHECK(rep.holds);
    }
  }
}

TEST_CASE("cumulative gain bound on the four-state example pairs") {
  const LureSystem sys = builtin::example2_system();
  const Nonlinearity f = builtin::example2_nonlinearity();
  SimConfig cfg;
  cfg.dt = 1e-3;
  cfg.horizon = 20.0;
  const Trajectory a =
      simulate(sys, f, builtin::example2_almost_periodic(), Vector::Zero(4), cfg);
  const Trajectory b =
      simulate(sys, f, builtin::example2_asymptotically_ap(), Vector::Zero(4), cfg);
  Vector q(1), r(1);
  q << 1.0;
  r << 0.05;
  const EstimateReport rep = verify_cumulative_io_bound(a, b, 0.1, q, r, 1e-5);
  CHECK(rep.holds);

  // an inflated output weight must break the budget
  Vector q_big = q * 25.0;
  const EstimateReport broken =
      verify_cumulative_io_bound(a, b, 0.1, q_big, r, 1e-5);
  CHECK_FALSE(broken.holds);
}

TEST_CASE("convergence diagnostics read decay rates off the tail") {
  std::vector<double> t, v;
  for (int j = 0; j <= 1000; ++j) {
    t.push_back(0.01 * j);
    v.push_back(3.0 * std::exp(-2.0 * 0.01 * j));
  }
  const ConvergenceReport rep =
      convergence_diagnostic(t, v, ConvergenceMode::Exponential, 1e-2);
  CHECK(rep.converged);
  CHECK(rep.rate == doctest::Approx(-2.0).epsilon(1e-6));
  CHECK(rep.final_deviation == doctest::Approx(3.0 * std::exp(-20.0)));

  std::vector<double> flat(v.size(), 0.5);
  const ConvergenceReport stuck =
      convergence_diagnostic(t, flat, ConvergenceMode::Exponential, 1e-2);
  CHECK_FALSE(stuck.converged);
}

TEST_CASE("log slope fits a decaying exponential") {
  std::vector<double> t, v;
  for (int j = 0; j <= 200; ++j) {
    t.push_back(0.05 * j);
    v.push_back(7.0 * std::exp(-0.8 * 0.05 * j));
  }
  CHECK(log_slope(t, v) == doctest::Approx(-0.8).epsilon(1e-9));
}

TEST_CASE("periodic response residual at grid-aligned periods") {
  const double dt = 1e-3;
  const int samples = 5001;
  Trajectory traj = constant_series(0.0, samples, dt);
  for (int j = 0; j < samples; ++j)
    traj.x(j, 0) = std::sin(2.0 * 3.141592653589793 * j * dt);
  CHECK(periodic_response_residual(traj, 1.0, 1.0) <= 1e-10);

  for (int j = 0; j < samples; ++j)
    traj.x(j, 0) += 0.02 * std::exp(-0.5 * j * dt);
  CHECK(periodic_response_residual(traj, 1.0, 1.0) > 1e-4);

  CHECK_THROWS_AS(periodic_response_residual(traj, 0.2505, 1.0),
                  std::invalid_argument);
  CHECK_THROWS_AS(periodic_response_residual(traj, 1.0, 10.0),
                  std::invalid_argument);
}

TEST_CASE("grid compatibility is enforced between compared trajectories") {
  Trajectory a = constant_series(1.0, 101, 1e-2);
  Trajectory b = constant_series(1.0, 101, 2e-2);
  CertificateH1 cert{0.5, Vector::Ones(1)};
  CHECK_THROWS_AS(
      verify_contraction_estimate(a, b, cert, Vector::Ones(1), WindowSpec{}),
      std::invalid_argument);
  Trajectory c = constant_series(1.0, 100, 1e-2);
  CHECK_THROWS_AS(
      verify_contraction_estimate(a, c, cert, Vector::Ones(1), WindowSpec{}),
      std::invalid_argument);
}

TEST_CASE("difference and deviation norms are plain Euclidean rows") {
  Trajectory a = constant_series(2.0, 5, 0.1);
  Trajectory b = constant_series(-1.0, 5, 0.1);
  const std::vector<double> diff = difference_norms(a, b);
  REQUIRE(diff.size() == 5);
  for (const double d : diff) CHECK(d == doctest::Approx(3.0));
  const std::vector<double> dev = deviation_norms(a, Vector::Constant(1, 0.5));
  for (const double d : dev) CHECK(d == doctest::Approx(1.5));
}
