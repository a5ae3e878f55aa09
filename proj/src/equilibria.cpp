#include "lurecert/equilibria.hpp"

#include <Eigen/LU>

#include <cmath>
#include <random>
#include <stdexcept>

namespace lurecert {

namespace {

struct FixedPointMap {
  Matrix G;   // G11(0), p1 x m1
  Vector c0;  // C1 (-A)^{-1} B2 w*
  const Nonlinearity* f = nullptr;

  Vector operator()(const Vector& y) const { return G * f->eval(0.0, y) + c0; }
};

FixedPointMap build_map(const LureSystem& sys, const Nonlinearity& f,
                        const Vector& w_star) {
  if (f.m1 != sys.m1() || f.p1 != sys.p1())
    throw std::invalid_argument("equilibrium: nonlinearity dimensions mismatch");
  if (f.time_varying)
    throw std::invalid_argument(
        "equilibrium: needs a time-invariant nonlinearity");
  if (w_star.size() != sys.m2())
    throw std::invalid_argument("equilibrium: w* must have size m2");
  if (!is_hurwitz(sys.A()))
    throw std::invalid_argument("equilibrium: A must be Hurwitz");

  Eigen::PartialPivLU<Matrix> lu(Matrix(-sys.A()));
  FixedPointMap map;
  map.G = sys.C1() * lu.solve(sys.B1());
  map.c0 = sys.C1() * lu.solve(Vector(sys.B2() * w_star));
  map.f = &f;
  return map;
}

struct IterationOutcome {
  Vector y;
  int iterations = 0;
  double worst_ratio = 0.0;
  bool ratio_violated = false;
};

IterationOutcome iterate_to(const FixedPointMap& F, const PerronWeight& pw,
                            Vector y, double increment_tol, int max_iter) {
  IterationOutcome out;
  double prev_inc = -1.0;
  for (out.iterations = 0; out.iterations < max_iter; ++out.iterations) {
    const Vector next = F(y);
    const double inc = weighted_seminorm(next - y, pw.v);
    y = next;
    if (!std::isfinite(inc) || inc > 1e12)
      throw std::runtime_error(
          "equilibrium: iteration diverged; observed contraction ratio " +
          std::to_string(out.worst_ratio) + " against declared " +
          std::to_string(pw.rho));
    if (prev_inc > 1e-13) {
      const double ratio = inc / prev_inc;
      out.worst_ratio = std::max(out.worst_ratio, ratio);
      if (ratio > pw.rho * (1.0 + 1e-9) + 1e-12) out.ratio_violated = true;
    }
    prev_inc = inc;
    if (inc <= increment_tol) {
      out.y = std::move(y);
      return out;
    }
  }
  throw std::runtime_error(
      "equilibrium: no convergence in " + std::to_string(max_iter) +
      " iterations; observed contraction ratio " +
      std::to_string(out.worst_ratio) + " against declared " +
      std::to_string(pw.rho));
}

double increment_threshold(double tol, double rho) {
  // Stop when the geometric tail bound |y - y*|_v <= inc * rho / (1 - rho)
  // certifies the target accuracy.
  return tol * (1.0 - rho) / std::max(rho, 1e-6);
}

}  // namespace

PerronWeight find_perron_weight(const LureSystem& sys, const Matrix& Delta) {
  if (Delta.rows() != sys.m1() || Delta.cols() != sys.p1())
    throw std::invalid_argument("find_perron_weight: Delta must be m1 x p1");
  if (!is_nonneg(Delta, 0.0))
    throw std::invalid_argument("find_perron_weight: Delta must be nonnegative");
  if (!is_hurwitz(sys.A()))
    throw std::invalid_argument("find_perron_weight: A must be Hurwitz");

  const Matrix L = transfer_block(sys, 0.0, 1, 1) * Delta;
  const auto reject_expansive = [](double rho) {
    if (rho >= 1.0)
      throw std::runtime_error(
          "find_perron_weight: spectral bound rho = " + std::to_string(rho) +
          " >= 1, the fixed-point construction does not apply; certify "
          "through a dissipation certificate at positive decay rate instead, "
          "or supply a contraction weight for a rescaled gain");
  };

  if (L.cwiseAbs().maxCoeff() == 0.0)
    return {Vector::Constant(sys.p1(), 1.0 / sys.p1()), 0.0};
  if (sys.p1() == 1) {
    const double rho = L(0, 0);
    reject_expansive(rho);
    return {Vector::Ones(1), rho};
  }
  if (!is_irreducible(L))
    throw std::invalid_argument(
        "find_perron_weight: G11(0) Delta is reducible; supply a weight pair "
        "(v, rho) explicitly and validate it");
  const PerronPair pair = perron_left_vector(L);
  reject_expansive(pair.rho);
  return {pair.v, pair.rho};
}

WeightCheck validate_perron_weight(const LureSystem& sys, const Matrix& Delta,
                                   const PerronWeight& pw, double tol) {
  if (pw.v.size() != sys.p1())
    throw std::invalid_argument("validate_perron_weight: v must have size p1");
  WeightCheck out;
  if (!is_strictly_positive(pw.v, 0.0) || !(pw.rho >= 0.0) || pw.rho >= 1.0)
    return out;
  const Matrix L = transfer_block(sys, 0.0, 1, 1) * Delta;
  const Vector slack = pw.rho * pw.v - L.transpose() * pw.v;
  out.margin = slack.minCoeff();
  out.ok = out.margin >= -tol;
  return out;
}

EquilibriumResult solve_equilibrium(const LureSystem& sys,
                                    const Nonlinearity& f,
                                    const Vector& w_star,
                                    const PerronWeight& pw, double tol,
                                    int max_iter) {
  if (!(tol > 0.0)) throw std::invalid_argument("solve_equilibrium: tol must be > 0");
  const FixedPointMap F = build_map(sys, f, w_star);
  Eigen::PartialPivLU<Matrix> lu(Matrix(-sys.A()));

  EquilibriumResult res;
  Vector y = Vector::Zero(sys.p1());
  double threshold = increment_threshold(tol, pw.rho);
  int budget = max_iter;
  for (int attempt = 0; attempt < 6; ++attempt) {
    const IterationOutcome out = iterate_to(F, pw, std::move(y), threshold, budget);
    y = out.y;
    res.iterations += out.iterations;
    res.observed_ratio = std::max(res.observed_ratio, out.worst_ratio);
    res.ratio_violated = res.ratio_violated || out.ratio_violated;
    budget = std::max(1000, budget - out.iterations);

    res.x_star = lu.solve(Vector(sys.B1() * f.eval(0.0, y) + sys.B2() * w_star));
    res.residual = (sys.A() * res.x_star +
                    sys.B1() * f.eval(0.0, Vector(sys.C1() * res.x_star)) +
                    sys.B2() * w_star)
                       .cwiseAbs()
                       .maxCoeff();
    if (res.residual <= 10.0 * tol) break;
    threshold /= 100.0;
  }
  res.y_star = y;
  if (res.residual > 10.0 * tol)
    throw std::runtime_error(
        "solve_equilibrium: state-equation residual " +
        std::to_string(res.residual) + " stayed above 10 * tol");
  return res;
}

UniquenessReport uniqueness_probe(const LureSystem& sys, const Nonlinearity& f,
                                  const Vector& w_star, const PerronWeight& pw,
                                  int restarts, std::uint64_t seed,
                                  double tol) {
  const EquilibriumResult base = solve_equilibrium(sys, f, w_star, pw, tol);
  const FixedPointMap F = build_map(sys, f, w_star);
  const double threshold = increment_threshold(tol, pw.rho);

  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  std::uniform_real_distribution<double> mag(-1.0, 2.0);

  UniquenessReport rep;
  rep.runs = restarts;
  for (int run = 0; run < restarts; ++run) {
    Vector y0(sys.p1());
    const double scale = std::pow(10.0, mag(rng));
    for (Eigen::Index i = 0; i < y0.size(); ++i) y0[i] = scale * unit(rng);
    try {
      const IterationOutcome out = iterate_to(F, pw, std::move(y0), threshold,
                                              200000);
      rep.max_spread = std::max(
          rep.max_spread, (out.y - base.y_star).cwiseAbs().maxCoeff());
    } catch (const std::runtime_error&) {
      ++rep.diverged;
    }
  }
  rep.agree = rep.diverged == 0 && rep.max_spread <= 100.0 * tol;
  return rep;
}

}  // namespace lurecert
