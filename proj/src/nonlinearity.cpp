#include "lurecert/nonlinearity.hpp"

#include <cmath>
#include <random>
#include <stdexcept>

namespace lurecert {

namespace {

void check_delta(const Matrix& Delta, int m1, int p1, const char* who) {
  if (Delta.rows() != m1 || Delta.cols() != p1)
    throw std::invalid_argument(std::string(who) + ": Delta must be m1 x p1");
  if (!is_nonneg(Delta, 0.0))
    throw std::invalid_argument(std::string(who) + ": Delta must be nonnegative");
}

}  // namespace

Nonlinearity make_zero_nonlinearity(int m1, int p1) {
  Nonlinearity f;
  f.m1 = m1;
  f.p1 = p1;
  f.Delta = Matrix::Zero(m1, p1);
  f.name = "zero";
  f.eval = [m1](double, const Vector&) { return Vector::Zero(m1); };
  return f;
}

Nonlinearity make_diagonal_nonlinearity(std::function<double(double)> g,
                                        double slope_bound, int channels,
                                        std::string name) {
  if (slope_bound < 0.0)
    throw std::invalid_argument("make_diagonal_nonlinearity: negative slope bound");
  Nonlinearity f;
  f.m1 = channels;
  f.p1 = channels;
  f.Delta = slope_bound * Matrix::Identity(channels, channels);
  f.name = std::move(name);
  f.eval = [g = std::move(g), channels](double, const Vector& z) {
    Vector out(channels);
    for (int i = 0; i < channels; ++i) out[i] = g(z[i]);
    return out;
  };
  return f;
}

Nonlinearity make_slope_sine_nonlinearity(double slope, int channels) {
  return make_diagonal_nonlinearity(
      [slope](double z) { return 0.5 * slope * (z + std::sin(z)); }, slope,
      channels, "slope_sine");
}

Nonlinearity make_saturation_nonlinearity(int channels) {
  return make_diagonal_nonlinearity(
      [](double z) { return z / (1.0 + std::abs(z)); }, 1.0, channels,
      "saturation");
}

Nonlinearity make_linear_nonlinearity(Matrix S, std::string name) {
  Nonlinearity f;
  f.m1 = static_cast<int>(S.rows());
  f.p1 = static_cast<int>(S.cols());
  f.Delta = S.cwiseAbs();
  f.name = std::move(name);
  f.eval = [S = std::move(S)](double, const Vector& z) -> Vector { return S * z; };
  return f;
}

IncrementBoundReport verify_increment_bound(const Nonlinearity& f, int samples,
                                            double radius,
                                            const std::vector<double>& times,
                                            std::uint64_t seed) {
  check_delta(f.Delta, f.m1, f.p1, "verify_increment_bound");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> coord(-radius, radius);
  std::uniform_int_distribution<size_t> pick_time(
      0, times.empty() ? 0 : times.size() - 1);

  IncrementBoundReport rep;
  for (int k = 0; k < samples; ++k) {
    Vector z1(f.p1), z2(f.p1);
    for (int i = 0; i < f.p1; ++i) {
      z1[i] = coord(rng);
      z2[i] = coord(rng);
    }
    const double t = times.empty() ? 0.0 : times[pick_time(rng)];
    const Vector df = (f.eval(t, z1) - f.eval(t, z2)).cwiseAbs();
    const Vector bound = f.Delta * (z1 - z2).cwiseAbs();
    for (int i = 0; i < f.m1; ++i) {
      const double excess = df[i] - bound[i];
      rep.worst_violation = std::max(rep.worst_violation, excess);
      if (bound[i] > 1e-12)
        rep.worst_ratio = std::max(rep.worst_ratio, df[i] / bound[i]);
      if (excess > 1e-9) rep.holds = false;
    }
  }
  return rep;
}

std::pair<LureSystem, Nonlinearity> loop_shift(const LureSystem& sys,
                                               const Nonlinearity& f,
                                               const Matrix& K,
                                               const Matrix& Delta_shifted) {
  if (K.rows() != sys.m1() || K.cols() != sys.p1())
    throw std::invalid_argument("loop_shift: K must be m1 x p1");
  check_delta(Delta_shifted, f.m1, f.p1, "loop_shift");
  Matrix A_shifted = sys.closed_loop_A(K);
  if (!is_metzler(A_shifted))
    throw std::invalid_argument("loop_shift: shifted state matrix not Metzler");
  LureSystem shifted(std::move(A_shifted), sys.B1(), sys.B2(), sys.C1(),
                     sys.C2());

  Nonlinearity g;
  g.m1 = f.m1;
  g.p1 = f.p1;
  g.Delta = Delta_shifted;
  g.time_varying = f.time_varying;
  g.name = f.name + "_shifted";
  g.eval = [inner = f.eval, K](double t, const Vector& z) -> Vector {
    return inner(t, z) - K * z;
  };
  return {std::move(shifted), std::move(g)};
}

}  // namespace lurecert
