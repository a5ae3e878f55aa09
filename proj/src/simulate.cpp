#include "lurecert/simulate.hpp"

#include <atomic>
#include <cmath>
#include <cstdlib>
#include <future>
#include <mutex>
#include <stdexcept>
#include <string>
#include <thread>

namespace lurecert {

namespace {

void check_blowup(const Vector& x, int step, double t) {
  const double mag = x.cwiseAbs().maxCoeff();
  if (!std::isfinite(mag) || mag > 1e12)
    throw std::runtime_error("simulate: state blow-up at step " +
                             std::to_string(step) + ", t = " +
                             std::to_string(t));
}

}  // namespace

Trajectory simulate(const LureSystem& sys, const Nonlinearity& f,
                    const Signal& w, const Vector& x0, const SimConfig& cfg) {
  if (f.m1 != sys.m1() || f.p1 != sys.p1())
    throw std::invalid_argument("simulate: nonlinearity dimensions mismatch");
  if (!w.valid() || w.dim() != sys.m2())
    throw std::invalid_argument("simulate: forcing dimension mismatch");
  if (x0.size() != sys.n())
    throw std::invalid_argument("simulate: initial state size mismatch");
  if (!(cfg.dt > 0.0) || !(cfg.horizon >= cfg.dt))
    throw std::invalid_argument("simulate: need dt > 0 and horizon >= dt");

  const int steps = static_cast<int>(std::llround(cfg.horizon / cfg.dt));
  const int N = steps + 1;
  const Matrix& A = sys.A();
  const Matrix& B1 = sys.B1();
  const Matrix& B2 = sys.B2();
  const Matrix& C1 = sys.C1();

  const auto rhs = [&](double t, const Vector& x) -> Vector {
    return A * x + B1 * f.eval(t, C1 * x) + B2 * w(t);
  };

  Trajectory traj;
  traj.t0 = cfg.t0;
  traj.dt = cfg.dt;
  traj.x.resize(N, sys.n());
  traj.w.resize(N, sys.m2());

  Vector x = x0;
  traj.x.row(0) = x;
  traj.w.row(0) = w(cfg.t0);
  for (int k = 0; k < steps; ++k) {
    const double t = cfg.t0 + k * cfg.dt;
    const double h = cfg.dt;
    if (cfg.method == Integrator::RK4) {
      const Vector k1 = rhs(t, x);
      const Vector k2 = rhs(t + 0.5 * h, x + 0.5 * h * k1);
      const Vector k3 = rhs(t + 0.5 * h, x + 0.5 * h * k2);
      const Vector k4 = rhs(t + h, x + h * k3);
      x += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    } else {
      x += h * rhs(t, x);
    }
    check_blowup(x, k + 1, t + h);
    traj.x.row(k + 1) = x;
    traj.w.row(k + 1) = w(t + h);
  }

  traj.y1 = traj.x * C1.transpose();
  traj.y2 = traj.x * sys.C2().transpose();

  if (cfg.positivity_check && is_nonneg(x0, 0.0) && is_nonneg(traj.w, 0.0)) {
    const double low = traj.x.minCoeff();
    if (low < -1e-6)
      throw std::runtime_error(
          "simulate: positive invariance violated, min state entry " +
          std::to_string(low));
  }
  return traj;
}

double vop_residual(const Trajectory& traj, const LureSystem& sys,
                    const Nonlinearity& f, int checks) {
  const int N = traj.samples();
  if (N < 2) throw std::invalid_argument("vop_residual: trajectory too short");
  if (checks < 1) throw std::invalid_argument("vop_residual: checks must be >= 1");

  const Matrix E = matrix_exp(sys.A(), traj.dt);
  double worst = 0.0;
  for (int c = 0; c < checks; ++c) {
    // Evenly spaced subintervals [j0, j1] covering different spans.
    const int j0 = (c * (N - 1)) / (checks + 1);
    const int j1 = N - 1 - (c * (N - 1)) / (2 * (checks + 1));
    if (j1 <= j0) continue;

    // Walk backward so e^{A (t1 - t_j)} accumulates one dt factor per step.
    Vector integral = Vector::Zero(sys.n());
    Matrix prop = Matrix::Identity(sys.n(), sys.n());  // e^{A (t1 - t_j)}
    Vector g_right =
        sys.B1() * f.eval(traj.time(j1), traj.y1.row(j1).transpose()) +
        sys.B2() * traj.w.row(j1).transpose();
    for (int j = j1 - 1; j >= j0; --j) {
      prop = prop * E;
      const Vector g_left =
          prop * (sys.B1() * f.eval(traj.time(j), traj.y1.row(j).transpose()) +
                  sys.B2() * traj.w.row(j).transpose());
      integral += 0.5 * traj.dt * (g_left + g_right);
      g_right = g_left;
    }
    const Vector predicted =
        prop * traj.x.row(j0).transpose() + integral;
    const double defect =
        (predicted - traj.x.row(j1).transpose()).cwiseAbs().maxCoeff();
    worst = std::max(worst, defect);
  }
  return worst;
}

namespace {

int resolve_threads(int requested) {
  if (requested > 0) return requested;
  if (const char* env = std::getenv("LURECERT_THREADS")) {
    const int n = std::atoi(env);
    if (n > 0) return n;
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw > 0 ? static_cast<int>(hw) : 1;
}

}  // namespace

std::vector<Trajectory> simulate_batch(
    const std::vector<std::function<Trajectory()>>& jobs, int threads) {
  const int workers =
      std::min<int>(resolve_threads(threads), static_cast<int>(jobs.size()));
  std::vector<Trajectory> results(jobs.size());
  if (workers <= 1) {
    for (size_t i = 0; i < jobs.size(); ++i) results[i] = jobs[i]();
    return results;
  }

  std::atomic<size_t> next{0};
  std::vector<std::future<void>> pool;
  std::exception_ptr first_error;
  std::mutex error_mutex;
  for (int t = 0; t < workers; ++t) {
    pool.push_back(std::async(std::launch::async, [&] {
      for (size_t i = next.fetch_add(1); i < jobs.size();
           i = next.fetch_add(1)) {
        try {
          results[i] = jobs[i]();
        } catch (...) {
          std::lock_guard<std::mutex> lock(error_mutex);
          if (!first_error) first_error = std::current_exception();
        }
      }
    }));
  }
  for (auto& fut : pool) fut.wait();
  if (first_error) std::rethrow_exception(first_error);
  return results;
}

}  // namespace lurecert
