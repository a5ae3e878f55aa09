#include "lurecert/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <functional>
#include <limits>
#include <random>
#include <stdexcept>

namespace lurecert {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

int grid_index(double t_start, double dt, double t, const char* who) {
  const double raw = (t - t_start) / dt;
  const long long j = std::llround(raw);
  if (std::abs(raw - static_cast<double>(j)) > 1e-6)
    throw std::invalid_argument(std::string(who) +
                                ": window endpoint off the sample grid");
  return static_cast<int>(j);
}

/// |row|_weight for every sample row.
std::vector<double> weighted_rows(const Matrix& series, const Vector& weight) {
  if (series.cols() != weight.size())
    throw std::invalid_argument("weighted series: weight size mismatch");
  const Vector u = series.cwiseAbs() * weight;
  return {u.data(), u.data() + u.size()};
}

/// Cumulative trapezoid P_j = int_{t_0}^{t_j} g, P_0 = 0.
std::vector<double> prefix_trapezoid(const std::vector<double>& g, double dt) {
  std::vector<double> P(g.size(), 0.0);
  for (size_t j = 0; j + 1 < g.size(); ++j)
    P[j + 1] = P[j] + 0.5 * dt * (g[j] + g[j + 1]);
  return P;
}

/// W_j = int_{t_0}^{t_j} e^{-xi (t_j - s)} g(s) ds by trapezoid, accumulated
/// through the stable recurrence W_{j+1} = d W_j + (dt/2)(d g_j + g_{j+1}),
/// d = e^{-xi dt}. Every factor stays in [0, 1], so large xi * t is safe.
struct ExpWeightedPrefix {
  double xi = 0.0;
  double dt = 0.0;
  std::vector<double> W;

  /// int_{t_a}^{t_b} e^{-xi (t_b - s)} g(s) ds
  double window(int ia, int ib) const {
    return W[ib] - std::exp(-xi * dt * (ib - ia)) * W[ia];
  }
};

ExpWeightedPrefix exp_weighted_prefix(const std::vector<double>& g, double dt,
                                      double xi) {
  ExpWeightedPrefix out;
  out.xi = xi;
  out.dt = dt;
  out.W.assign(g.size(), 0.0);
  const double d = std::exp(-xi * dt);
  for (size_t j = 0; j + 1 < g.size(); ++j)
    out.W[j + 1] = d * out.W[j] + 0.5 * dt * (d * g[j] + g[j + 1]);
  return out;
}

/// First-order grid-error scale of trapezoid quadrature on these samples.
double grid_error_scale(const std::vector<double>& g, double dt) {
  double tv = 0.0;
  for (size_t j = 0; j + 1 < g.size(); ++j) tv += std::abs(g[j + 1] - g[j]);
  return dt * tv;
}

double resolve_tol(double requested, double grid_error) {
  return requested >= 0.0 ? requested : 1e-6 + 1e-3 * grid_error;
}

void require_matched_grids(const Trajectory& a, const Trajectory& b,
                           const char* who) {
  if (std::abs(a.t0 - b.t0) > 1e-12 || std::abs(a.dt - b.dt) > 1e-15 ||
      a.samples() != b.samples() || a.x.cols() != b.x.cols() ||
      a.w.cols() != b.w.cols())
    throw std::invalid_argument(std::string(who) +
                                ": trajectories must share one sample grid");
}

std::vector<std::pair<int, int>> sample_windows(int N, const WindowSpec& ws) {
  std::vector<std::pair<int, int>> out;
  const int pts = std::max(2, std::min(ws.coarse_points, N));
  std::vector<int> coarse(pts);
  for (int i = 0; i < pts; ++i)
    coarse[i] = static_cast<int>((static_cast<long long>(i) * (N - 1)) / (pts - 1));
  for (int i = 0; i < pts; ++i)
    for (int j = i; j < pts; ++j) out.emplace_back(coarse[i], coarse[j]);

  std::mt19937_64 rng(ws.seed);
  std::uniform_int_distribution<int> pick(0, N - 1);
  for (int k = 0; k < ws.random_pairs; ++k) {
    int i = pick(rng), j = pick(rng);
    if (i > j) std::swap(i, j);
    out.emplace_back(i, j);
  }
  return out;
}

EstimateReport scan_windows(const Trajectory& grid,
                            const std::vector<std::pair<int, int>>& windows,
                            double tol,
                            const std::function<double(int, int)>& margin) {
  EstimateReport rep;
  rep.tol = tol;
  rep.holds = true;
  rep.worst_margin = kInf;
  rep.violating_t0 = rep.violating_t1 = std::numeric_limits<double>::quiet_NaN();
  double worst_a = 0.0, worst_b = 0.0;
  for (const auto& [ia, ib] : windows) {
    const double m = margin(ia, ib);
    ++rep.windows_checked;
    if (m < rep.worst_margin) {
      rep.worst_margin = m;
      worst_a = grid.time(ia);
      worst_b = grid.time(ib);
    }
  }
  if (rep.worst_margin < -tol) {
    rep.holds = false;
    rep.violating_t0 = worst_a;
    rep.violating_t1 = worst_b;
  }
  return rep;
}

/// Unit-window L^s values of a sampled integrand and their suffix maxima.
struct StepanovProfile {
  int K = 0;                       // samples per unit window
  std::vector<double> suffix_sup;  // sup over full windows starting at >= j
};

StepanovProfile stepanov_profile(const std::vector<double>& g, double dt,
                                 double s) {
  StepanovProfile out;
  out.K = static_cast<int>(std::llround(1.0 / dt));
  if (out.K < 1 || std::abs(out.K * dt - 1.0) > 1e-9)
    throw std::invalid_argument(
        "stepanov: dt must divide the unit window length");
  const int N = static_cast<int>(g.size());
  const int last_start = N - 1 - out.K;
  if (last_start < 0)
    throw std::invalid_argument("stepanov: range shorter than one unit window");

  std::vector<double> value(last_start + 1, 0.0);
  if (std::isinf(s)) {
    // Sliding max over the K+1 samples of each window with a monotonic deque.
    std::deque<int> dq;
    for (int j = 0; j < N; ++j) {
      while (!dq.empty() && g[dq.back()] <= g[j]) dq.pop_back();
      dq.push_back(j);
      const int start = j - out.K;
      while (dq.front() < start) dq.pop_front();
      if (start >= 0 && start <= last_start) value[start] = g[dq.front()];
    }
  } else {
    std::vector<double> gs(g.size());
    for (size_t j = 0; j < g.size(); ++j) gs[j] = std::pow(g[j], s);
    const std::vector<double> P = prefix_trapezoid(gs, dt);
    for (int j = 0; j <= last_start; ++j)
      value[j] = std::pow(std::max(0.0, P[j + out.K] - P[j]), 1.0 / s);
  }

  out.suffix_sup.assign(value.size(), 0.0);
  double running = -kInf;
  for (int j = last_start; j >= 0; --j) {
    running = std::max(running, value[j]);
    out.suffix_sup[j] = running;
  }
  return out;
}

}  // namespace

double weighted_Ls_norm(const Matrix& series, double t_start, double dt,
                        const NormSpec& spec, double win_t0, double win_t1) {
  if (!(dt > 0.0)) throw std::invalid_argument("weighted_Ls_norm: dt must be > 0");
  if (win_t1 < win_t0)
    throw std::invalid_argument("weighted_Ls_norm: empty window");
  const int ia = grid_index(t_start, dt, win_t0, "weighted_Ls_norm");
  const int ib = grid_index(t_start, dt, win_t1, "weighted_Ls_norm");
  if (ia < 0 || ib >= series.rows())
    throw std::invalid_argument("weighted_Ls_norm: window outside sampled range");

  std::vector<double> g = weighted_rows(series, spec.weight);
  for (int j = ia; j <= ib; ++j)
    g[j] *= std::exp(spec.alpha * (t_start + j * dt));

  if (std::isinf(spec.s)) {
    double m = 0.0;
    for (int j = ia; j <= ib; ++j) m = std::max(m, g[j]);
    return m;
  }
  if (!(spec.s >= 1.0))
    throw std::invalid_argument("weighted_Ls_norm: s must be >= 1");
  double acc = 0.0;
  for (int j = ia; j < ib; ++j)
    acc += 0.5 * dt * (std::pow(g[j], spec.s) + std::pow(g[j + 1], spec.s));
  return std::pow(acc, 1.0 / spec.s);
}

double stepanov_norm(const Matrix& series, double dt, double s,
                     const Vector& weight) {
  if (!(dt > 0.0)) throw std::invalid_argument("stepanov_norm: dt must be > 0");
  if (!std::isinf(s) && !(s >= 1.0))
    throw std::invalid_argument("stepanov_norm: s must be >= 1");
  const std::vector<double> g = weighted_rows(series, weight);
  return stepanov_profile(g, dt, s).suffix_sup.front();
}

EstimateReport verify_contraction_estimate(const Trajectory& a,
                                           const Trajectory& b,
                                           const CertificateH1& cert,
                                           const Vector& weight,
                                           const WindowSpec& ws, double tol) {
  require_matched_grids(a, b, "verify_contraction_estimate");
  const std::vector<double> d = [&] {
    std::vector<double> out(a.samples());
    for (int j = 0; j < a.samples(); ++j)
      out[j] = weighted_seminorm(a.x.row(j) - b.x.row(j), cert.p);
    return out;
  }();
  const std::vector<double> u = weighted_rows(a.w - b.w, weight);
  const ExpWeightedPrefix pre = exp_weighted_prefix(u, a.dt, cert.xi);
  const double auto_tol =
      resolve_tol(tol, grid_error_scale(u, a.dt) + grid_error_scale(d, a.dt));

  const auto margin = [&](int ia, int ib) {
    return std::exp(-cert.xi * a.dt * (ib - ia)) * d[ia] + pre.window(ia, ib) -
           d[ib];
  };
  return scan_windows(a, sample_windows(a.samples(), ws), auto_tol, margin);
}

EstimateReport verify_dissipation_estimate(const Trajectory& a,
                                           const Trajectory& b,
                                           const CertificateH2& cert,
                                           const WindowSpec& ws, double tol) {
  require_matched_grids(a, b, "verify_dissipation_estimate");
  const int N = a.samples();
  std::vector<double> d(N), lhs_g(N), rhs_g(N);
  for (int j = 0; j < N; ++j) {
    const Vector dx = a.x.row(j) - b.x.row(j);
    const Vector dy2 = a.y2.row(j) - b.y2.row(j);
    const Vector dw = a.w.row(j) - b.w.row(j);
    d[j] = weighted_seminorm(dx, cert.p);
    lhs_g[j] = weighted_seminorm(dy2, cert.q) + weighted_seminorm(dw, cert.k) +
               weighted_seminorm(dx, cert.l);
    rhs_g[j] = weighted_seminorm(dw, cert.r);
  }
  const ExpWeightedPrefix lhs_pre = exp_weighted_prefix(lhs_g, a.dt, cert.xi);
  const ExpWeightedPrefix rhs_pre = exp_weighted_prefix(rhs_g, a.dt, cert.xi);
  const double auto_tol =
      resolve_tol(tol, grid_error_scale(lhs_g, a.dt) +
                           grid_error_scale(rhs_g, a.dt) +
                           grid_error_scale(d, a.dt));

  const auto margin = [&](int ia, int ib) {
    const double lhs = lhs_pre.window(ia, ib) + d[ib];
    const double rhs =
        std::exp(-cert.xi * a.dt * (ib - ia)) * d[ia] + rhs_pre.window(ia, ib);
    return rhs - lhs;
  };
  return scan_windows(a, sample_windows(N, ws), auto_tol, margin);
}

EstimateReport verify_ls_estimate(const Trajectory& a, const Trajectory& b,
                                  const CertificateH1& cert, double s,
                                  const Vector& weight, const WindowSpec& ws,
                                  double tol) {
  require_matched_grids(a, b, "verify_ls_estimate");
  const int N = a.samples();
  std::vector<double> d(N);
  for (int j = 0; j < N; ++j)
    d[j] = weighted_seminorm(a.x.row(j) - b.x.row(j), cert.p);
  const std::vector<double> u = weighted_rows(a.w - b.w, weight);
  const double alpha = alpha_s(cert.xi, s);
  const double auto_tol =
      resolve_tol(tol, grid_error_scale(u, a.dt) + grid_error_scale(d, a.dt));

  std::vector<double> P;  // prefix of u^s for finite s
  if (!std::isinf(s)) {
    std::vector<double> us(u.size());
    for (size_t j = 0; j < u.size(); ++j) us[j] = std::pow(u[j], s);
    P = prefix_trapezoid(us, a.dt);
  }
  const auto window_norm = [&](int ia, int ib) {
    if (std::isinf(s)) {
      double m = 0.0;
      for (int j = ia; j <= ib; ++j) m = std::max(m, u[j]);
      return m;
    }
    return std::pow(std::max(0.0, P[ib] - P[ia]), 1.0 / s);
  };
  const auto margin = [&](int ia, int ib) {
    return std::exp(-cert.xi * a.dt * (ib - ia)) * d[ia] +
           alpha * window_norm(ia, ib) - d[ib];
  };
  return scan_windows(a, sample_windows(N, ws), auto_tol, margin);
}

EstimateReport verify_stepanov_estimate(const Trajectory& a,
                                        const Trajectory& b,
                                        const CertificateH1& cert, double beta0,
                                        double xi0, double s,
                                        const Vector& weight,
                                        const WindowSpec& ws, double tol) {
  require_matched_grids(a, b, "verify_stepanov_estimate");
  const int N = a.samples();
  std::vector<double> d(N);
  for (int j = 0; j < N; ++j)
    d[j] = weighted_seminorm(a.x.row(j) - b.x.row(j), cert.p);
  const std::vector<double> u = weighted_rows(a.w - b.w, weight);
  const StepanovProfile prof = stepanov_profile(u, a.dt, s);
  const int last_start = static_cast<int>(prof.suffix_sup.size()) - 1;
  const double auto_tol =
      resolve_tol(tol, grid_error_scale(u, a.dt) + grid_error_scale(d, a.dt));

  auto windows = sample_windows(N, ws);
  for (auto& [ia, ib] : windows) ia = std::min(ia, last_start);
  const auto margin = [&](int ia, int ib) {
    return beta0 * (std::exp(-xi0 * a.dt * (ib - ia)) * d[ia] +
                    prof.suffix_sup[ia]) -
           d[ib];
  };
  return scan_windows(a, windows, auto_tol, margin);
}

EstimateReport verify_stepanov_io_estimate(const Trajectory& a,
                                           const Trajectory& b,
                                           const CertificateH2& cert,
                                           double beta0, const WindowSpec& ws,
                                           double tol) {
  require_matched_grids(a, b, "verify_stepanov_io_estimate");
  const int N = a.samples();
  std::vector<double> d(N);
  for (int j = 0; j < N; ++j)
    d[j] = weighted_seminorm(a.x.row(j) - b.x.row(j), cert.p);
  const std::vector<double> gy = weighted_rows(a.y2 - b.y2, cert.q);
  const std::vector<double> gw = weighted_rows(a.w - b.w, cert.r);
  const StepanovProfile py = stepanov_profile(gy, a.dt, 1.0);
  const StepanovProfile pw = stepanov_profile(gw, a.dt, 1.0);
  const int last_start = static_cast<int>(py.suffix_sup.size()) - 1;
  const double auto_tol =
      resolve_tol(tol, grid_error_scale(gy, a.dt) + grid_error_scale(gw, a.dt));

  // Only the start time matters here; scan distinct clamped starts.
  auto windows = sample_windows(N, ws);
  for (auto& [ia, ib] : windows) {
    ia = std::min(ia, last_start);
    ib = ia;
  }
  const double out_gain = beta0 + std::exp(cert.xi);
  const auto margin = [&](int ia, int) {
    return beta0 * d[ia] + out_gain * pw.suffix_sup[ia] - py.suffix_sup[ia];
  };
  return scan_windows(a, windows, auto_tol, margin);
}

EstimateReport verify_cumulative_io_bound(const Trajectory& a,
                                          const Trajectory& b, double xi,
                                          const Vector& q, const Vector& r,
                                          double tol) {
  require_matched_grids(a, b, "verify_cumulative_io_bound");
  const int N = a.samples();
  std::vector<double> gy = weighted_rows(a.y2 - b.y2, q);
  std::vector<double> gw = weighted_rows(a.w - b.w, r);
  for (int j = 0; j < N; ++j) {
    const double e = std::exp(xi * a.time(j));
    gy[j] *= e;
    gw[j] *= e;
  }
  const std::vector<double> Py = prefix_trapezoid(gy, a.dt);
  const std::vector<double> Pw = prefix_trapezoid(gw, a.dt);

  EstimateReport rep;
  rep.tol = tol;
  rep.holds = true;
  rep.worst_margin = kInf;
  rep.violating_t0 = rep.violating_t1 = std::numeric_limits<double>::quiet_NaN();
  double worst_t = 0.0;
  for (int j = 0; j < N; ++j) {
    const double m = Pw[j] - Py[j];
    ++rep.windows_checked;
    if (m < rep.worst_margin) {
      rep.worst_margin = m;
      worst_t = a.time(j);
    }
  }
  if (rep.worst_margin < -tol) {
    rep.holds = false;
    rep.violating_t0 = 0.0;
    rep.violating_t1 = worst_t;
  }
  return rep;
}

ConvergenceReport convergence_diagnostic(const std::vector<double>& times,
                                         const std::vector<double>& deviations,
                                         ConvergenceMode mode, double tol) {
  if (times.size() != deviations.size() || times.size() < 2)
    throw std::invalid_argument("convergence_diagnostic: bad series");
  ConvergenceReport rep;
  rep.final_deviation = deviations.back();

  const size_t half = times.size() / 2;
  std::vector<double> tail_t(times.begin() + half, times.end());
  std::vector<double> tail_v(deviations.begin() + half, deviations.end());
  bool all_zero = true;
  for (double v : tail_v)
    if (v > 1e-14) all_zero = false;
  rep.rate = all_zero ? -kInf : log_slope(tail_t, tail_v);

  rep.converged = rep.final_deviation <= tol;
  if (mode == ConvergenceMode::Exponential)
    rep.converged = rep.converged && rep.rate < 0.0;
  return rep;
}

std::vector<double> deviation_norms(const Trajectory& traj,
                                    const Vector& target) {
  if (target.size() != traj.x.cols())
    throw std::invalid_argument("deviation_norms: target size mismatch");
  std::vector<double> out(traj.samples());
  for (int j = 0; j < traj.samples(); ++j)
    out[j] = (traj.x.row(j).transpose() - target).norm();
  return out;
}

std::vector<double> difference_norms(const Trajectory& a, const Trajectory& b) {
  require_matched_grids(a, b, "difference_norms");
  std::vector<double> out(a.samples());
  for (int j = 0; j < a.samples(); ++j)
    out[j] = (a.x.row(j) - b.x.row(j)).norm();
  return out;
}

double periodic_response_residual(const Trajectory& traj, double tau,
                                  double t_min) {
  const int K = static_cast<int>(std::llround(tau / traj.dt));
  if (K < 1 || std::abs(K * traj.dt - tau) > 1e-9)
    throw std::invalid_argument(
        "periodic_response_residual: tau must be a grid multiple");
  const int N = traj.samples();
  int j0 = static_cast<int>(std::ceil((t_min - traj.t0) / traj.dt - 1e-9));
  j0 = std::max(j0, 0);
  if (j0 > N - 1 - K)
    throw std::invalid_argument(
        "periodic_response_residual: no sampled window after t_min");
  double worst = 0.0;
  for (int j = j0; j + K < N; ++j)
    worst = std::max(worst,
                     (traj.x.row(j + K) - traj.x.row(j)).cwiseAbs().maxCoeff());
  return worst;
}

double log_slope(const std::vector<double>& t, const std::vector<double>& v) {
  double st = 0.0, sy = 0.0, stt = 0.0, sty = 0.0;
  int n = 0;
  for (size_t i = 0; i < t.size(); ++i) {
    if (v[i] <= 1e-300) continue;
    const double y = std::log(v[i]);
    st += t[i];
    sy += y;
    stt += t[i] * t[i];
    sty += t[i] * y;
    ++n;
  }
  if (n < 2) return -kInf;
  const double denom = n * stt - st * st;
  if (std::abs(denom) < 1e-300) return -kInf;
  return (n * sty - st * sy) / denom;
}

}  // namespace lurecert
