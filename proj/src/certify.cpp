#include "lurecert/certify.hpp"

#include <Eigen/LU>

#include <cmath>
#include <limits>
#include <stdexcept>

namespace lurecert {

namespace {

constexpr double kBoundaryBand = 1e-9;

void check_delta_shape(const LureSystem& sys, const Matrix& Delta,
                       const char* who) {
  if (Delta.rows() != sys.m1() || Delta.cols() != sys.p1())
    throw std::invalid_argument(std::string(who) + ": Delta must be m1 x p1");
  if (!is_nonneg(Delta, 0.0))
    throw std::invalid_argument(std::string(who) + ": Delta must be nonnegative");
}

/// Largest gamma keeping r - gamma * gain nonnegative.
double max_weight_scale(const Vector& r, const Vector& gain) {
  double gamma = std::numeric_limits<double>::infinity();
  for (Eigen::Index i = 0; i < gain.size(); ++i)
    if (gain[i] > kPatternTol) gamma = std::min(gamma, r[i] / gain[i]);
  return gamma;
}

}  // namespace

DissipationReport check_linear_dissipativity(const Matrix& A, const Matrix& B,
                                             const Matrix& C, const Matrix& D,
                                             double xi, const Vector& q,
                                             const Vector& r, double tol) {
  const Eigen::Index n = A.rows();
  if (A.cols() != n) throw std::invalid_argument("dissipativity: A must be square");
  if (B.rows() != n || C.cols() != n)
    throw std::invalid_argument("dissipativity: shape mismatch");
  if (D.rows() != C.rows() || D.cols() != B.cols())
    throw std::invalid_argument("dissipativity: D must be p x m");
  if (q.size() != C.rows() || r.size() != B.cols())
    throw std::invalid_argument("dissipativity: weight size mismatch");
  if (!is_metzler(A)) throw std::invalid_argument("dissipativity: A must be Metzler");
  if (!is_nonneg(B) || !is_nonneg(C) || !is_nonneg(D))
    throw std::invalid_argument("dissipativity: B, C, D must be nonnegative");
  if (!is_nonneg(q, 0.0) || !is_nonneg(r, 0.0))
    throw std::invalid_argument("dissipativity: weights must be nonnegative");
  if (xi < 0.0) throw std::invalid_argument("dissipativity: xi must be >= 0");

  const Matrix shifted = A + xi * Matrix::Identity(n, n);
  if (!is_hurwitz(shifted))
    throw std::invalid_argument("dissipativity: A + xi I must be Hurwitz");

  // p^T = q^T C (-(A + xi I))^{-1}; with A + xi I Hurwitz Metzler the inverse
  // is nonpositive, so p >= 0.
  Eigen::PartialPivLU<Matrix> lu(-shifted);
  const Vector p = lu.transpose().solve(Vector(C.transpose() * q));

  DissipationReport rep;
  rep.p = p.cwiseMax(0.0);
  rep.l = Vector::Zero(n);
  rep.gain = (C * lu.solve(B)).transpose() * q + D.transpose() * q;
  rep.margin = r - rep.gain;
  rep.holds = is_nonneg(rep.margin, tol);
  rep.k = rep.margin.cwiseMax(0.0);

  rep.residual_state =
      (rep.p.transpose() * A + xi * rep.p.transpose() + q.transpose() * C +
       rep.l.transpose())
          .cwiseAbs()
          .maxCoeff();
  rep.residual_input = (rep.p.transpose() * B + q.transpose() * D -
                        r.transpose() + rep.k.transpose())
                           .cwiseAbs()
                           .maxCoeff();

  // A + xi I Hurwitz with xi >= 0 forces A Hurwitz, so (-A)^{-1} exists.
  Eigen::PartialPivLU<Matrix> lu0(Matrix(-A));
  const Vector obs = lu0.transpose().solve(Vector(C.transpose() * q));
  rep.observability_ok = is_strictly_positive(obs, kPatternTol);
  rep.p_strictly_positive = is_strictly_positive(rep.p, kPatternTol);
  return rep;
}

H1Report check_H1(const LureSystem& sys, const Matrix& Delta) {
  check_delta_shape(sys, Delta, "check_H1");

  H1Report rep;
  rep.abscissa_A = spectral_abscissa(sys.A());
  rep.abscissa_closed_loop = spectral_abscissa(sys.closed_loop_A(Delta));

  const bool A_hurwitz = rep.abscissa_A < 0.0;
  if (A_hurwitz) {
    const Matrix G11 = transfer_block(sys, 0.0, 1, 1);
    rep.rho = spectral_radius(G11 * Delta);
    rep.holds = rep.rho < 1.0;
  } else {
    rep.rho = std::numeric_limits<double>::quiet_NaN();
    rep.holds = false;
  }

  const bool by_abscissa = rep.abscissa_closed_loop < 0.0;
  if (rep.holds != by_abscissa) {
    // Verdicts may differ legitimately only in a narrow band around the
    // stability boundary where both quantities sit at their thresholds.
    const bool near_boundary =
        std::abs(rep.abscissa_closed_loop) < kBoundaryBand ||
        (A_hurwitz && std::abs(rep.rho - 1.0) < kBoundaryBand);
    rep.routes_agree = near_boundary;
  }
  return rep;
}

CertificateH1 construct_H1_certificate(const LureSystem& sys,
                                       const Matrix& Delta) {
  check_delta_shape(sys, Delta, "construct_H1_certificate");
  const double a = spectral_abscissa(sys.closed_loop_A(Delta));
  if (a >= 0.0)
    throw std::invalid_argument(
        "construct_H1_certificate: closed loop not Hurwitz");
  return construct_H1_certificate(sys, Delta, 0.9 * (-a),
                                  Vector::Ones(sys.n()));
}

CertificateH1 construct_H1_certificate(const LureSystem& sys,
                                       const Matrix& Delta, double xi,
                                       const Vector& c) {
  check_delta_shape(sys, Delta, "construct_H1_certificate");
  if (c.size() != sys.n() || !is_strictly_positive(c, 0.0))
    throw std::invalid_argument(
        "construct_H1_certificate: c must be strictly positive of size n");
  const Matrix M = sys.closed_loop_A(Delta);
  const double a = spectral_abscissa(M);
  if (!(xi > 0.0) || xi >= -a)
    throw std::invalid_argument(
        "construct_H1_certificate: need 0 < xi < -abscissa(A + B1 Delta C1)");

  // (M + xi I)^T p = -c; M + xi I Hurwitz Metzler makes p strictly positive.
  const Eigen::Index n = sys.A().rows();
  Matrix shifted_t = (M + xi * Matrix::Identity(n, n)).transpose();
  Vector p = Eigen::PartialPivLU<Matrix>(std::move(shifted_t)).solve(Vector(-c));
  if (!is_strictly_positive(p, 0.0))
    throw std::runtime_error(
        "construct_H1_certificate: computed weight not strictly positive");
  return {xi, std::move(p)};
}

CertificateCheck verify_H1_certificate(const LureSystem& sys,
                                       const Matrix& Delta,
                                       const CertificateH1& cert, double tol) {
  check_delta_shape(sys, Delta, "verify_H1_certificate");
  if (cert.p.size() != sys.n())
    throw std::invalid_argument("verify_H1_certificate: p must have size n");
  const Matrix M = sys.closed_loop_A(Delta);
  const Vector s = M.transpose() * cert.p + cert.xi * cert.p;
  CertificateCheck out;
  out.margin = -s.maxCoeff();
  out.min_p = cert.p.minCoeff();
  out.ok = cert.xi > 0.0 && out.min_p > tol && out.margin >= -tol;
  return out;
}

H2Report check_H2(const LureSystem& sys, const Matrix& Delta, double xi,
                  const Vector& q, const Vector& r, double tol) {
  check_delta_shape(sys, Delta, "check_H2");
  if (q.size() != sys.p2() || r.size() != sys.m2())
    throw std::invalid_argument("check_H2: weight size mismatch");
  if (!is_nonneg(q, 0.0) || !is_nonneg(r, 0.0))
    throw std::invalid_argument("check_H2: weights must be nonnegative");
  if (xi < 0.0) throw std::invalid_argument("check_H2: xi must be >= 0");

  H2Report rep;
  const Matrix M = sys.closed_loop_A(Delta);
  const double a = spectral_abscissa(M);
  if (a + xi >= 0.0) {
    rep.status = H2Status::PreconditionFailed;
    rep.message =
        "closed-loop matrix A + B1 Delta C1 + xi I is not Hurwitz "
        "(abscissa " +
        std::to_string(a) + ", xi " + std::to_string(xi) + ")";
    return rep;
  }

  const DissipationReport base = check_linear_dissipativity(
      M, sys.B2(), sys.C2(), Matrix::Zero(sys.p2(), sys.m2()), xi, q, r, tol);
  rep.gain = base.gain;
  rep.margin = base.margin;
  rep.residual_state = base.residual_state;
  rep.residual_input = base.residual_input;
  rep.observability_ok = base.observability_ok;
  rep.p_strictly_positive = base.p_strictly_positive;
  rep.max_q_scale = max_weight_scale(r, base.gain);

  // Cross-check the gain through the open-loop transfer blocks at -xi.
  try {
    const TransferBlocks G = transfer_eval(sys, -xi);
    const Matrix mid =
        Matrix::Identity(sys.p1(), sys.p1()) - G.G11 * Delta;
    Eigen::FullPivLU<Matrix> lu(mid);
    if (lu.isInvertible()) {
      const Matrix closed =
          G.G22 + G.G21 * Delta * lu.solve(G.G12);
      const Vector gain2 = closed.transpose() * q;
      rep.woodbury_gap = (gain2 - rep.gain).cwiseAbs().maxCoeff();
      if (rep.woodbury_gap > 1e-8)
        throw std::runtime_error(
            "check_H2: state-space and transfer-form gains disagree beyond "
            "1e-8");
    }
  } catch (const std::invalid_argument&) {
    // -xi hit the open-loop spectrum; the cross-check is unavailable.
    rep.woodbury_gap = -1.0;
  }

  if (!base.holds) {
    rep.status = H2Status::Infeasible;
    rep.message = "supply weight too small: r - q^T G(-xi) has a negative entry";
    return rep;
  }
  if (!base.p_strictly_positive) {
    rep.status = H2Status::Infeasible;
    rep.message =
        "computed weight p is not strictly positive; the observability "
        "condition q^T C2 (-A_cl)^{-1} >> 0 fails";
    return rep;
  }

  rep.status = H2Status::Ok;
  rep.holds = true;
  rep.cert.xi = xi;
  rep.cert.p = base.p;
  rep.cert.q = q;
  rep.cert.r = r;
  rep.cert.l = base.l;
  rep.cert.k = base.k;
  return rep;
}

double alpha_s(double xi, double s) {
  if (!(xi > 0.0)) throw std::invalid_argument("alpha_s: xi must be positive");
  if (std::isinf(s)) return 1.0 / xi;
  if (!(s >= 1.0)) throw std::invalid_argument("alpha_s: s must be >= 1");
  if (s == 1.0) return 1.0;
  const double s0 = s / (s - 1.0);
  return std::pow(s0 * xi, -1.0 / s0);
}

double stepanov_beta0(double xi) {
  if (!(xi > 0.0)) throw std::invalid_argument("stepanov_beta0: xi must be positive");
  return std::max(1.0, std::exp(xi) / (1.0 - std::exp(-xi)));
}

ThresholdResult find_h1_threshold(const LureSystem& sys, const Matrix& pattern,
                                  double lo, double hi, double tol) {
  check_delta_shape(sys, pattern, "find_h1_threshold");
  if (!(lo >= 0.0) || !(hi > lo) || !(tol > 0.0))
    throw std::invalid_argument("find_h1_threshold: need 0 <= lo < hi, tol > 0");
  const auto holds_at = [&](double c) {
    return check_H1(sys, Matrix(c * pattern)).holds;
  };
  if (!holds_at(lo))
    throw std::runtime_error("find_h1_threshold: test already fails at lo");
  if (holds_at(hi))
    throw std::runtime_error("find_h1_threshold: test still holds at hi");

  ThresholdResult out;
  out.scale_low = lo;
  out.scale_high = hi;
  while (out.scale_high - out.scale_low > tol) {
    const double mid = 0.5 * (out.scale_low + out.scale_high);
    ++out.iterations;
    if (holds_at(mid))
      out.scale_low = mid;
    else
      out.scale_high = mid;
  }
  out.threshold = 0.5 * (out.scale_low + out.scale_high);
  return out;
}

}  // namespace lurecert
