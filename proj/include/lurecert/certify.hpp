#pragma once

#include "lurecert/system.hpp"

#include <string>

namespace lurecert {

/// Outcome of the linear dissipation test for (A, B, C, D) at decay rate xi
/// with output weight q and supply weight r: feasibility of
///   p^T A + xi p^T + q^T C + l^T = 0,    p^T B + q^T D - r^T + k^T = 0
/// in nonnegative p, l, k, which holds exactly when
///   r^T - q^T G(-xi) >= 0,  G(z) = C (zI - A)^{-1} B + D.
/// The certificate is built constructively: p^T = q^T C (-(A + xi I))^{-1},
/// l = 0, k = r - G(-xi)^T q.
struct DissipationReport {
  bool holds = false;
  Vector p, l, k;
  Vector gain;    // G(-xi)^T q
  Vector margin;  // r - gain; holds iff margin >= -tol componentwise
  double residual_state = 0.0;  // inf-norm of p^T A + xi p^T + q^T C + l^T
  double residual_input = 0.0;  // inf-norm of p^T B + q^T D - r^T + k^T
  bool observability_ok = false;      // q^T C (-A)^{-1} strictly positive
  bool p_strictly_positive = false;
};

/// Requires A Metzler with A + xi I Hurwitz, B, C, D, q, r nonnegative,
/// xi >= 0. Throws std::invalid_argument otherwise.
DissipationReport check_linear_dissipativity(const Matrix& A, const Matrix& B,
                                             const Matrix& C, const Matrix& D,
                                             double xi, const Vector& q,
                                             const Vector& r,
                                             double tol = kConeTol);

/// Exponential weight p >> 0 with p^T (A + B1 Delta C1) <= -xi p^T for some
/// xi > 0. Certifies incremental exponential contraction in the p-weighted
/// one-norm.
struct CertificateH1 {
  double xi = 0.0;
  Vector p;
};

struct H1Report {
  bool holds = false;
  double abscissa_A = 0.0;            // spectral abscissa of A
  double abscissa_closed_loop = 0.0;  // of A + B1 Delta C1
  double rho = 0.0;  // spectral radius of G11(0) Delta; NaN if A not Hurwitz
  bool routes_agree = true;  // small-gain verdict vs closed-loop abscissa
};

/// Decides existence of an exponential contraction weight through the
/// small-gain characterization (A Hurwitz and rho(G11(0) Delta) < 1) and
/// cross-checks against the closed-loop spectral abscissa, flagging any
/// disagreement outside a narrow boundary band.
H1Report check_H1(const LureSystem& sys, const Matrix& Delta);

/// Builds the weight by solving (A + B1 Delta C1 + xi I)^T p = -c for a
/// strictly positive c. Requires 0 < xi < -abscissa(A + B1 Delta C1); the
/// default xi is 0.9 times the closed-loop decay and the default c is the
/// all-ones vector.
CertificateH1 construct_H1_certificate(const LureSystem& sys,
                                       const Matrix& Delta);
CertificateH1 construct_H1_certificate(const LureSystem& sys,
                                       const Matrix& Delta, double xi,
                                       const Vector& c);

struct CertificateCheck {
  bool ok = false;
  double margin = 0.0;  // min over components of -(p^T M + xi p^T)
  double min_p = 0.0;
};

CertificateCheck verify_H1_certificate(const LureSystem& sys,
                                       const Matrix& Delta,
                                       const CertificateH1& cert,
                                       double tol = kConeTol);

/// Dissipation certificate for the closed-loop pair (w, y2):
///   p^T (A + B1 Delta C1) + xi p^T + q^T C2 + l^T = 0,
///   p^T B2 - r^T + k^T = 0,   p >> 0, l, k >= 0.
struct CertificateH2 {
  double xi = 0.0;
  Vector p, q, r, l, k;
};

enum class H2Status { Ok, PreconditionFailed, Infeasible };

struct H2Report {
  H2Status status = H2Status::Infeasible;
  std::string message;
  bool holds = false;
  CertificateH2 cert;
  Vector gain;    // q^T C2 (-xi I - (A + B1 Delta C1))^{-1} B2
  Vector margin;  // r - gain
  double residual_state = 0.0;
  double residual_input = 0.0;
  /// Max abs gap between the state-space gain and its transfer-matrix form
  /// q^T (G22(-xi) + G21(-xi)(I - Delta G11(-xi))^{-1} Delta G12(-xi));
  /// negative when the cross-check had to be skipped (resolvent singular).
  double woodbury_gap = -1.0;
  bool observability_ok = false;
  bool p_strictly_positive = false;
  /// Largest gamma with r - gamma * gain >= 0; the certificate is feasible
  /// exactly when max_q_scale >= 1. Infinite when the gain vanishes.
  double max_q_scale = 0.0;
};

/// Feasibility test and constructive certificate for the closed-loop
/// dissipation inequality at decay rate xi with weights (q, r). Dimension or
/// sign errors throw std::invalid_argument; an unstable closed loop is
/// reported as PreconditionFailed rather than thrown.
H2Report check_H2(const LureSystem& sys, const Matrix& Delta, double xi,
                  const Vector& q, const Vector& r, double tol = kConeTol);

/// Forcing-term constant for the L^s bound: alpha_1 = 1, alpha_inf = 1/xi,
/// alpha_s = (s0 xi)^{-1/s0} with 1/s + 1/s0 = 1. Requires xi > 0, s >= 1
/// (s may be infinity).
double alpha_s(double xi, double s);

/// Overshoot constant for the unit-window (Stepanov) estimates implied by an
/// exponential contraction at rate xi: splitting the forcing integral into
/// unit windows and summing the geometric tail gives the bound with
/// beta0 = max(1, e^xi / (1 - e^{-xi})) at the same rate xi.
double stepanov_beta0(double xi);

struct ThresholdResult {
  double scale_low = 0.0;   // largest tested scale where the test holds
  double scale_high = 0.0;  // smallest tested scale where it fails
  double threshold = 0.0;   // bracket midpoint
  int iterations = 0;
};

/// Bisects the scalar c in Delta = c * pattern for the boundary where the
/// contraction test stops holding. An invalid bracket (the test failing at lo
/// or still holding at hi) throws std::runtime_error.
ThresholdResult find_h1_threshold(const LureSystem& sys, const Matrix& pattern,
                                  double lo, double hi, double tol);

}  // namespace lurecert
