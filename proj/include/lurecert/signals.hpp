#pragma once

#include "lurecert/linalg.hpp"

#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace lurecert {

enum class SignalKind {
  Zero,
  Constant,
  Trig,
  ModTrig,
  PolyExp,
  ConvergingRational,
  Sum,
  Shifted,
};

/// amp * sin(omega * t + phase)
struct TrigTerm {
  double amp = 0.0;
  double omega = 0.0;
  double phase = 0.0;
};

/// amp * sin(scale * mod(t, tau)) where mod(t, tau) in [0, tau)
struct ModTerm {
  double amp = 0.0;
  double scale = 0.0;
  double tau = 0.0;
};

/// coeff * t^power * exp(-rate * t)
struct PolyExpTerm {
  double coeff = 0.0;
  int power = 0;
  double rate = 0.0;
};

struct SignalBase {
  virtual ~SignalBase() = default;
  virtual int dim() const = 0;
  virtual Vector eval(double t) const = 0;
  virtual SignalKind kind() const = 0;
};

/// Immutable vector-valued signal of time. Value type; copies share the
/// underlying implementation.
class Signal {
 public:
  Signal() = default;
  explicit Signal(std::shared_ptr<const SignalBase> impl)
      : impl_(std::move(impl)) {}

  bool valid() const { return impl_ != nullptr; }
  int dim() const;
  SignalKind kind() const;
  Vector operator()(double t) const;

  /// Declared fundamental period, when one was supplied at construction.
  std::optional<double> declared_period() const;

  const SignalBase& impl() const;
  std::shared_ptr<const SignalBase> impl_ptr() const { return impl_; }

 private:
  std::shared_ptr<const SignalBase> impl_;
};

struct ZeroSignal final : SignalBase {
  int dimension = 1;
  int dim() const override { return dimension; }
  Vector eval(double) const override { return Vector::Zero(dimension); }
  SignalKind kind() const override { return SignalKind::Zero; }
};

struct ConstantSignal final : SignalBase {
  Vector value;
  int dim() const override { return static_cast<int>(value.size()); }
  Vector eval(double) const override { return value; }
  SignalKind kind() const override { return SignalKind::Constant; }
};

struct TrigSignal final : SignalBase {
  std::vector<std::vector<TrigTerm>> terms;  // one list per component
  Vector offset;
  std::optional<double> period;  // declared by the caller, not derived
  int dim() const override { return static_cast<int>(terms.size()); }
  Vector eval(double t) const override;
  SignalKind kind() const override { return SignalKind::Trig; }
};

/// Sum of sinusoids sampled through the periodic remainder mod(t, tau); the
/// standard construction of Stepanov almost periodic signals that are not
/// uniformly almost periodic.
struct ModTrigSignal final : SignalBase {
  double offset = 0.0;
  std::vector<ModTerm> terms;
  int dim() const override { return 1; }
  Vector eval(double t) const override;
  SignalKind kind() const override { return SignalKind::ModTrig; }
};

struct PolyExpSignal final : SignalBase {
  std::vector<std::vector<PolyExpTerm>> terms;  // one list per component
  int dim() const override { return static_cast<int>(terms.size()); }
  Vector eval(double t) const override;
  SignalKind kind() const override { return SignalKind::PolyExp; }
};

/// Two-channel forcing k * (1 + t^2 e^{-t}, 1 + t/(1 + t^3)) converging to the
/// constant (k, k).
struct ConvergingRationalSignal final : SignalBase {
  double k = 1.0;
  int dim() const override { return 2; }
  Vector eval(double t) const override;
  SignalKind kind() const override { return SignalKind::ConvergingRational; }
};

/// principal + transient, remembering the decomposition.
struct SumSignal final : SignalBase {
  Signal principal;
  Signal transient;
  int dim() const override { return principal.dim(); }
  Vector eval(double t) const override;
  SignalKind kind() const override { return SignalKind::Sum; }
};

struct ShiftedSignal final : SignalBase {
  Signal base;
  double tau = 0.0;
  int dim() const override { return base.dim(); }
  Vector eval(double t) const override { return base(t + tau); }
  SignalKind kind() const override { return SignalKind::Shifted; }
};

/// Remainder of t modulo tau, always in [0, tau).
double periodic_mod(double t, double tau);

Signal make_zero_signal(int dim);
Signal make_constant_signal(Vector value);
Signal make_trig_signal(std::vector<std::vector<TrigTerm>> terms, Vector offset,
                        std::optional<double> declared_period = std::nullopt);

/// Scalar finite trigonometric sum  sum_i amps[i] sin(freqs[i] t + phases[i]).
/// freqs are angular frequencies; with rationally independent frequencies the
/// result is almost periodic but not periodic (periodicity is never inferred,
/// only declared).
Signal make_almost_periodic_signal(const std::vector<double>& amps,
                                   const std::vector<double>& freqs,
                                   const std::vector<double>& phases,
                                   std::optional<double> declared_period =
                                       std::nullopt);

Signal make_mod_trig_signal(double offset, std::vector<ModTerm> terms);
Signal make_poly_exp_signal(std::vector<std::vector<PolyExpTerm>> terms);
Signal make_converging_rational_signal(double k);

/// principal + transient; dimensions must match. The decomposition is kept so
/// downstream analysis can separate the asymptotic part from the decaying one.
Signal make_sum_signal(Signal principal, Signal transient);

/// t -> base(t + tau)
Signal make_shifted_signal(Signal base, double tau);

struct PeriodCheck {
  bool ok = false;
  double max_deviation = 0.0;
};

/// Grid check of sup_{t in [0, t_max - tau]} |v(t + tau) - v(t)| <= eps.
PeriodCheck epsilon_period_check(const Signal& v, double tau, double eps,
                                 double t_max, double dt);

}  // namespace lurecert
