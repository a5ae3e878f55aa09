#include "lurecert/signals.hpp"

#include <cmath>
#include <stdexcept>

namespace lurecert {

int Signal::dim() const { return impl().dim(); }

SignalKind Signal::kind() const { return impl().kind(); }

Vector Signal::operator()(double t) const { return impl().eval(t); }

std::optional<double> Signal::declared_period() const {
  if (auto* trig = dynamic_cast<const TrigSignal*>(&impl())) return trig->period;
  if (kind() == SignalKind::Constant || kind() == SignalKind::Zero)
    return 0.0;
  if (auto* shifted = dynamic_cast<const ShiftedSignal*>(&impl()))
    return shifted->base.declared_period();
  return std::nullopt;
}

const SignalBase& Signal::impl() const {
  if (!impl_) throw std::logic_error("Signal: empty");
  return *impl_;
}

Vector TrigSignal::eval(double t) const {
  Vector out = offset;
  for (size_t i = 0; i < terms.size(); ++i)
    for (const TrigTerm& term : terms[i])
      out[static_cast<Eigen::Index>(i)] +=
          term.amp * std::sin(term.omega * t + term.phase);
  return out;
}

Vector ModTrigSignal::eval(double t) const {
  double v = offset;
  for (const ModTerm& term : terms)
    v += term.amp * std::sin(term.scale * periodic_mod(t, term.tau));
  Vector out(1);
  out[0] = v;
  return out;
}

Vector PolyExpSignal::eval(double t) const {
  Vector out = Vector::Zero(dim());
  for (size_t i = 0; i < terms.size(); ++i)
    for (const PolyExpTerm& term : terms[i])
      out[static_cast<Eigen::Index>(i)] +=
          term.coeff * std::pow(t, term.power) * std::exp(-term.rate * t);
  return out;
}

Vector ConvergingRationalSignal::eval(double t) const {
  Vector out(2);
  out[0] = k * (1.0 + t * t * std::exp(-t));
  out[1] = k * (1.0 + t / (1.0 + t * t * t));
  return out;
}

Vector SumSignal::eval(double t) const { return principal(t) + transient(t); }

double periodic_mod(double t, double tau) {
  if (tau <= 0.0) throw std::invalid_argument("periodic_mod: tau must be positive");
  double r = std::fmod(t, tau);
  if (r < 0.0) r += tau;
  // fmod can return tau after rounding when t is a near multiple of tau
  if (r >= tau) r -= tau;
  return r;
}

Signal make_zero_signal(int dim) {
  if (dim <= 0) throw std::invalid_argument("make_zero_signal: dim must be positive");
  auto s = std::make_shared<ZeroSignal>();
  s->dimension = dim;
  return Signal(std::move(s));
}

Signal make_constant_signal(Vector value) {
  if (value.size() == 0)
    throw std::invalid_argument("make_constant_signal: empty value");
  auto s = std::make_shared<ConstantSignal>();
  s->value = std::move(value);
  return Signal(std::move(s));
}

Signal make_trig_signal(std::vector<std::vector<TrigTerm>> terms, Vector offset,
                        std::optional<double> declared_period) {
  if (terms.empty()) throw std::invalid_argument("make_trig_signal: no components");
  if (offset.size() != static_cast<Eigen::Index>(terms.size()))
    throw std::invalid_argument("make_trig_signal: offset size mismatch");
  auto s = std::make_shared<TrigSignal>();
  s->terms = std::move(terms);
  s->offset = std::move(offset);
  s->period = declared_period;
  return Signal(std::move(s));
}

Signal make_almost_periodic_signal(const std::vector<double>& amps,
                                   const std::vector<double>& freqs,
                                   const std::vector<double>& phases,
                                   std::optional<double> declared_period) {
  if (amps.empty() || amps.size() != freqs.size() || amps.size() != phases.size())
    throw std::invalid_argument(
        "make_almost_periodic_signal: amps, freqs, phases must be nonempty "
        "lists of equal length");
  std::vector<TrigTerm> terms;
  terms.reserve(amps.size());
  for (size_t i = 0; i < amps.size(); ++i)
    terms.push_back({amps[i], freqs[i], phases[i]});
  Vector offset = Vector::Zero(1);
  return make_trig_signal({std::move(terms)}, std::move(offset), declared_period);
}

Signal make_mod_trig_signal(double offset, std::vector<ModTerm> terms) {
  for (const ModTerm& term : terms)
    if (term.tau <= 0.0)
      throw std::invalid_argument("make_mod_trig_signal: tau must be positive");
  auto s = std::make_shared<ModTrigSignal>();
  s->offset = offset;
  s->terms = std::move(terms);
  return Signal(std::move(s));
}

Signal make_poly_exp_signal(std::vector<std::vector<PolyExpTerm>> terms) {
  if (terms.empty())
    throw std::invalid_argument("make_poly_exp_signal: no components");
  for (const auto& component : terms)
    for (const PolyExpTerm& term : component)
      if (term.power < 0)
        throw std::invalid_argument("make_poly_exp_signal: negative power");
  auto s = std::make_shared<PolyExpSignal>();
  s->terms = std::move(terms);
  return Signal(std::move(s));
}

Signal make_converging_rational_signal(double k) {
  auto s = std::make_shared<ConvergingRationalSignal>();
  s->k = k;
  return Signal(std::move(s));
}

Signal make_sum_signal(Signal principal, Signal transient) {
  if (!principal.valid() || !transient.valid())
    throw std::invalid_argument("make_sum_signal: empty operand");
  if (principal.dim() != transient.dim())
    throw std::invalid_argument("make_sum_signal: dimension mismatch");
  auto s = std::make_shared<SumSignal>();
  s->principal = std::move(principal);
  s->transient = std::move(transient);
  return Signal(std::move(s));
}

Signal make_shifted_signal(Signal base, double tau) {
  if (!base.valid()) throw std::invalid_argument("make_shifted_signal: empty base");
  auto s = std::make_shared<ShiftedSignal>();
  s->base = std::move(base);
  s->tau = tau;
  return Signal(std::move(s));
}

PeriodCheck epsilon_period_check(const Signal& v, double tau, double eps,
                                 double t_max, double dt) {
  if (tau <= 0.0 || dt <= 0.0 || t_max < tau)
    throw std::invalid_argument("epsilon_period_check: bad parameters");
  PeriodCheck out;
  for (double t = 0.0; t <= t_max - tau + 1e-12; t += dt) {
    const double dev = (v(t + tau) - v(t)).cwiseAbs().maxCoeff();
    out.max_deviation = std::max(out.max_deviation, dev);
  }
  out.ok = out.max_deviation <= eps;
  return out;
}

}  // namespace lurecert
