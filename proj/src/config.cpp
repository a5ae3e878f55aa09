#include "lurecert/config.hpp"

#include <cmath>
#include <limits>
#include <map>
#include <set>

namespace lurecert {

namespace {

double node_double(const YAML::Node& node, const std::string& key) {
  if (!node[key]) throw ConfigError("config: missing key '" + key + "'");
  try {
    return node[key].as<double>();
  } catch (const YAML::Exception&) {
    throw ConfigError("config: key '" + key + "' is not a number");
  }
}

double node_double_or(const YAML::Node& node, const std::string& key,
                      double fallback) {
  return node[key] ? node_double(node, key) : fallback;
}

int node_int_or(const YAML::Node& node, const std::string& key, int fallback) {
  if (!node[key]) return fallback;
  try {
    return node[key].as<int>();
  } catch (const YAML::Exception&) {
    throw ConfigError("config: key '" + key + "' is not an integer");
  }
}

std::string node_string(const YAML::Node& node, const std::string& key) {
  if (!node[key]) throw ConfigError("config: missing key '" + key + "'");
  return node[key].as<std::string>();
}

}  // namespace

Matrix yaml_to_matrix(const YAML::Node& node) {
  if (!node.IsSequence() || node.size() == 0)
    throw ConfigError("config: matrix must be a nonempty list of rows");
  const size_t rows = node.size();
  size_t cols = 0;
  Matrix M;
  for (size_t i = 0; i < rows; ++i) {
    const YAML::Node& row = node[i];
    if (!row.IsSequence() || row.size() == 0)
      throw ConfigError("config: matrix row must be a nonempty list");
    if (i == 0) {
      cols = row.size();
      M.resize(rows, cols);
    } else if (row.size() != cols) {
      throw ConfigError("config: matrix rows have inconsistent lengths");
    }
    for (size_t j = 0; j < cols; ++j) {
      try {
        M(i, j) = row[j].as<double>();
      } catch (const YAML::Exception&) {
        throw ConfigError("config: matrix entry is not a number");
      }
    }
  }
  return M;
}

Vector yaml_to_vector(const YAML::Node& node) {
  if (!node.IsSequence() || node.size() == 0)
    throw ConfigError("config: vector must be a nonempty list");
  Vector v(node.size());
  for (size_t i = 0; i < node.size(); ++i) {
    try {
      v[i] = node[i].as<double>();
    } catch (const YAML::Exception&) {
      throw ConfigError("config: vector entry is not a number");
    }
  }
  return v;
}

namespace {

// Negative zeros round-trip fine but look odd in emitted files.
double scrub_zero(double x) { return x == 0.0 ? 0.0 : x; }

}  // namespace

YAML::Node matrix_to_yaml(const Matrix& M) {
  YAML::Node node(YAML::NodeType::Sequence);
  for (Eigen::Index i = 0; i < M.rows(); ++i) {
    YAML::Node row(YAML::NodeType::Sequence);
    for (Eigen::Index j = 0; j < M.cols(); ++j) row.push_back(scrub_zero(M(i, j)));
    row.SetStyle(YAML::EmitterStyle::Flow);
    node.push_back(row);
  }
  return node;
}

YAML::Node vector_to_yaml(const Vector& v) {
  YAML::Node node(YAML::NodeType::Sequence);
  for (Eigen::Index i = 0; i < v.size(); ++i) node.push_back(scrub_zero(v[i]));
  node.SetStyle(YAML::EmitterStyle::Flow);
  return node;
}

namespace {

using SignalRegistry = std::map<std::string, YAML::Node>;

Signal build_signal(const YAML::Node& node, const SignalRegistry& registry,
                    std::set<std::string>& in_progress);

Signal resolve_child(const YAML::Node& child, const SignalRegistry& registry,
                     std::set<std::string>& in_progress) {
  if (child.IsScalar()) {
    const std::string name = child.as<std::string>();
    const auto it = registry.find(name);
    if (it == registry.end())
      throw ConfigError("config: unknown signal reference '" + name + "'");
    if (in_progress.count(name))
      throw ConfigError("config: signal reference cycle through '" + name + "'");
    in_progress.insert(name);
    Signal s = build_signal(it->second, registry, in_progress);
    in_progress.erase(name);
    return s;
  }
  return build_signal(child, registry, in_progress);
}

std::vector<std::vector<TrigTerm>> parse_trig_components(
    const YAML::Node& comps) {
  if (!comps.IsSequence() || comps.size() == 0)
    throw ConfigError("config: trig signal needs a nonempty components list");
  std::vector<std::vector<TrigTerm>> out;
  for (const YAML::Node& comp : comps) {
    std::vector<TrigTerm> terms;
    if (comp["terms"]) {
      for (const YAML::Node& term : comp["terms"])
        terms.push_back({node_double(term, "amp"), node_double(term, "omega"),
                         node_double_or(term, "phase", 0.0)});
    }
    out.push_back(std::move(terms));
  }
  return out;
}

Signal build_signal(const YAML::Node& node, const SignalRegistry& registry,
                    std::set<std::string>& in_progress) {
  if (!node.IsMap()) throw ConfigError("config: signal must be a map");
  const std::string kind = node_string(node, "kind");
  if (kind == "zero") {
    return make_zero_signal(node_int_or(node, "dim", 1));
  }
  if (kind == "constant") {
    if (!node["value"]) throw ConfigError("config: constant signal needs value");
    return make_constant_signal(yaml_to_vector(node["value"]));
  }
  if (kind == "trig") {
    auto terms = parse_trig_components(node["components"]);
    Vector offset = node["offset"] ? yaml_to_vector(node["offset"])
                                   : Vector(Vector::Zero(terms.size()));
    std::optional<double> period;
    if (node["period"]) period = node_double(node, "period");
    return make_trig_signal(std::move(terms), std::move(offset), period);
  }
  if (kind == "mod_trig") {
    std::vector<ModTerm> terms;
    if (node["terms"])
      for (const YAML::Node& term : node["terms"])
        terms.push_back({node_double(term, "amp"), node_double(term, "scale"),
                         node_double(term, "tau")});
    return make_mod_trig_signal(node_double_or(node, "offset", 0.0),
                                std::move(terms));
  }
  if (kind == "poly_exp") {
    if (!node["components"])
      throw ConfigError("config: poly_exp signal needs components");
    std::vector<std::vector<PolyExpTerm>> comps;
    for (const YAML::Node& comp : node["components"]) {
      std::vector<PolyExpTerm> terms;
      if (comp["terms"]) {
        for (const YAML::Node& term : comp["terms"])
          terms.push_back({node_double(term, "coeff"),
                           node_int_or(term, "power", 0),
                           node_double_or(term, "rate", 0.0)});
      }
      comps.push_back(std::move(terms));
    }
    return make_poly_exp_signal(std::move(comps));
  }
  if (kind == "converging_rational") {
    return make_converging_rational_signal(node_double(node, "k"));
  }
  if (kind == "sum") {
    if (!node["principal"] || !node["transient"])
      throw ConfigError("config: sum signal needs principal and transient");
    return make_sum_signal(resolve_child(node["principal"], registry, in_progress),
                           resolve_child(node["transient"], registry, in_progress));
  }
  if (kind == "shifted") {
    if (!node["base"]) throw ConfigError("config: shifted signal needs base");
    return make_shifted_signal(resolve_child(node["base"], registry, in_progress),
                               node_double(node, "tau"));
  }
  throw ConfigError("config: unknown signal kind '" + kind + "'");
}

}  // namespace

Signal signal_from_yaml(const YAML::Node& node) {
  SignalRegistry empty;
  std::set<std::string> in_progress;
  return build_signal(node, empty, in_progress);
}

YAML::Node signal_to_yaml(const Signal& s) {
  YAML::Node node;
  switch (s.kind()) {
    case SignalKind::Zero: {
      node["kind"] = "zero";
      node["dim"] = s.dim();
      break;
    }
    case SignalKind::Constant: {
      const auto& impl = dynamic_cast<const ConstantSignal&>(s.impl());
      node["kind"] = "constant";
      node["value"] = vector_to_yaml(impl.value);
      break;
    }
    case SignalKind::Trig: {
      const auto& impl = dynamic_cast<const TrigSignal&>(s.impl());
      node["kind"] = "trig";
      YAML::Node comps(YAML::NodeType::Sequence);
      for (const auto& component : impl.terms) {
        YAML::Node comp;
        YAML::Node terms(YAML::NodeType::Sequence);
        for (const TrigTerm& term : component) {
          YAML::Node tn;
          tn["amp"] = term.amp;
          tn["omega"] = term.omega;
          tn["phase"] = term.phase;
          tn.SetStyle(YAML::EmitterStyle::Flow);
          terms.push_back(tn);
        }
        comp["terms"] = terms;
        comps.push_back(comp);
      }
      node["components"] = comps;
      node["offset"] = vector_to_yaml(impl.offset);
      if (impl.period) node["period"] = *impl.period;
      break;
    }
    case SignalKind::ModTrig: {
      const auto& impl = dynamic_cast<const ModTrigSignal&>(s.impl());
      node["kind"] = "mod_trig";
      node["offset"] = impl.offset;
      YAML::Node terms(YAML::NodeType::Sequence);
      for (const ModTerm& term : impl.terms) {
        YAML::Node tn;
        tn["amp"] = term.amp;
        tn["scale"] = term.scale;
        tn["tau"] = term.tau;
        tn.SetStyle(YAML::EmitterStyle::Flow);
        terms.push_back(tn);
      }
      node["terms"] = terms;
      break;
    }
    case SignalKind::PolyExp: {
      const auto& impl = dynamic_cast<const PolyExpSignal&>(s.impl());
      node["kind"] = "poly_exp";
      YAML::Node comps(YAML::NodeType::Sequence);
      for (const auto& component : impl.terms) {
        YAML::Node comp;
        YAML::Node terms(YAML::NodeType::Sequence);
        for (const PolyExpTerm& term : component) {
          YAML::Node tn;
          tn["coeff"] = term.coeff;
          tn["power"] = term.power;
          tn["rate"] = term.rate;
          tn.SetStyle(YAML::EmitterStyle::Flow);
          terms.push_back(tn);
        }
        comp["terms"] = terms;
        comps.push_back(comp);
      }
      node["components"] = comps;
      break;
    }
    case SignalKind::ConvergingRational: {
      const auto& impl = dynamic_cast<const ConvergingRationalSignal&>(s.impl());
      node["kind"] = "converging_rational";
      node["k"] = impl.k;
      break;
    }
    case SignalKind::Sum: {
      const auto& impl = dynamic_cast<const SumSignal&>(s.impl());
      node["kind"] = "sum";
      node["principal"] = signal_to_yaml(impl.principal);
      node["transient"] = signal_to_yaml(impl.transient);
      break;
    }
    case SignalKind::Shifted: {
      const auto& impl = dynamic_cast<const ShiftedSignal&>(s.impl());
      node["kind"] = "shifted";
      node["base"] = signal_to_yaml(impl.base);
      node["tau"] = impl.tau;
      break;
    }
  }
  return node;
}

Nonlinearity NonlinearitySpec::build(int m1, int p1) const {
  if (kind == "zero") return make_zero_nonlinearity(m1, p1);
  if (kind == "saturation") {
    if (m1 != p1) throw ConfigError("config: saturation needs m1 == p1");
    return make_saturation_nonlinearity(m1);
  }
  if (kind == "slope_sine") {
    if (m1 != p1) throw ConfigError("config: slope_sine needs m1 == p1");
    return make_slope_sine_nonlinearity(slope, m1);
  }
  if (kind == "linear") {
    if (S.rows() != m1 || S.cols() != p1)
      throw ConfigError("config: linear nonlinearity S must be m1 x p1");
    return make_linear_nonlinearity(S);
  }
  throw ConfigError("config: unknown nonlinearity kind '" + kind + "'");
}

Matrix NonlinearitySpec::pattern(int m1, int p1) const {
  if (kind == "zero") return Matrix::Zero(m1, p1);
  if (kind == "saturation" || kind == "slope_sine") {
    if (m1 != p1) throw ConfigError("config: diagonal pattern needs m1 == p1");
    return Matrix::Identity(m1, p1);
  }
  if (kind == "linear") return S.cwiseAbs();
  throw ConfigError("config: unknown nonlinearity kind '" + kind + "'");
}

const Signal& ProblemConfig::find_signal(const std::string& name) const {
  for (const SignalDef& def : signals)
    if (def.name == name) return def.signal;
  throw ConfigError("config: unknown signal '" + name + "'");
}

const TrajectoryDef& ProblemConfig::find_trajectory(
    const std::string& name) const {
  for (const TrajectoryDef& def : trajectories)
    if (def.name == name) return def;
  throw ConfigError("config: unknown trajectory '" + name + "'");
}

ProblemConfig parse_config(const YAML::Node& root) {
  if (!root.IsMap()) throw ConfigError("config: top level must be a map");
  ProblemConfig cfg;

  if (root["system"]) {
    const YAML::Node& sys = root["system"];
    for (const char* key : {"A", "B1", "B2", "C1", "C2"})
      if (!sys[key])
        throw ConfigError(std::string("config: system section missing ") + key);
    try {
      cfg.system.emplace(yaml_to_matrix(sys["A"]), yaml_to_matrix(sys["B1"]),
                         yaml_to_matrix(sys["B2"]), yaml_to_matrix(sys["C1"]),
                         yaml_to_matrix(sys["C2"]));
    } catch (const std::invalid_argument& err) {
      throw ConfigError(std::string("config: invalid system: ") + err.what());
    }
  }

  if (root["nonlinearity"]) {
    const YAML::Node& f = root["nonlinearity"];
    cfg.nonlinearity.kind = node_string(f, "kind");
    cfg.nonlinearity.slope = node_double_or(f, "slope", 0.0);
    if (f["S"]) cfg.nonlinearity.S = yaml_to_matrix(f["S"]);
  }

  if (root["certificate"]) {
    const YAML::Node& cert = root["certificate"];
    cfg.xi = node_double_or(cert, "xi", -1.0);
    if (cert["q"]) cfg.q = yaml_to_vector(cert["q"]);
    if (cert["r"]) cfg.r = yaml_to_vector(cert["r"]);
    if (cert["c"]) cfg.c = yaml_to_vector(cert["c"]);
    if (cfg.q.has_value() != cfg.r.has_value())
      throw ConfigError("config: certificate q and r must come together");
  }

  if (root["signals"]) {
    SignalRegistry registry;
    for (const YAML::Node& def : root["signals"]) {
      const std::string name = node_string(def, "name");
      if (registry.count(name))
        throw ConfigError("config: duplicate signal name '" + name + "'");
      registry[name] = def;
    }
    for (const YAML::Node& def : root["signals"]) {
      const std::string name = node_string(def, "name");
      std::set<std::string> in_progress{name};
      cfg.signals.push_back({name, build_signal(def, registry, in_progress)});
    }
  }

  if (root["trajectories"]) {
    for (const YAML::Node& def : root["trajectories"]) {
      TrajectoryDef td;
      td.name = node_string(def, "name");
      td.forcing = node_string(def, "forcing");
      if (!def["x0"]) throw ConfigError("config: trajectory needs x0");
      td.x0 = yaml_to_vector(def["x0"]);
      cfg.trajectories.push_back(std::move(td));
    }
  }

  if (root["simulation"]) {
    const YAML::Node& sim = root["simulation"];
    cfg.sim.dt = node_double_or(sim, "dt", cfg.sim.dt);
    cfg.sim.horizon = node_double_or(sim, "horizon", cfg.sim.horizon);
    cfg.sim.t0 = node_double_or(sim, "t0", cfg.sim.t0);
    if (sim["method"]) {
      const std::string method = sim["method"].as<std::string>();
      if (method == "rk4")
        cfg.sim.method = Integrator::RK4;
      else if (method == "euler")
        cfg.sim.method = Integrator::Euler;
      else
        throw ConfigError("config: unknown integrator '" + method + "'");
    }
    if (sim["positivity_check"])
      cfg.sim.positivity_check = sim["positivity_check"].as<bool>();
  }

  if (root["verification"]) {
    const YAML::Node& ver = root["verification"];
    cfg.windows.coarse_points =
        node_int_or(ver, "coarse_points", cfg.windows.coarse_points);
    cfg.windows.random_pairs =
        node_int_or(ver, "random_pairs", cfg.windows.random_pairs);
    cfg.windows.seed = static_cast<std::uint64_t>(
        node_int_or(ver, "seed", static_cast<int>(cfg.windows.seed)));
    if (ver["pairs"]) {
      for (const YAML::Node& pair : ver["pairs"]) {
        PairCheck pc;
        pc.first = node_string(pair, "first");
        pc.second = node_string(pair, "second");
        if (!pair["checks"] || !pair["checks"].IsSequence())
          throw ConfigError("config: verification pair needs a checks list");
        for (const YAML::Node& check : pair["checks"])
          pc.checks.push_back(check.as<std::string>());
        if (pair["s"]) {
          const std::string raw = pair["s"].as<std::string>();
          pc.s = (raw == "inf") ? std::numeric_limits<double>::infinity()
                                : node_double(pair, "s");
        }
        pc.beta0 = node_double_or(pair, "beta0", -1.0);
        pc.tol = node_double_or(pair, "tol", kAutoTol);
        cfg.pairs.push_back(std::move(pc));
      }
    }
  }

  if (root["threshold"]) {
    const YAML::Node& th = root["threshold"];
    cfg.threshold.present = true;
    cfg.threshold.lo = node_double(th, "lo");
    cfg.threshold.hi = node_double(th, "hi");
    cfg.threshold.tol = node_double_or(th, "tol", 1e-2);
  }

  if (root["equilibrium"]) {
    const YAML::Node& eq = root["equilibrium"];
    cfg.equilibrium.present = true;
    if (!eq["w_star"]) throw ConfigError("config: equilibrium needs w_star");
    cfg.equilibrium.w_star = yaml_to_vector(eq["w_star"]);
    cfg.equilibrium.tol = node_double_or(eq, "tol", 1e-9);
    cfg.equilibrium.restarts = node_int_or(eq, "restarts", 20);
    cfg.equilibrium.hold_horizon = node_double_or(eq, "hold_horizon", 20.0);
    if (eq["v"] || eq["rho"]) {
      if (!eq["v"] || !eq["rho"])
        throw ConfigError("config: supply v and rho together");
      cfg.equilibrium.weight =
          PerronWeight{yaml_to_vector(eq["v"]), node_double(eq, "rho")};
    }
  }

  return cfg;
}

ProblemConfig load_config(const std::string& path) {
  YAML::Node root;
  try {
    root = YAML::LoadFile(path);
  } catch (const YAML::BadFile&) {
    throw ConfigError("config: cannot open '" + path + "'");
  } catch (const YAML::Exception& err) {
    throw ConfigError("config: parse error in '" + path + "': " + err.what());
  }
  return parse_config(root);
}

YAML::Node config_to_yaml(const ProblemConfig& cfg) {
  YAML::Node root;
  if (cfg.system) {
    YAML::Node sys;
    sys["A"] = matrix_to_yaml(cfg.sys().A());
    sys["B1"] = matrix_to_yaml(cfg.sys().B1());
    sys["B2"] = matrix_to_yaml(cfg.sys().B2());
    sys["C1"] = matrix_to_yaml(cfg.sys().C1());
    sys["C2"] = matrix_to_yaml(cfg.sys().C2());
    root["system"] = sys;
  }

  YAML::Node f;
  f["kind"] = cfg.nonlinearity.kind;
  if (cfg.nonlinearity.kind == "slope_sine") f["slope"] = cfg.nonlinearity.slope;
  if (cfg.nonlinearity.kind == "linear")
    f["S"] = matrix_to_yaml(cfg.nonlinearity.S);
  root["nonlinearity"] = f;

  YAML::Node cert;
  cert["xi"] = cfg.xi;
  if (cfg.q) cert["q"] = vector_to_yaml(*cfg.q);
  if (cfg.r) cert["r"] = vector_to_yaml(*cfg.r);
  if (cfg.c) cert["c"] = vector_to_yaml(*cfg.c);
  root["certificate"] = cert;

  if (!cfg.signals.empty()) {
    YAML::Node sigs(YAML::NodeType::Sequence);
    for (const SignalDef& def : cfg.signals) {
      YAML::Node node = signal_to_yaml(def.signal);
      node["name"] = def.name;
      sigs.push_back(node);
    }
    root["signals"] = sigs;
  }

  if (!cfg.trajectories.empty()) {
    YAML::Node trajs(YAML::NodeType::Sequence);
    for (const TrajectoryDef& def : cfg.trajectories) {
      YAML::Node node;
      node["name"] = def.name;
      node["forcing"] = def.forcing;
      node["x0"] = vector_to_yaml(def.x0);
      trajs.push_back(node);
    }
    root["trajectories"] = trajs;
  }

  YAML::Node sim;
  sim["dt"] = cfg.sim.dt;
  sim["horizon"] = cfg.sim.horizon;
  sim["t0"] = cfg.sim.t0;
  sim["method"] = cfg.sim.method == Integrator::RK4 ? "rk4" : "euler";
  sim["positivity_check"] = cfg.sim.positivity_check;
  root["simulation"] = sim;

  if (!cfg.pairs.empty()) {
    YAML::Node ver;
    ver["coarse_points"] = cfg.windows.coarse_points;
    ver["random_pairs"] = cfg.windows.random_pairs;
    ver["seed"] = static_cast<int>(cfg.windows.seed);
    YAML::Node pairs(YAML::NodeType::Sequence);
    for (const PairCheck& pc : cfg.pairs) {
      YAML::Node node;
      node["first"] = pc.first;
      node["second"] = pc.second;
      YAML::Node checks(YAML::NodeType::Sequence);
      for (const std::string& check : pc.checks) checks.push_back(check);
      checks.SetStyle(YAML::EmitterStyle::Flow);
      node["checks"] = checks;
      if (std::isinf(pc.s))
        node["s"] = "inf";
      else
        node["s"] = pc.s;
      if (pc.beta0 >= 0.0) node["beta0"] = pc.beta0;
      if (pc.tol >= 0.0) node["tol"] = pc.tol;
      pairs.push_back(node);
    }
    ver["pairs"] = pairs;
    root["verification"] = ver;
  }

  if (cfg.threshold.present) {
    YAML::Node th;
    th["lo"] = cfg.threshold.lo;
    th["hi"] = cfg.threshold.hi;
    th["tol"] = cfg.threshold.tol;
    root["threshold"] = th;
  }

  if (cfg.equilibrium.present) {
    YAML::Node eq;
    eq["w_star"] = vector_to_yaml(cfg.equilibrium.w_star);
    eq["tol"] = cfg.equilibrium.tol;
    eq["restarts"] = cfg.equilibrium.restarts;
    eq["hold_horizon"] = cfg.equilibrium.hold_horizon;
    if (cfg.equilibrium.weight) {
      eq["v"] = vector_to_yaml(cfg.equilibrium.weight->v);
      eq["rho"] = cfg.equilibrium.weight->rho;
    }
    root["equilibrium"] = eq;
  }

  return root;
}

}  // namespace lurecert
