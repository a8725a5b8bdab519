#include "smcsim/scenario.hpp"

#include <algorithm>
#include <cctype>
#include <numbers>
#include <set>

#include "smcsim/error.hpp"

namespace smcsim {

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

double* param_slot(ControllerSpec& spec, std::string_view name) {
  if (name == "kp") return &spec.gains.kp;
  if (name == "ki") return &spec.gains.ki;
  if (name == "kd") return &spec.gains.kd;
  if (name == "k") return &spec.reaching.k;
  if (name == "k_sc") return &spec.reaching.switching_gain;
  if (name == "alpha") return &spec.reaching.power;
  if (name == "delta") return &spec.reaching.layer_width;
  if (name == "lambda") return &spec.lambda;
  throw ConfigError("unknown tunable parameter '" + std::string(name) + "'");
}

bool label_ok(std::string_view label) {
  return !label.empty() && std::all_of(label.begin(), label.end(), [](char c) {
           return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-' ||
                  c == '.';
         });
}

PendulumParams read_pendulum(const ConfigTable* t) {
  PendulumParams p;
  if (!t) return p;
  t->require_known("pendulum",
                   {"cart_mass", "bob_mass", "inertia", "length", "gravity", "friction"});
  p.cart_mass = t->number_or("cart_mass", p.cart_mass);
  p.bob_mass = t->number_or("bob_mass", p.bob_mass);
  p.inertia = t->number_or("inertia", p.inertia);
  p.length = t->number_or("length", p.length);
  p.gravity = t->number_or("gravity", p.gravity);
  p.friction = t->number_or("friction", p.friction);
  return p;
}

TankParams read_tank(const ConfigTable* t) {
  TankParams p;
  if (!t) return p;
  t->require_known("tank", {"top_radius", "max_height", "discharge_coeff", "max_inflow",
                            "max_inflow_lph", "level_floor"});
  p.top_radius = t->number_or("top_radius", p.top_radius);
  p.max_height = t->number_or("max_height", p.max_height);
  p.discharge_coeff = t->number_or("discharge_coeff", p.discharge_coeff);
  p.level_floor = t->number_or("level_floor", p.level_floor);
  if (t->contains("max_inflow") && t->contains("max_inflow_lph")) {
    throw ConfigError("tank: give max_inflow or max_inflow_lph, not both");
  }
  if (t->contains("max_inflow_lph")) {
    p.max_inflow = lph_to_cm3_per_s(t->at("max_inflow_lph").as_number("max_inflow_lph"));
  } else {
    p.max_inflow = t->number_or("max_inflow", p.max_inflow);
  }
  return p;
}

ReferenceSpec read_reference(const ConfigTable* t) {
  if (!t) return ConstantReference{};
  const std::string kind = t->string_or("kind", "constant");
  if (kind == "constant") {
    t->require_known("reference", {"kind", "value"});
    return ConstantReference{t->number_or("value", 0.0)};
  }
  if (kind == "sinusoid") {
    t->require_known("reference", {"kind", "amplitude", "angular_freq", "offset"});
    SinusoidReference r;
    r.amplitude = t->number_or("amplitude", r.amplitude);
    r.angular_freq = t->number_or("angular_freq", r.angular_freq);
    r.offset = t->number_or("offset", r.offset);
    return r;
  }
  throw ConfigError("unknown reference kind '" + kind + "'");
}

DisturbanceSpec read_disturbance(const ConfigTable* t) {
  if (!t) return NoDisturbance{};
  const std::string kind = t->string_or("kind", "none");
  if (kind == "none") {
    t->require_known("disturbance", {"kind"});
    return NoDisturbance{};
  }
  if (kind == "sinusoid") {
    t->require_known("disturbance", {"kind", "amplitude", "angular_freq"});
    SinusoidDisturbance d;
    d.amplitude = t->number_or("amplitude", d.amplitude);
    d.angular_freq = t->number_or("angular_freq", d.angular_freq);
    return d;
  }
  if (kind == "impulse") {
    t->require_known("disturbance", {"kind", "area", "onset_time"});
    ImpulseDisturbance d;
    d.area = t->number_or("area", d.area);
    d.onset_time = t->number_or("onset_time", d.onset_time);
    return d;
  }
  if (kind == "leak") {
    t->require_known("disturbance", {"kind", "coefficient", "onset_time"});
    LeakDisturbance d;
    d.coefficient = t->number_or("coefficient", d.coefficient);
    d.onset_time = t->number_or("onset_time", d.onset_time);
    return d;
  }
  throw ConfigError("unknown disturbance kind '" + kind + "'");
}

ControllerSpec read_controller(const ConfigTable& t) {
  t.require_known("controller", {"kind", "label", "kp", "ki", "kd", "k", "k_sc", "alpha",
                                 "delta", "lambda", "use_sign"});
  ControllerSpec c;
  c.kind = parse_controller_kind(t.at("kind").as_string("controller.kind"));
  c.label = t.string_or("label", std::string(to_string(c.kind)));
  for (std::string_view name : kTunableParams) {
    if (const auto* v = t.find(name)) *param_slot(c, name) = v->as_number(name);
  }
  c.use_sign = t.bool_or("use_sign", c.use_sign);
  c.reaching.law = c.effective_reaching().law;
  return c;
}

TuneSpec read_tune(const ConfigTable& t, std::uint64_t scenario_seed) {
  t.require_known("tune", {"controller", "params", "bounds", "particles", "subpopulations",
                           "max_iterations", "seed", "variant", "stochastic", "threads",
                           "standard_coefficients"});
  TuneSpec spec;
  spec.controller = t.string_or("controller", "");
  ControllerSpec probe;
  for (const auto& v : t.at("params").as_array("tune.params")) {
    spec.params.push_back(v.as_string("tune.params"));
    param_slot(probe, spec.params.back());  // rejects unknown names
  }
  const auto& bounds = t.at("bounds").as_array("tune.bounds");
  if (bounds.size() != spec.params.size()) {
    throw ConfigError("tune.bounds needs one [lo, hi] pair per parameter");
  }
  for (const auto& b : bounds) {
    const auto pair = b.as_numbers("tune.bounds");
    if (pair.size() != 2) throw ConfigError("tune.bounds entries must be [lo, hi]");
    spec.swarm.bounds.push_back({pair[0], pair[1]});
  }
  SwarmConfig& s = spec.swarm;
  if (const auto* v = t.find("particles")) s.particles = v->as_unsigned("tune.particles");
  if (const auto* v = t.find("subpopulations")) {
    s.subpopulations = v->as_unsigned("tune.subpopulations");
  }
  if (const auto* v = t.find("max_iterations")) {
    s.max_iterations = v->as_unsigned("tune.max_iterations");
  }
  s.seed = scenario_seed;
  if (const auto* v = t.find("seed")) s.seed = v->as_unsigned("tune.seed");
  const std::string variant = t.string_or("variant", "modified");
  if (variant == "modified") {
    s.variant = PsoVariant::modified;
  } else if (variant == "standard") {
    s.variant = PsoVariant::standard;
  } else {
    throw ConfigError("tune.variant must be modified or standard");
  }
  s.stochastic = t.bool_or("stochastic", s.stochastic);
  if (const auto* v = t.find("threads")) s.threads = v->as_unsigned("tune.threads");
  if (const auto* v = t.find("standard_coefficients")) {
    const auto c = v->as_numbers("tune.standard_coefficients");
    if (c.size() != 3) throw ConfigError("tune.standard_coefficients must be [w, c1, c2]");
    s.standard_coefficients = {c[0], c[1], c[2]};
  }
  s.validate();
  return spec;
}

ConfigValue::Array numbers(std::initializer_list<double> xs) {
  ConfigValue::Array out;
  for (double x : xs) out.emplace_back(x);
  return out;
}

ControllerSpec pid_smc(ControllerKind kind, std::string label, SurfaceGains gains,
                       double layer_width) {
  ControllerSpec c;
  c.kind = kind;
  c.label = std::move(label);
  c.gains = gains;
  c.reaching = {ReachingLaw::proposed, 35.0, 1.5, 0.5, layer_width};
  c.reaching.law = c.effective_reaching().law;
  return c;
}

ControllerSpec classical_smc() {
  ControllerSpec c;
  c.kind = ControllerKind::smc1;
  c.label = "smc1";
  c.lambda = 5.0;
  c.reaching.switching_gain = 15.0;
  c.reaching.layer_width = 0.05;
  return c;
}

// Boundary layer wide enough to hold |s| <= kd d_max / k for d = 10 sin t.
constexpr double kPidSmcLayer = 0.3;

}  // namespace

ControllerSpec apply_params(const ControllerSpec& base, const std::vector<std::string>& names,
                            std::span<const double> values) {
  if (names.size() != values.size()) {
    throw ConfigError("expected " + std::to_string(names.size()) + " parameter values, got " +
                      std::to_string(values.size()));
  }
  ControllerSpec out = base;
  for (std::size_t i = 0; i < names.size(); ++i) *param_slot(out, names[i]) = values[i];
  return out;
}

std::vector<double> read_params(const ControllerSpec& spec,
                                const std::vector<std::string>& names) {
  ControllerSpec copy = spec;
  std::vector<double> out;
  out.reserve(names.size());
  for (const auto& n : names) out.push_back(*param_slot(copy, n));
  return out;
}

void ExperimentSpec::validate() const {
  scenario.validate();
  if (controllers.empty()) throw ConfigError("experiment has no controller blocks");
  std::set<std::string> seen;
  for (const auto& c : controllers) {
    if (!label_ok(c.label)) {
      throw ConfigError("controller label '" + c.label + "' must be [A-Za-z0-9_.-]+");
    }
    if (!seen.insert(c.label).second) {
      throw ConfigError("duplicate controller label '" + c.label + "'");
    }
    c.validate();
  }
  if (tune) {
    tune->swarm.validate();
    if (tune->params.size() != tune->swarm.bounds.size()) {
      throw ConfigError("tune.bounds needs one [lo, hi] pair per parameter");
    }
    (void)tune_target();
  }
}

const ControllerSpec& ExperimentSpec::controller(std::string_view label) const {
  for (const auto& c : controllers) {
    if (c.label == label) return c;
  }
  throw ConfigError("no controller labelled '" + std::string(label) + "'");
}

std::size_t ExperimentSpec::tune_target() const {
  if (!tune) throw ConfigError("experiment has no tune block");
  for (std::size_t i = 0; i < controllers.size(); ++i) {
    const auto& c = controllers[i];
    if (tune->controller.empty() ? (c.kind == ControllerKind::pid_smc_proposed ||
                                    c.kind == ControllerKind::pid_smc_eq)
                                 : c.label == tune->controller) {
      return i;
    }
  }
  throw ConfigError(tune->controller.empty()
                        ? std::string("tune block needs a PID-SMC controller")
                        : "tune.controller '" + tune->controller + "' not found");
}

ExperimentSpec experiment_from_config(const ConfigTable& table) {
  table.require_known("scenario", {"name", "plant", "horizon", "dt", "seed", "initial_state",
                                   "force_limit", "pendulum", "tank", "reference",
                                   "disturbance", "controller", "tune"});
  for (std::string_view single : {"pendulum", "tank", "reference", "disturbance", "tune"}) {
    if (table.tables(single).size() > 1) {
      throw ConfigError("table '" + std::string(single) + "' given more than once");
    }
  }
  ExperimentSpec spec;
  Scenario& sc = spec.scenario;
  sc.name = table.string_or("name", sc.name);
  const std::string plant = table.string_or("plant", "pendulum");
  if (plant == "pendulum") {
    sc.plant = read_pendulum(table.table("pendulum"));
  } else if (plant == "tank") {
    sc.plant = read_tank(table.table("tank"));
  } else if (plant == "vanderpol") {
    sc.plant = VanDerPolParams{};
  } else {
    throw ConfigError("unknown plant '" + plant + "'");
  }
  if (plant != "pendulum" && table.table("pendulum")) {
    throw ConfigError("pendulum table given for plant '" + plant + "'");
  }
  if (plant != "tank" && table.table("tank")) {
    throw ConfigError("tank table given for plant '" + plant + "'");
  }
  sc.horizon = table.number_or("horizon", sc.horizon);
  sc.dt = table.number_or("dt", sc.dt);
  if (const auto* v = table.find("seed")) sc.seed = v->as_unsigned("seed");
  if (const auto* v = table.find("force_limit")) sc.force_limit = v->as_number("force_limit");
  if (const auto* v = table.find("initial_state")) {
    const auto x0 = v->as_numbers("initial_state");
    const std::size_t order = Plant(sc.plant).order();
    if (x0.size() != order) {
      throw ConfigError("initial_state needs " + std::to_string(order) + " entries");
    }
    sc.initial_state = {};
    std::copy(x0.begin(), x0.end(), sc.initial_state.begin());
  }
  sc.reference = read_reference(table.table("reference"));
  sc.disturbance = read_disturbance(table.table("disturbance"));

  for (const ConfigTable* c : table.tables("controller")) {
    spec.controllers.push_back(read_controller(*c));
  }
  if (const auto* t = table.table("tune")) spec.tune = read_tune(*t, sc.seed);
  spec.validate();
  return spec;
}

ExperimentSpec load_experiment(const std::filesystem::path& path) {
  return experiment_from_config(load_config(path));
}

ConfigTable to_config(const ExperimentSpec& spec) {
  const Scenario& sc = spec.scenario;
  ConfigTable out;
  out.set("name", sc.name);
  out.set("plant", std::string(Plant(sc.plant).name()));
  out.set("horizon", sc.horizon);
  out.set("dt", sc.dt);
  out.set("seed", ConfigNumber{static_cast<double>(sc.seed), std::to_string(sc.seed)});
  const std::size_t order = Plant(sc.plant).order();
  ConfigValue::Array x0;
  for (std::size_t i = 0; i < order; ++i) x0.emplace_back(sc.initial_state[i]);
  out.set("initial_state", std::move(x0));
  if (sc.force_limit) out.set("force_limit", *sc.force_limit);

  std::visit(overloaded{
                 [&](const PendulumParams& p) {
                   ConfigTable& t = out.add_table("pendulum");
                   t.set("cart_mass", p.cart_mass);
                   t.set("bob_mass", p.bob_mass);
                   t.set("inertia", p.inertia);
                   t.set("length", p.length);
                   t.set("gravity", p.gravity);
                   t.set("friction", p.friction);
                 },
                 [&](const TankParams& p) {
                   ConfigTable& t = out.add_table("tank");
                   t.set("top_radius", p.top_radius);
                   t.set("max_height", p.max_height);
                   t.set("discharge_coeff", p.discharge_coeff);
                   t.set("max_inflow", p.max_inflow);
                   t.set("level_floor", p.level_floor);
                 },
                 [](const VanDerPolParams&) {},
             },
             sc.plant);

  ConfigTable& ref = out.add_table("reference");
  std::visit(overloaded{
                 [&](const ConstantReference& r) {
                   ref.set("kind", "constant");
                   ref.set("value", r.value);
                 },
                 [&](const SinusoidReference& r) {
                   ref.set("kind", "sinusoid");
                   ref.set("amplitude", r.amplitude);
                   ref.set("angular_freq", r.angular_freq);
                   ref.set("offset", r.offset);
                 },
             },
             sc.reference);

  ConfigTable& dist = out.add_table("disturbance");
  std::visit(overloaded{
                 [&](const NoDisturbance&) { dist.set("kind", "none"); },
                 [&](const SinusoidDisturbance& d) {
                   dist.set("kind", "sinusoid");
                   dist.set("amplitude", d.amplitude);
                   dist.set("angular_freq", d.angular_freq);
                 },
                 [&](const ImpulseDisturbance& d) {
                   dist.set("kind", "impulse");
                   dist.set("area", d.area);
                   dist.set("onset_time", d.onset_time);
                 },
                 [&](const LeakDisturbance& d) {
                   dist.set("kind", "leak");
                   dist.set("coefficient", d.coefficient);
                   dist.set("onset_time", d.onset_time);
                 },
             },
             sc.disturbance);

  for (const auto& c : spec.controllers) {
    ConfigTable& t = out.add_table("controller");
    t.set("kind", std::string(to_string(c.kind)));
    t.set("label", c.label);
    ControllerSpec copy = c;
    for (std::string_view name : kTunableParams) {
      t.set(std::string(name), *param_slot(copy, name));
    }
    t.set("use_sign", c.use_sign);
  }

  if (spec.tune) {
    const TuneSpec& tune = *spec.tune;
    const SwarmConfig& s = tune.swarm;
    ConfigTable& t = out.add_table("tune");
    t.set("controller", spec.controllers[spec.tune_target()].label);
    ConfigValue::Array params;
    ConfigValue::Array bounds;
    for (std::size_t i = 0; i < tune.params.size(); ++i) {
      params.emplace_back(tune.params[i]);
      bounds.emplace_back(numbers({s.bounds[i].lo, s.bounds[i].hi}));
    }
    t.set("params", std::move(params));
    t.set("bounds", std::move(bounds));
    const auto whole = [](std::uint64_t n) {
      return ConfigNumber{static_cast<double>(n), std::to_string(n)};
    };
    t.set("particles", whole(s.particles));
    t.set("subpopulations", whole(s.subpopulations));
    t.set("max_iterations", whole(s.max_iterations));
    t.set("seed", whole(s.seed));
    t.set("variant", s.variant == PsoVariant::modified ? "modified" : "standard");
    t.set("stochastic", s.stochastic);
    t.set("threads", whole(s.threads));
    t.set("standard_coefficients",
          numbers({s.standard_coefficients.inertia, s.standard_coefficients.cognitive,
                   s.standard_coefficients.social}));
  }
  return out;
}

// Presets --------------------------------------------------------------------

ExperimentSpec pendulum_preset() {
  ExperimentSpec spec;
  Scenario& sc = spec.scenario;
  sc.name = "pendulum";
  sc.plant = PendulumParams{};
  sc.initial_state = {std::numbers::pi / 6.0, 0.0};
  sc.reference = ConstantReference{0.0};
  sc.disturbance = SinusoidDisturbance{10.0, 1.0};
  sc.horizon = 5.0;
  sc.dt = 0.01;
  sc.seed = 1;

  const SurfaceGains gains{105.0, 4.0, 0.8};
  spec.controllers = {
      classical_smc(),
      pid_smc(ControllerKind::pid_smc_eq, "pid_smc_eq", gains, kPidSmcLayer),
      pid_smc(ControllerKind::pid_smc_proposed, "proposed", gains, kPidSmcLayer),
  };

  TuneSpec tune;
  tune.controller = "proposed";
  tune.params = {"kp", "ki", "kd", "k", "k_sc"};
  tune.swarm.bounds.assign(tune.params.size(), Bounds{0.0, 200.0});
  tune.swarm.seed = sc.seed;
  spec.tune = tune;
  return spec;
}

ExperimentSpec pendulum_impulse_preset() {
  ExperimentSpec spec = pendulum_preset();
  spec.scenario.name = "pendulum_impulse";
  spec.scenario.disturbance = ImpulseDisturbance{100.0, 0.0};
  ControllerSpec pid;
  pid.kind = ControllerKind::pid;
  pid.label = "pid";
  pid.gains = {105.0, 4.0, 0.8};
  spec.controllers = {pid, classical_smc(), spec.controllers.back()};
  spec.tune.reset();
  return spec;
}

ExperimentSpec pendulum_swingup_preset() {
  ExperimentSpec spec = pendulum_preset();
  spec.scenario.name = "pendulum_swingup";
  spec.scenario.initial_state = {std::numbers::pi, 0.0};
  spec.tune.reset();
  return spec;
}

ExperimentSpec tank_preset() {
  ExperimentSpec spec;
  Scenario& sc = spec.scenario;
  sc.name = "tank";
  const TankParams tank{};
  sc.plant = tank;
  sc.initial_state = {35.0, 0.0};
  sc.reference = ConstantReference{40.0};
  sc.disturbance = LeakDisturbance{0.1 * tank.discharge_coeff, 200.0};
  sc.horizon = 600.0;
  sc.dt = 0.01;
  sc.seed = 1;
  spec.controllers = {
      pid_smc(ControllerKind::pid_smc_proposed, "proposed", {105.0, 4.2, 0.0}, kPidSmcLayer),
  };
  return spec;
}

ExperimentSpec vanderpol_preset() {
  ExperimentSpec spec;
  Scenario& sc = spec.scenario;
  sc.name = "vanderpol";
  sc.plant = VanDerPolParams{};
  sc.initial_state = {std::numbers::pi / 60.0, 0.0};
  sc.reference = SinusoidReference{0.1, 1.0, 0.0};
  sc.disturbance = SinusoidDisturbance{10.0, 1.0};
  sc.horizon = 20.0;
  sc.dt = 0.01;
  sc.seed = 1;
  spec.controllers = {
      pid_smc(ControllerKind::pid_smc_proposed, "proposed", {105.0, 8.0, 0.8}, kPidSmcLayer),
      classical_smc(),
  };
  return spec;
}

std::vector<std::string> preset_names() {
  return {"pendulum", "pendulum_impulse", "pendulum_swingup", "tank", "vanderpol"};
}

ExperimentSpec preset(std::string_view name) {
  if (name == "pendulum") return pendulum_preset();
  if (name == "pendulum_impulse") return pendulum_impulse_preset();
  if (name == "pendulum_swingup") return pendulum_swingup_preset();
  if (name == "tank") return tank_preset();
  if (name == "vanderpol") return vanderpol_preset();
  throw ConfigError("unknown preset '" + std::string(name) + "'");
}

}  // namespace smcsim
