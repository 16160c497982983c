#include <yaml-cpp/yaml.h>

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "thrustdir/cli.hpp"
#include "thrustdir/errors.hpp"
#include "thrustdir/text.hpp"

namespace thrustdir::cli {

namespace {

using geom::deg2rad;
using SegKind = sim::ReferenceSegment::Kind;

class Reader {
 public:
  explicit Reader(std::string source) : source_(std::move(source)) {}

  [[noreturn]] void fail(const YAML::Node& node, const std::string& msg) const {
    const YAML::Mark m = node.Mark();
    if (m.line >= 0) {
      throw ConfigError(source_ + ":" + std::to_string(m.line + 1) + ": " + msg);
    }
    throw ConfigError(source_ + ": " + msg);
  }

  /// Rejects keys outside `allowed`; `where` names the section.
  void check_keys(const YAML::Node& map, const std::set<std::string>& allowed,
                  const std::string& where) const {
    if (!map.IsMap()) fail(map, "'" + where + "' must be a mapping");
    for (auto it = map.begin(); it != map.end(); ++it) {
      const std::string key = it->first.as<std::string>();
      if (allowed.count(key) == 0) {
        fail(it->first, "unknown key '" + key + "' in '" + where + "'");
      }
    }
  }

  double number(const YAML::Node& node, const std::string& what) const {
    if (!node.IsScalar()) fail(node, "'" + what + "' must be a number");
    double v = 0.0;
    try {
      v = text::parse_double(node.Scalar());
    } catch (const ConfigError&) {
      fail(node, "'" + what + "' must be a number, got '" + node.Scalar() + "'");
    }
    if (!std::isfinite(v)) fail(node, "'" + what + "' must be finite");
    return v;
  }

  void read(const YAML::Node& map, const char* key, double& out) const {
    if (const YAML::Node n = map[key]) out = number(n, key);
  }

  void read(const YAML::Node& map, const char* key, int& out) const {
    if (const YAML::Node n = map[key]) {
      const double v = number(n, key);
      if (v != std::floor(v) || std::abs(v) > 1e9) fail(n, std::string("'") + key + "' must be an integer");
      out = static_cast<int>(v);
    }
  }

  void read(const YAML::Node& map, const char* key, Vec3& out) const {
    if (const YAML::Node n = map[key]) out = vec3(n, key);
  }

  Vec3 vec3(const YAML::Node& n, const std::string& what) const {
    if (!n.IsSequence() || n.size() != 3) fail(n, "'" + what + "' must be a list of 3 numbers");
    return Vec3(number(n[0], what), number(n[1], what), number(n[2], what));
  }

  std::vector<double> list(const YAML::Node& n, const std::string& what) const {
    if (!n.IsSequence()) fail(n, "'" + what + "' must be a list of numbers");
    std::vector<double> out;
    for (std::size_t i = 0; i < n.size(); ++i) out.push_back(number(n[i], what));
    return out;
  }

  std::string word(const YAML::Node& n, const std::string& what,
                   const std::set<std::string>& choices) const {
    if (!n.IsScalar() || choices.count(n.Scalar()) == 0) {
      std::string opts;
      for (const auto& c : choices) opts += (opts.empty() ? "" : " | ") + c;
      fail(n, "'" + what + "' must be one of: " + opts);
    }
    return n.Scalar();
  }

 private:
  std::string source_;
};

void read_run(const Reader& r, const YAML::Node& n, RunSection& run) {
  r.check_keys(n, {"kind", "duration", "dt", "decimation", "controller", "sampling",
                   "stiffness_step"},
               "run");
  if (const YAML::Node k = n["kind"]) {
    run.kind = r.word(k, "kind", {"closed_loop", "kinematic"}) == "kinematic"
                   ? RunKind::kinematic
                   : RunKind::closed_loop;
  }
  r.read(n, "duration", run.duration);
  r.read(n, "dt", run.dt);
  r.read(n, "decimation", run.decimation);
  r.read(n, "stiffness_step", run.stiffness_step);
  if (const YAML::Node c = n["controller"]) {
    run.controller = r.word(c, "controller", {"fp", "fa"}) == "fa"
                         ? ctrl::ControllerMode::fa
                         : ctrl::ControllerMode::fp;
  }
  if (const YAML::Node s = n["sampling"]) {
    run.sampling = r.word(s, "sampling", {"continuous", "zoh"}) == "zoh"
                       ? sim::Sampling::zero_order_hold
                       : sim::Sampling::continuous;
  }
}

void read_aero(const Reader& r, const YAML::Node& n, AeroSection& aero) {
  r.check_keys(n, {"model", "c0", "c1", "symmetry", "alpha_deg", "cl", "cd"}, "vehicle.aero");
  if (const YAML::Node m = n["model"]) {
    aero.kind = r.word(m, "model", {"trig", "table"}) == "table" ? AeroSection::Kind::table
                                                                 : AeroSection::Kind::trig;
  }
  r.read(n, "c0", aero.c0);
  r.read(n, "c1", aero.c1);
  if (const YAML::Node s = n["symmetry"]) {
    aero.symmetry = r.word(s, "symmetry", {"none", "bisymmetric"}) == "none"
                        ? aero::Symmetry::none
                        : aero::Symmetry::bisymmetric;
  }
  if (const YAML::Node a = n["alpha_deg"]) aero.alpha_deg = r.list(a, "alpha_deg");
  if (const YAML::Node a = n["cl"]) aero.cl = r.list(a, "cl");
  if (const YAML::Node a = n["cd"]) aero.cd = r.list(a, "cd");
  if (aero.kind == AeroSection::Kind::table) {
    try {
      aero::TableCoeffModel(aero.alpha_deg, aero.cl, aero.cd, aero.symmetry);
    } catch (const ConfigError& e) {
      r.fail(n, std::string("invalid aero table: ") + e.what());
    }
  }
}

void read_vehicle(const Reader& r, const YAML::Node& n, VehicleSection& v) {
  r.check_keys(n, {"mass", "gravity", "ka", "aero"}, "vehicle");
  r.read(n, "mass", v.mass);
  r.read(n, "gravity", v.gravity);
  r.read(n, "ka", v.ka);
  if (const YAML::Node a = n["aero"]) read_aero(r, a, v.aero);
}

void read_estimates(const Reader& r, const YAML::Node& n, ctrl::CtrlEstimates& e) {
  r.check_keys(n, {"mass", "ka", "c0", "c1"}, "estimates");
  r.read(n, "mass", e.mass);
  r.read(n, "ka", e.ka);
  r.read(n, "c0", e.c0);
  r.read(n, "c1", e.c1);
}

void read_gains(const Reader& r, const YAML::Node& n, ctrl::CtrlGains& g) {
  r.check_keys(n, {"kv", "ki", "kI", "k10", "eps1", "k1_power", "c2", "delta",
                   "thrust_max_factor", "thrust_min_factor", "omega_max",
                   "eps_singular", "antipodal_margin"},
               "gains");
  r.read(n, "kv", g.kv);
  r.read(n, "ki", g.ki);
  r.read(n, "kI", g.kI);
  r.read(n, "k10", g.k10);
  r.read(n, "eps1", g.eps1);
  r.read(n, "k1_power", g.k1_power);
  r.read(n, "c2", g.c2);
  r.read(n, "delta", g.delta_sat);
  r.read(n, "thrust_max_factor", g.thrust_max_factor);
  r.read(n, "thrust_min_factor", g.thrust_min_factor);
  r.read(n, "omega_max", g.omega_max);
  r.read(n, "eps_singular", g.eps_singular);
  r.read(n, "antipodal_margin", g.antipodal_margin);
}

std::vector<SegmentSection> read_reference(const Reader& r, const YAML::Node& n) {
  if (!n.IsSequence()) r.fail(n, "'reference' must be a list of segments");
  std::vector<SegmentSection> out;
  for (std::size_t i = 0; i < n.size(); ++i) {
    const YAML::Node s = n[i];
    r.check_keys(s, {"t_start", "t_end", "constant", "sinusoid"}, "reference");
    SegmentSection seg;
    if (!s["t_start"] || !s["t_end"]) r.fail(s, "reference segment needs t_start and t_end");
    r.read(s, "t_start", seg.t_start);
    r.read(s, "t_end", seg.t_end);
    const bool has_c = static_cast<bool>(s["constant"]);
    const bool has_s = static_cast<bool>(s["sinusoid"]);
    if (has_c == has_s) r.fail(s, "reference segment needs exactly one of 'constant', 'sinusoid'");
    if (has_c) {
      seg.constant = r.vec3(s["constant"], "constant");
    } else {
      const YAML::Node q = s["sinusoid"];
      r.check_keys(q, {"offset", "amplitude", "omega", "phase_deg"}, "reference.sinusoid");
      seg.kind = SegKind::sinusoid;
      r.read(q, "offset", seg.offset);
      r.read(q, "amplitude", seg.amplitude);
      r.read(q, "omega", seg.omega);
      r.read(q, "phase_deg", seg.phase_deg);
    }
    out.push_back(seg);
  }
  return out;
}

void read_wind(const Reader& r, const YAML::Node& n, WindSection& w) {
  r.check_keys(n, {"constant", "sinusoids"}, "wind");
  r.read(n, "constant", w.constant);
  if (const YAML::Node list = n["sinusoids"]) {
    if (!list.IsSequence()) r.fail(list, "'sinusoids' must be a list");
    for (std::size_t i = 0; i < list.size(); ++i) {
      r.check_keys(list[i], {"amplitude", "omega", "phase_deg"}, "wind.sinusoids");
      WindTermSection t;
      r.read(list[i], "amplitude", t.amplitude);
      r.read(list[i], "omega", t.omega);
      r.read(list[i], "phase_deg", t.phase_deg);
      w.terms.push_back(t);
    }
  }
}

void read_initial(const Reader& r, const YAML::Node& n, InitialSection& in) {
  r.check_keys(n, {"p0", "v0", "euler_deg"}, "initial");
  r.read(n, "p0", in.p0);
  r.read(n, "v0", in.v0);
  r.read(n, "euler_deg", in.euler_deg);
}

void read_kinematic(const Reader& r, const YAML::Node& n, KinematicSection& k) {
  r.check_keys(n, {"k0", "kr0", "kr_axis", "kr_amplitude_deg", "kr_omega", "gamma0",
                   "gamma_amplitude", "gamma_omega", "max_substep_rotation"},
               "kinematic");
  r.read(n, "k0", k.k0);
  r.read(n, "kr0", k.kr0);
  r.read(n, "kr_axis", k.kr_axis);
  r.read(n, "kr_amplitude_deg", k.kr_amplitude_deg);
  r.read(n, "kr_omega", k.kr_omega);
  r.read(n, "gamma0", k.gamma0);
  r.read(n, "gamma_amplitude", k.gamma_amplitude);
  r.read(n, "gamma_omega", k.gamma_omega);
  r.read(n, "max_substep_rotation", k.max_substep_rotation);
}

// ---------------------------------------------------------------------------
// Emission

std::string num(double v) { return text::format_exact(v); }

std::string vec(const Vec3& v) {
  return "[" + num(v(0)) + ", " + num(v(1)) + ", " + num(v(2)) + "]";
}

std::string list(const std::vector<double>& xs) {
  std::string out = "[";
  for (std::size_t i = 0; i < xs.size(); ++i) out += (i ? ", " : "") + num(xs[i]);
  return out + "]";
}

}  // namespace

ScenarioFile parse_scenario(const std::string& text, const std::string& source) {
  const Reader r(source);
  YAML::Node root;
  try {
    root = YAML::Load(text);
  } catch (const YAML::ParserException& e) {
    throw ConfigError(source + ":" + std::to_string(e.mark.line + 1) + ": " + e.msg);
  }
  ScenarioFile f;
  if (root.IsNull()) return f;
  r.check_keys(root, {"run", "vehicle", "estimates", "gains", "reference", "wind",
                      "initial", "kinematic"},
               "top level");
  if (const YAML::Node n = root["run"]) read_run(r, n, f.run);
  if (const YAML::Node n = root["vehicle"]) read_vehicle(r, n, f.vehicle);
  if (const YAML::Node n = root["estimates"]) read_estimates(r, n, f.estimates);
  f.gains = ctrl::CtrlGains::defaults_for(f.estimates, f.vehicle.gravity);
  if (const YAML::Node n = root["gains"]) read_gains(r, n, f.gains);
  if (const YAML::Node n = root["reference"]) f.reference = read_reference(r, n);
  if (const YAML::Node n = root["wind"]) read_wind(r, n, f.wind);
  if (const YAML::Node n = root["initial"]) read_initial(r, n, f.initial);
  if (const YAML::Node n = root["kinematic"]) read_kinematic(r, n, f.kinematic);
  return f;
}

ScenarioFile load_scenario(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw ConfigError("cannot open scenario file '" + path + "'");
  }
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_scenario(ss.str(), path);
}

std::string emit_scenario(const ScenarioFile& f) {
  std::ostringstream o;
  o << "# thrustdir scenario. Velocities in Mach (1 Mach = 340 m/s), angles in\n"
       "# degrees, everything else SI.\n";
  o << "run:\n"
    << "  kind: " << (f.run.kind == RunKind::kinematic ? "kinematic" : "closed_loop") << "\n"
    << "  duration: " << num(f.run.duration) << "  # s\n"
    << "  dt: " << num(f.run.dt) << "  # s\n"
    << "  decimation: " << f.run.decimation << "\n"
    << "  controller: " << (f.run.controller == ctrl::ControllerMode::fa ? "fa" : "fp") << "\n"
    << "  sampling: "
    << (f.run.sampling == sim::Sampling::zero_order_hold ? "zoh" : "continuous") << "\n"
    << "  stiffness_step: " << num(f.run.stiffness_step) << "\n";

  const AeroSection& a = f.vehicle.aero;
  o << "vehicle:\n"
    << "  mass: " << num(f.vehicle.mass) << "  # kg\n"
    << "  gravity: " << num(f.vehicle.gravity) << "  # m/s^2\n"
    << "  ka: " << num(f.vehicle.ka) << "  # kg/m\n"
    << "  aero:\n"
    << "    model: " << (a.kind == AeroSection::Kind::table ? "table" : "trig") << "\n"
    << "    c0: " << num(a.c0) << "\n"
    << "    c1: " << num(a.c1) << "\n";
  if (a.kind == AeroSection::Kind::table) {
    o << "    symmetry: " << (a.symmetry == aero::Symmetry::none ? "none" : "bisymmetric") << "\n"
      << "    alpha_deg: " << list(a.alpha_deg) << "\n"
      << "    cl: " << list(a.cl) << "\n"
      << "    cd: " << list(a.cd) << "\n";
  }

  o << "estimates:\n"
    << "  mass: " << num(f.estimates.mass) << "  # kg\n"
    << "  ka: " << num(f.estimates.ka) << "  # kg/m\n"
    << "  c0: " << num(f.estimates.c0) << "\n"
    << "  c1: " << num(f.estimates.c1) << "\n";

  const ctrl::CtrlGains& g = f.gains;
  o << "gains:\n"
    << "  kv: " << num(g.kv) << "  # 1/s\n"
    << "  ki: " << num(g.ki) << "  # 1/s^2\n"
    << "  kI: " << num(g.kI) << "  # 1/s\n"
    << "  k10: " << num(g.k10) << "  # 1/s\n"
    << "  eps1: " << num(g.eps1) << "\n"
    << "  k1_power: " << g.k1_power << "\n"
    << "  c2: " << num(g.c2) << "  # N^2\n"
    << "  delta: " << num(g.delta_sat) << "  # m\n"
    << "  thrust_max_factor: " << num(g.thrust_max_factor) << "\n"
    << "  thrust_min_factor: " << num(g.thrust_min_factor) << "\n"
    << "  omega_max: " << num(g.omega_max) << "  # rad/s\n"
    << "  eps_singular: " << num(g.eps_singular) << "  # N\n"
    << "  antipodal_margin: " << num(g.antipodal_margin) << "\n";

  o << "reference:\n";
  for (const SegmentSection& s : f.reference) {
    o << "  - t_start: " << num(s.t_start) << "\n"
      << "    t_end: " << num(s.t_end) << "\n";
    if (s.kind == SegKind::constant) {
      o << "    constant: " << vec(s.constant) << "\n";
    } else {
      o << "    sinusoid:\n"
        << "      offset: " << vec(s.offset) << "\n"
        << "      amplitude: " << vec(s.amplitude) << "\n"
        << "      omega: " << vec(s.omega) << "  # rad/s\n"
        << "      phase_deg: " << vec(s.phase_deg) << "\n";
    }
  }
  if (f.reference.empty()) o << "  []\n";

  o << "wind:\n"
    << "  constant: " << vec(f.wind.constant) << "\n"
    << "  sinusoids:";
  if (f.wind.terms.empty()) o << " []";
  o << "\n";
  for (const WindTermSection& t : f.wind.terms) {
    o << "    - amplitude: " << vec(t.amplitude) << "\n"
      << "      omega: " << vec(t.omega) << "\n"
      << "      phase_deg: " << vec(t.phase_deg) << "\n";
  }

  o << "initial:\n"
    << "  p0: " << vec(f.initial.p0) << "  # m\n"
    << "  v0: " << vec(f.initial.v0) << "\n"
    << "  euler_deg: " << vec(f.initial.euler_deg) << "  # roll, pitch, yaw\n";

  const KinematicSection& k = f.kinematic;
  o << "kinematic:\n"
    << "  k0: " << vec(k.k0) << "\n"
    << "  kr0: " << vec(k.kr0) << "\n"
    << "  kr_axis: " << vec(k.kr_axis) << "\n"
    << "  kr_amplitude_deg: " << num(k.kr_amplitude_deg) << "\n"
    << "  kr_omega: " << num(k.kr_omega) << "  # rad/s\n"
    << "  gamma0: " << num(k.gamma0) << "  # N\n"
    << "  gamma_amplitude: " << num(k.gamma_amplitude) << "\n"
    << "  gamma_omega: " << num(k.gamma_omega) << "  # rad/s\n"
    << "  max_substep_rotation: " << num(k.max_substep_rotation) << "  # rad\n";
  return o.str();
}

sim::Scenario to_scenario(const ScenarioFile& f) {
  constexpr double M = plant::kMach;
  sim::Scenario sc;
  sc.duration = f.run.duration;
  sc.dt = f.run.dt;
  sc.decimation = f.run.decimation;
  sc.mode = f.run.controller;
  sc.sampling = f.run.sampling;
  sc.stiffness_step = f.run.stiffness_step;

  sc.vehicle.mass = f.vehicle.mass;
  sc.vehicle.gravity = f.vehicle.gravity;
  sc.vehicle.ka = f.vehicle.ka;
  const AeroSection& a = f.vehicle.aero;
  if (a.kind == AeroSection::Kind::table) {
    sc.vehicle.truth_aero = aero::TableCoeffModel(a.alpha_deg, a.cl, a.cd, a.symmetry);
  } else {
    sc.vehicle.truth_aero = aero::TrigCoeffModel{a.c0, a.c1};
  }
  sc.vehicle.wind.constant = f.wind.constant * M;
  for (const WindTermSection& t : f.wind.terms) {
    sc.vehicle.wind.terms.push_back(
        {t.amplitude * M, t.omega, t.phase_deg * (geom::kPi / 180.0)});
  }

  sc.estimates = f.estimates;
  sc.gains = f.gains;

  if (f.reference.empty()) {
    throw ConfigError("scenario has no reference segments");
  }
  std::vector<sim::ReferenceSegment> segs;
  for (const SegmentSection& s : f.reference) {
    sim::ReferenceSegment seg;
    seg.t_start = s.t_start;
    seg.t_end = s.t_end;
    seg.kind = s.kind;
    seg.value = s.constant * M;
    seg.sinusoid.offset = s.offset * M;
    seg.sinusoid.amplitude = s.amplitude * M;
    seg.sinusoid.omega = s.omega;
    seg.sinusoid.phase = s.phase_deg * (geom::kPi / 180.0);
    segs.push_back(seg);
  }
  sc.reference = sim::ReferenceProfile(std::move(segs));

  sc.initial.p0 = f.initial.p0;
  sc.initial.v0 = f.initial.v0 * M;
  sc.initial.euler0 = f.initial.euler_deg * (geom::kPi / 180.0);
  try {
    sc.validate();
  } catch (const ContractViolation& e) {
    throw ConfigError(e.what());
  }
  return sc;
}

sim::KinematicScenario to_kinematic(const ScenarioFile& f) {
  const KinematicSection& k = f.kinematic;
  sim::KinematicScenario ks;
  ks.duration = f.run.duration;
  ks.dt = f.run.dt;
  ks.k0 = k.k0;
  ks.kr0 = k.kr0;
  ks.kr_axis = k.kr_axis;
  ks.kr_amplitude = deg2rad(k.kr_amplitude_deg);
  ks.kr_omega = k.kr_omega;
  ks.gamma0 = k.gamma0;
  ks.gamma_amplitude = k.gamma_amplitude;
  ks.gamma_omega = k.gamma_omega;
  ks.gains = f.gains;
  ks.max_substep_rotation = k.max_substep_rotation;
  try {
    ks.validate();
  } catch (const ContractViolation& e) {
    throw ConfigError(e.what());
  }
  return ks;
}

// ---------------------------------------------------------------------------
// Presets

std::vector<std::string> preset_names() {
  return {"c701-fig4", "c701-fig5", "hover", "prop3-kinematic"};
}

ScenarioFile preset(const std::string& name, const PresetOptions& options) {
  ScenarioFile f;
  f.vehicle.ka = options.computed_ka ? kComputedKa : 0.3;
  if (options.perturbed_table) {
    AeroSection& a = f.vehicle.aero;
    a.kind = AeroSection::Kind::table;
    a.symmetry = aero::Symmetry::bisymmetric;
    const aero::TrigCoeffModel trig{a.c0, a.c1};
    for (int deg = 0; deg <= 90; ++deg) {
      const double al = deg2rad(deg);
      const double ripple = 1.0 + 0.1 * std::sin(4.0 * al);
      a.alpha_deg.push_back(deg);
      a.cl.push_back(trig.cl(al) * ripple);
      a.cd.push_back(trig.cd(al) * ripple);
    }
  }
  f.gains = ctrl::CtrlGains::defaults_for(f.estimates, f.vehicle.gravity);

  if (name == "c701-fig4" || name == "c701-fig5") {
    f.run.controller = name == "c701-fig5" ? ctrl::ControllerMode::fa : ctrl::ControllerMode::fp;
    const std::vector<std::pair<double, Vec3>> constants{
        {0.0, Vec3(0.7, 0.0, 0.0)},
        {10.0, Vec3(0.0, -0.7, 0.0)},
        {20.0, Vec3(0.0, 0.0, -0.7)},
        {30.0, Vec3(-0.7, 0.0, 0.0)},
    };
    for (const auto& [t0, v] : constants) {
      SegmentSection s;
      s.t_start = t0;
      s.t_end = t0 + 10.0;
      s.constant = v;
      f.reference.push_back(s);
    }
    SegmentSection wave;
    wave.t_start = 40.0;
    wave.t_end = 60.0;
    wave.kind = SegKind::sinusoid;
    wave.amplitude = Vec3(-0.5, 0.6, 0.6);
    wave.omega = Vec3(geom::kPi / 5.0, geom::kPi / 10.0, geom::kPi / 10.0);
    wave.phase_deg = Vec3(0.0, 0.0, 90.0);
    f.reference.push_back(wave);
    f.initial.v0 = Vec3(0.5, 0.0, 0.0);
    f.initial.euler_deg = Vec3(0.0, -40.0, 0.0);
    return f;
  }
  if (name == "hover") {
    f.run.duration = 20.0;
    SegmentSection s;
    s.t_end = 20.0;
    f.reference.push_back(s);
    return f;
  }
  if (name == "prop3-kinematic") {
    f.run.kind = RunKind::kinematic;
    f.run.duration = 5.0;
    f.run.decimation = 1;
    f.kinematic.k0 = Vec3(1.0, 1.0, -0.5);
    f.kinematic.kr0 = Vec3(0.0, 0.0, 1.0);
    f.kinematic.kr_axis = Vec3(1.0, 0.0, 0.0);
    f.kinematic.kr_amplitude_deg = 30.0;
    f.kinematic.kr_omega = 1.0;
    f.kinematic.gamma0 = 1000.0;
    f.kinematic.gamma_amplitude = 0.3;
    f.kinematic.gamma_omega = 2.0;
    SegmentSection s;
    s.t_end = 5.0;
    f.reference.push_back(s);
    return f;
  }
  std::string names;
  for (const auto& n : preset_names()) names += (names.empty() ? "" : ", ") + n;
  throw ConfigError("unknown preset '" + name + "' (known: " + names + ")");
}

}  // namespace thrustdir::cli
