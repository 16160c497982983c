#include <fstream>
#include <ostream>

#include "thrustdir/cli.hpp"
#include "thrustdir/errors.hpp"
#include "thrustdir/text.hpp"

namespace thrustdir::cli {

namespace {

std::ofstream open_out(const std::string& path) {
  std::ofstream f(path);
  if (!f) {
    throw ConfigError("cannot write '" + path + "'");
  }
  return f;
}

std::string commented(const std::string& doc) {
  std::string out;
  std::size_t pos = 0;
  while (pos < doc.size()) {
    const std::size_t end = doc.find('\n', pos);
    const std::string line = doc.substr(pos, end - pos);
    out += line.rfind('#', 0) == 0 ? line : "# " + line;
    out += '\n';
    if (end == std::string::npos) break;
    pos = end + 1;
  }
  return out;
}

int exit_code(const sim::Termination& term) {
  switch (term.kind) {
    case sim::TerminationKind::completed: return 0;
    case sim::TerminationKind::singular_reference:
    case sim::TerminationKind::antipodal: return 2;
    case sim::TerminationKind::nonfinite: return 1;
  }
  return 1;
}

}  // namespace

int cmd_run(const RunCommand& cmd, std::ostream& out, std::ostream& err) {
  try {
    ScenarioFile file = load_scenario(cmd.scenario_path);
    if (cmd.controller) {
      if (*cmd.controller != "fp" && *cmd.controller != "fa") {
        throw ConfigError("--controller must be fp or fa");
      }
      file.run.controller =
          *cmd.controller == "fa" ? ctrl::ControllerMode::fa : ctrl::ControllerMode::fp;
    }
    if (cmd.dt) file.run.dt = *cmd.dt;
    if (cmd.decimation) file.run.decimation = *cmd.decimation;

    const sim::RunResult result = file.run.kind == RunKind::kinematic
                                      ? sim::run_kinematic(to_kinematic(file))
                                      : sim::run(to_scenario(file));

    const std::string report =
        "# effective scenario\n" + commented(emit_scenario(file)) + summary_report(result);
    if (!cmd.out.empty()) {
      std::ofstream csv = open_out(cmd.out);
      write_trace_csv(csv, result.trace);
      std::ofstream summary = open_out(cmd.out + ".summary.txt");
      summary << report;
    }
    out << summary_report(result);
    return exit_code(result.termination);
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
}

int cmd_fit(const FitCommand& cmd, std::ostream& out, std::ostream& err) {
  try {
    aero::FitOptions options;
    if (cmd.weighting == "relative") {
      options.weighting = aero::FitWeighting::relative;
    } else if (cmd.weighting != "uniform") {
      throw ConfigError("--weighting must be uniform or relative");
    }
    const std::vector<aero::CoeffRow> rows = aero::read_coeff_csv_file(cmd.table_path);
    const std::vector<aero::CoeffSample> samples = aero::samples_from_rows(rows);
    const aero::FitReport rep = aero::fit_trig_model(samples, options);

    std::string doc = aero::format_fit_report(rep);
    doc += "# scenario fragment\n";
    doc += "estimates:\n";
    doc += "  c0: " + text::format_exact(rep.model.c0) + "\n";
    doc += "  c1: " + text::format_exact(rep.model.c1) + "\n";

    if (cmd.out.empty()) {
      out << doc;
    } else {
      std::ofstream f = open_out(cmd.out);
      f << doc;
      out << aero::format_fit_report(rep);
    }
    return 0;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
}

int cmd_preset(const PresetCommand& cmd, std::ostream& out, std::ostream& err) {
  try {
    const std::string doc = emit_scenario(preset(cmd.name, cmd.options));
    if (cmd.out.empty()) {
      out << doc;
    } else {
      std::ofstream f = open_out(cmd.out);
      f << doc;
    }
    return 0;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
}

std::string schema_help() {
  return R"(Scenario file (YAML). Velocities in Mach (1 Mach = 340 m/s), angles in
degrees, everything else SI. Unknown keys are errors; omitted keys take the
defaults below. `thrustdir preset <name>` prints a complete file.

run:
  kind: closed_loop          # closed_loop | kinematic
  duration: 60               # s
  dt: 0.001                  # s, integration step
  decimation: 10             # log every n-th step
  controller: fp             # fp (equivalent drag) | fa (raw aerodynamic force)
  sampling: continuous       # continuous | zoh (controller held over a step)
  stiffness_step: 0.5        # split steps so that h * loop rate <= this; 0 = off
vehicle:
  mass: 100                  # kg
  gravity: 9.81              # m/s^2, along +z (down)
  ka: 0.3                    # kg/m, rho * Sigma / 2
  aero:
    model: trig              # trig | table
    c0: 0.1                  # C_D = c0 + 2 c1 sin^2(a), C_L = c1 sin(2a)
    c1: 11.55
    symmetry: bisymmetric    # table only: none | bisymmetric
    alpha_deg: [...]         # table only, ascending in [0, 180]
    cl: [...]
    cd: [...]
estimates:                   # controller-side model
  mass: 80                   # kg
  ka: 0.24                   # kg/m
  c0: 0.1
  c1: 11.55
gains:
  kv: 5                      # 1/s
  ki: 6.25                   # 1/s^2
  kI: 50                     # 1/s, integral desaturation rate
  k10: 10                    # 1/s
  eps1: 0.01
  k1_power: 2                # k1 = k10 / (1 + k.kr + eps1)^power
  c2: (m_hat g / 10)^2       # N^2
  delta: 2                   # m, bound on |I_v|
  thrust_max_factor: 10      # T < factor * m_hat g
  thrust_min_factor: 1e-6    # T >= factor * m_hat g
  omega_max: 6.2831853       # rad/s per body axis
  eps_singular: 1e-3 m_hat g # N, abort when |Fbar| falls below
  antipodal_margin: 1e-9     # abort when k.kr <= -1 + margin
reference:                   # contiguous segments from t = 0
  - t_start: 0
    t_end: 10
    constant: [0.7, 0, 0]    # Mach
  - t_start: 10
    t_end: 30
    sinusoid:                # offset + amplitude * sin(omega t + phase)
      offset: [0, 0, 0]      # Mach
      amplitude: [0, 0, 0]   # Mach
      omega: [0, 0, 0]       # rad/s
      phase_deg: [0, 0, 0]
wind:
  constant: [0, 0, 0]        # Mach
  sinusoids: []              # list of {amplitude (Mach), omega, phase_deg}
initial:
  p0: [0, 0, 0]              # m
  v0: [0, 0, 0]              # Mach
  euler_deg: [0, 0, 0]       # roll, pitch, yaw; R = Rz Ry Rx
kinematic:                   # kind: kinematic only
  k0: [1, 1, -0.5]           # initial thrust axis (normalized)
  kr0: [0, 0, 1]
  kr_axis: [1, 0, 0]         # kr(t) = Rot(axis, A sin(w t)) kr0
  kr_amplitude_deg: 0
  kr_omega: 0                # rad/s
  gamma0: 1000               # N, gamma(t) = gamma0 (1 + a sin(w t))
  gamma_amplitude: 0
  gamma_omega: 0             # rad/s
  max_substep_rotation: 0.02 # rad
)";
}

}  // namespace thrustdir::cli
