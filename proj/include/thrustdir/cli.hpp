// Scenario files, trace CSV, presets and the command implementations behind
// the `thrustdir` executable.
//
// Scenario files are YAML. Velocities are in Mach, angles in degrees, every
// other quantity in SI units. Unknown keys are rejected; omitted keys take
// the defaults written out by `thrustdir preset`.
#pragma once

#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "thrustdir/sim.hpp"

namespace thrustdir::cli {

using geom::Vec3;

enum class RunKind { closed_loop, kinematic };

struct RunSection {
  RunKind kind = RunKind::closed_loop;
  double duration = 60.0;  ///< s
  double dt = 1e-3;        ///< s
  int decimation = 10;
  ctrl::ControllerMode controller = ctrl::ControllerMode::fp;
  sim::Sampling sampling = sim::Sampling::continuous;
  double stiffness_step = 0.5;
};

struct AeroSection {
  enum class Kind { trig, table };
  Kind kind = Kind::trig;
  double c0 = 0.1;
  double c1 = 11.55;
  aero::Symmetry symmetry = aero::Symmetry::bisymmetric;
  std::vector<double> alpha_deg;
  std::vector<double> cl;
  std::vector<double> cd;
};

struct VehicleSection {
  double mass = 100.0;  ///< kg
  double gravity = plant::kGravity;
  double ka = 0.3;      ///< kg/m
  AeroSection aero;
};

struct SegmentSection {
  double t_start = 0.0;
  double t_end = 0.0;
  sim::ReferenceSegment::Kind kind = sim::ReferenceSegment::Kind::constant;
  Vec3 constant = Vec3::Zero();   ///< Mach
  Vec3 offset = Vec3::Zero();     ///< Mach
  Vec3 amplitude = Vec3::Zero();  ///< Mach
  Vec3 omega = Vec3::Zero();      ///< rad/s
  Vec3 phase_deg = Vec3::Zero();
};

struct WindTermSection {
  Vec3 amplitude = Vec3::Zero();  ///< Mach
  Vec3 omega = Vec3::Zero();      ///< rad/s
  Vec3 phase_deg = Vec3::Zero();
};

struct WindSection {
  Vec3 constant = Vec3::Zero();  ///< Mach
  std::vector<WindTermSection> terms;
};

struct InitialSection {
  Vec3 p0 = Vec3::Zero();         ///< m
  Vec3 v0 = Vec3::Zero();         ///< Mach
  Vec3 euler_deg = Vec3::Zero();  ///< roll, pitch, yaw
};

struct KinematicSection {
  Vec3 k0 = Vec3(1.0, 1.0, -0.5);
  Vec3 kr0 = Vec3::UnitZ();
  Vec3 kr_axis = Vec3::UnitX();
  double kr_amplitude_deg = 0.0;
  double kr_omega = 0.0;  ///< rad/s
  double gamma0 = 1000.0;  ///< N
  double gamma_amplitude = 0.0;
  double gamma_omega = 0.0;  ///< rad/s
  double max_substep_rotation = 0.02;  ///< rad
};

/// In-file representation; converts losslessly to sim::Scenario.
struct ScenarioFile {
  RunSection run;
  VehicleSection vehicle;
  ctrl::CtrlEstimates estimates;
  ctrl::CtrlGains gains = ctrl::CtrlGains::defaults_for(ctrl::CtrlEstimates{}, plant::kGravity);
  std::vector<SegmentSection> reference;
  WindSection wind;
  InitialSection initial;
  KinematicSection kinematic;
};

/// Parses a scenario document. `source` prefixes error messages
/// ("<source>:<line>: ..."). Throws ConfigError.
ScenarioFile parse_scenario(const std::string& text, const std::string& source = "scenario");
ScenarioFile load_scenario(const std::string& path);

/// Complete document with every key, doubles printed in shortest round-trip form.
std::string emit_scenario(const ScenarioFile& file);

/// Throws ConfigError when the result is not a valid scenario.
sim::Scenario to_scenario(const ScenarioFile& file);
sim::KinematicScenario to_kinematic(const ScenarioFile& file);

// ---------------------------------------------------------------------------
// Presets

struct PresetOptions {
  bool computed_ka = false;      ///< ka = rho Sigma / 2 = 0.323 instead of 0.3
  bool perturbed_table = false;  ///< truth aero = trig table times +-10 % ripple
};

std::vector<std::string> preset_names();

/// Throws ConfigError for an unknown name.
ScenarioFile preset(const std::string& name, const PresetOptions& options = {});

/// (1.292 kg/m^3 * 0.5 m^2) / 2
inline constexpr double kComputedKa = 1.292 * 0.5 / 2.0;

// ---------------------------------------------------------------------------
// Trace CSV

inline constexpr const char* kTraceHeader =
    "t,vr1,vr2,vr3,v1,v2,v3,alpha_deg,w1,w2,w3,T_over_mg,Fbar_over_mg,"
    "theta_tilde_deg,V1";

void write_trace_csv(std::ostream& out, std::span<const sim::TraceRow> trace);

/// Reads the CSV columns back; monitor-only fields stay default.
/// Throws ConfigError with the line number on malformed input.
std::vector<sim::TraceRow> read_trace_csv(std::istream& in);

/// Plain-text report ending in a `key=value` block with termination=,
/// t_abort=, min_Fbar_over_mg=.
std::string summary_report(const sim::RunResult& result);

// ---------------------------------------------------------------------------
// Commands. Each returns the process exit code: 0 success, 1 usage / config
// / IO error, 2 controlled abort.

struct RunCommand {
  std::string scenario_path;
  std::optional<std::string> controller;  ///< "fp" or "fa"
  std::optional<double> dt;
  std::optional<int> decimation;
  std::string out;  ///< trace CSV path; summary goes to <out>.summary.txt
};

int cmd_run(const RunCommand& cmd, std::ostream& out, std::ostream& err);

struct FitCommand {
  std::string table_path;
  std::string weighting = "uniform";  ///< "uniform" or "relative"
  std::string out;  ///< report path, empty = stdout
};

int cmd_fit(const FitCommand& cmd, std::ostream& out, std::ostream& err);

struct PresetCommand {
  std::string name;
  PresetOptions options;
  std::string out;  ///< empty = stdout
};

int cmd_preset(const PresetCommand& cmd, std::ostream& out, std::ostream& err);

/// Scenario schema documentation printed by --help.
std::string schema_help();

}  // namespace thrustdir::cli
