#include <cmath>
#include <cstdio>
#include <istream>
#include <ostream>
#include <sstream>

#include "thrustdir/cli.hpp"
#include "thrustdir/errors.hpp"
#include "thrustdir/text.hpp"

namespace thrustdir::cli {

namespace {

constexpr std::size_t kTraceColumns = 15;

}  // namespace

void write_trace_csv(std::ostream& out, std::span<const sim::TraceRow> trace) {
  out << kTraceHeader << '\n';
  char buf[64];
  auto put = [&](double v, char sep) {
    std::snprintf(buf, sizeof buf, "%.17g", v);
    out << buf << sep;
  };
  for (const sim::TraceRow& r : trace) {
    put(r.t, ',');
    for (int i = 0; i < 3; ++i) put(r.vr(i), ',');
    for (int i = 0; i < 3; ++i) put(r.v(i), ',');
    put(r.alpha_deg, ',');
    for (int i = 0; i < 3; ++i) put(r.omega(i), ',');
    put(r.T_over_mg, ',');
    put(r.Fbar_over_mg, ',');
    put(r.theta_tilde_deg, ',');
    put(r.V1, '\n');
  }
}

std::vector<sim::TraceRow> read_trace_csv(std::istream& in) {
  std::vector<sim::TraceRow> rows;
  std::string line;
  int line_no = 0;
  if (!std::getline(in, line) || text::trim(line) != kTraceHeader) {
    throw ConfigError("trace line 1: expected header '" + std::string(kTraceHeader) + "'");
  }
  ++line_no;
  while (std::getline(in, line)) {
    ++line_no;
    if (text::trim(line).empty()) continue;
    const auto f = text::split(line, ',');
    auto where = [&] { return "trace line " + std::to_string(line_no) + ": "; };
    if (f.size() != kTraceColumns) {
      throw ConfigError(where() + "expected " + std::to_string(kTraceColumns) +
                        " columns, got " + std::to_string(f.size()));
    }
    std::vector<double> x;
    try {
      for (const auto& s : f) x.push_back(text::parse_double(s));
    } catch (const ConfigError& e) {
      throw ConfigError(where() + e.what());
    }
    sim::TraceRow r;
    r.t = x[0];
    r.vr = Vec3(x[1], x[2], x[3]);
    r.v = Vec3(x[4], x[5], x[6]);
    r.alpha_deg = x[7];
    r.omega = Vec3(x[8], x[9], x[10]);
    r.T_over_mg = x[11];
    r.Fbar_over_mg = x[12];
    r.theta_tilde_deg = x[13];
    r.V1 = x[14];
    if (!rows.empty() && !(r.t > rows.back().t)) {
      throw ConfigError(where() + "t not strictly increasing");
    }
    rows.push_back(r);
  }
  return rows;
}

std::string summary_report(const sim::RunResult& result) {
  std::ostringstream o;
  const sim::Termination& term = result.termination;
  const sim::MonitorSummary& mon = result.monitors;
  const sim::LyapunovReport& lyap = mon.lyapunov;
  auto num = [](double v) { return text::format_exact(v); };

  o << "# run summary\n";
  if (!term.message.empty()) o << "# " << term.message << "\n";
  for (const sim::SegmentStats& s : mon.segments) {
    o << "# segment " << s.index << " [" << s.t_start << ", " << s.t_end << ") "
      << (s.kind == sim::ReferenceSegment::Kind::constant ? "constant" : "sinusoid");
    if (s.truncated) o << " truncated";
    o << "\n";
  }

  o << "termination=" << sim::to_string(term.kind) << "\n";
  o << "t_abort="
    << (term.kind == sim::TerminationKind::completed ? std::string("none") : num(term.t))
    << "\n";
  o << "t_final=" << num(result.t_final) << "\n";
  o << "rows=" << result.trace.size() << "\n";
  o << "min_Fbar_over_mg=" << num(mon.min_fbar_over_mg) << "\n";
  o << "lyapunov_intervals_checked=" << lyap.intervals_checked << "\n";
  o << "lyapunov_decay_violations=" << lyap.decay_violations << "\n";
  o << "lyapunov_k1_min=" << num(lyap.k1_min) << "\n";
  o << "lyapunov_max_growth_ratio=" << num(lyap.max_growth_ratio) << "\n";
  o << "lyapunov_excluded_windows=" << lyap.excluded_windows.size() << "\n";
  o << "eps_rows_checked=" << lyap.eps_rows_checked << "\n";
  o << "eps_violations=" << lyap.eps_violations << "\n";
  o << "eps_max_ratio=" << num(lyap.max_eps_ratio) << "\n";
  for (const sim::SegmentStats& s : mon.segments) {
    const std::string key = "segment" + std::to_string(s.index) + "_";
    if (s.kind == sim::ReferenceSegment::Kind::constant) {
      o << key << "terminal_error_mach=" << num(s.terminal_error) << "\n";
      o << key << "monotone_decay=" << (s.monotone_decay ? 1 : 0) << "\n";
    } else {
      o << key << "ultimate_bound_mach=" << num(s.ultimate_bound) << "\n";
    }
    o << key << "truncated=" << (s.truncated ? 1 : 0) << "\n";
  }
  return o.str();
}

}  // namespace thrustdir::cli
