#include <algorithm>
#include <cmath>
#include <limits>

#include "thrustdir/sim.hpp"

namespace thrustdir::sim {

namespace {

constexpr double kV1Floor = 1e-12;

double error_mach(const TraceRow& row) { return (row.v - row.vr).norm(); }

}  // namespace

LyapunovReport lyapunov_monitor(std::span<const TraceRow> trace,
                                double force_scale, double tol, double eps_tol) {
  LyapunovReport rep;
  if (trace.empty()) return rep;

  rep.k1_min = std::numeric_limits<double>::infinity();
  for (const TraceRow& row : trace) rep.k1_min = std::min(rep.k1_min, row.k1);

  for (std::size_t i = 0; i + 1 < trace.size(); ++i) {
    const TraceRow& a = trace[i];
    const TraceRow& b = trace[i + 1];
    const bool excluded = a.omega_saturated || b.omega_saturated || !a.ref_smooth ||
                          !b.ref_smooth || !std::isfinite(a.V1) || !std::isfinite(b.V1);
    if (excluded) {
      if (!rep.excluded_windows.empty() && rep.excluded_windows.back().second == a.t) {
        rep.excluded_windows.back().second = b.t;
      } else {
        rep.excluded_windows.emplace_back(a.t, b.t);
      }
      continue;
    }
    ++rep.intervals_checked;
    const double bound = a.V1 * std::exp(-2.0 * rep.k1_min * (b.t - a.t));
    if (b.V1 > bound * (1.0 + tol) + kV1Floor) ++rep.decay_violations;
    if (bound > 0.0) rep.max_growth_ratio = std::max(rep.max_growth_ratio, b.V1 / bound);
  }

  for (const TraceRow& row : trace) {
    if (!std::isfinite(row.V1)) continue;
    ++rep.eps_rows_checked;
    const double m_eps = row.Fbar_over_mg * force_scale *
                         std::sin(geom::deg2rad(row.theta_tilde_deg));
    const double limit = std::sqrt(8.0 * row.V1);
    if (m_eps > limit * (1.0 + eps_tol)) ++rep.eps_violations;
    if (limit > 0.0) rep.max_eps_ratio = std::max(rep.max_eps_ratio, m_eps / limit);
  }
  return rep;
}

std::vector<SegmentStats> segment_error_summary(std::span<const TraceRow> trace,
                                                const ReferenceProfile& profile) {
  std::vector<SegmentStats> out;
  double spacing = 0.0;
  for (std::size_t i = 0; i + 1 < trace.size(); ++i) {
    spacing = std::max(spacing, trace[i + 1].t - trace[i].t);
  }
  const double t_last = trace.empty() ? -1.0 : trace.back().t;

  const auto& segs = profile.segments();
  for (std::size_t s = 0; s < segs.size(); ++s) {
    const ReferenceSegment& seg = segs[s];
    SegmentStats st;
    st.index = s;
    st.kind = seg.kind;
    st.t_start = seg.t_start;
    st.t_end = seg.t_end;
    st.truncated = t_last < seg.t_end - 1.5 * spacing - 1e-12;

    std::vector<const TraceRow*> rows;
    for (const TraceRow& row : trace) {
      if (row.t >= seg.t_start && row.t < seg.t_end) rows.push_back(&row);
    }
    if (rows.empty()) {
      st.truncated = true;
      out.push_back(st);
      continue;
    }

    if (seg.kind == ReferenceSegment::Kind::constant) {
      const double from = std::max(seg.t_start, std::min(seg.t_end, t_last + spacing) - 1.0);
      double sum = 0.0;
      std::size_t count = 0;
      for (const TraceRow* r : rows) {
        if (r->t >= from) {
          sum += error_mach(*r);
          ++count;
        }
      }
      st.terminal_error = count > 0 ? sum / static_cast<double>(count) : 0.0;

      const auto n_bins = static_cast<std::size_t>(std::ceil(seg.t_end - seg.t_start));
      std::vector<double> bin_sum(n_bins, 0.0);
      std::vector<std::size_t> bin_count(n_bins, 0);
      for (const TraceRow* r : rows) {
        const auto b = std::min(n_bins - 1, static_cast<std::size_t>(r->t - seg.t_start));
        bin_sum[b] += error_mach(*r);
        ++bin_count[b];
      }
      std::vector<double> means;
      for (std::size_t b = 0; b < n_bins; ++b) {
        if (bin_count[b] > 0) means.push_back(bin_sum[b] / static_cast<double>(bin_count[b]));
      }
      const auto peak = std::max_element(means.begin(), means.end());
      st.monotone_decay = true;
      for (auto it = peak; it != means.end() && std::next(it) != means.end(); ++it) {
        if (*std::next(it) > *it + 1e-6) st.monotone_decay = false;
      }
    } else {
      const double from = 0.5 * (seg.t_start + seg.t_end);
      for (const TraceRow* r : rows) {
        if (r->t >= from) st.ultimate_bound = std::max(st.ultimate_bound, error_mach(*r));
      }
    }
    out.push_back(st);
  }
  return out;
}

}  // namespace thrustdir::sim
