#include <cerrno>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <istream>
#include <ostream>

#include "thrustdir/aero.hpp"
#include "thrustdir/errors.hpp"
#include "thrustdir/text.hpp"

namespace thrustdir::aero {

std::vector<CoeffRow> read_coeff_csv(std::istream& in) {
  std::vector<CoeffRow> rows;
  std::string line;
  int line_no = 0;
  bool header_seen = false;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string t = text::trim(line);
    if (t.empty() || t.front() == '#') continue;
    const auto fields = text::split(t, ',');
    auto where = [&] { return "coefficient table line " + std::to_string(line_no) + ": "; };
    if (!header_seen) {
      if (fields.size() != 3 || fields[0] != "alpha_deg" || fields[1] != "cl" ||
          fields[2] != "cd") {
        throw ConfigError(where() + "expected header 'alpha_deg,cl,cd'");
      }
      header_seen = true;
      continue;
    }
    if (fields.size() != 3) {
      throw ConfigError(where() + "expected 3 fields, got " +
                        std::to_string(fields.size()));
    }
    CoeffRow row;
    try {
      row.alpha_deg = text::parse_double(fields[0]);
      row.cl = text::parse_double(fields[1]);
      row.cd = text::parse_double(fields[2]);
    } catch (const ConfigError& e) {
      throw ConfigError(where() + e.what());
    }
    if (!rows.empty() && !(row.alpha_deg > rows.back().alpha_deg)) {
      throw ConfigError(where() + "alpha_deg not strictly ascending");
    }
    rows.push_back(row);
  }
  if (!header_seen) {
    throw ConfigError("coefficient table: missing header 'alpha_deg,cl,cd'");
  }
  if (rows.size() < 2) {
    throw ConfigError("coefficient table: need at least 2 data rows");
  }
  return rows;
}

std::vector<CoeffRow> read_coeff_csv_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw ConfigError("cannot open coefficient table '" + path + "'");
  }
  return read_coeff_csv(in);
}

void write_coeff_csv(std::ostream& out, std::span<const CoeffRow> rows) {
  out << "alpha_deg,cl,cd\n";
  char buf[128];
  for (const auto& r : rows) {
    std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g\n", r.alpha_deg, r.cl, r.cd);
    out << buf;
  }
}

TableCoeffModel table_from_rows(std::span<const CoeffRow> rows,
                                Symmetry symmetry) {
  std::vector<double> a, cl, cd;
  for (const auto& r : rows) {
    a.push_back(r.alpha_deg);
    cl.push_back(r.cl);
    cd.push_back(r.cd);
  }
  return TableCoeffModel(std::move(a), std::move(cl), std::move(cd), symmetry);
}

std::vector<CoeffSample> samples_from_rows(std::span<const CoeffRow> rows) {
  std::vector<CoeffSample> out;
  out.reserve(rows.size());
  for (const auto& r : rows) {
    out.push_back({geom::deg2rad(r.alpha_deg), r.cl, r.cd});
  }
  return out;
}

}  // namespace thrustdir::aero
