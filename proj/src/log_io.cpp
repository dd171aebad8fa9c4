#include "crawl/log_io.hpp"

#include <cstdio>
#include <cstdlib>
#include <iomanip>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace crawl {

namespace {

const char* const kLegNames[4] = {"lf", "rf", "lh", "rh"};
const char* const kAxisNames[3] = {"x", "y", "z"};

/// Columns that hold text, not plottable numbers.
bool textual_column(const std::string& name) {
  return name == "phase" || name == "leg" || name == "events";
}

std::string fmt9(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.9g", v);
  return buf;
}

std::vector<std::string> column_names() {
  std::vector<std::string> cols = {"t", "phase", "leg"};
  for (const char* axis : kAxisNames) cols.push_back(std::string("com_") + axis);
  for (const char* axis : kAxisNames) cols.push_back(std::string("comv_") + axis);
  cols.insert(cols.end(), {"roll", "pitch", "yaw"});
  for (const char* leg : kLegNames) {
    for (const char* axis : kAxisNames) {
      cols.push_back(std::string("foot_") + leg + "_" + axis);
    }
  }
  for (const char* leg : kLegNames) cols.push_back(std::string("contact_") + leg);
  for (const char* leg : kLegNames) {
    for (const char* axis : kAxisNames) {
      cols.push_back(std::string("grfd_") + leg + "_" + axis);
    }
  }
  for (const char* leg : kLegNames) {
    for (const char* axis : kAxisNames) {
      cols.push_back(std::string("grfr_") + leg + "_" + axis);
    }
  }
  cols.insert(cols.end(), {"n_x", "n_y", "n_z", "terrain_roll", "terrain_pitch",
                           "fit_error"});
  for (const char* axis : kAxisNames) cols.push_back(std::string("fhat_") + axis);
  for (const char* axis : kAxisNames) cols.push_back(std::string("tauhat_") + axis);
  cols.insert(cols.end(), {"dxcom_x", "dxcom_y", "divergence_flag"});
  cols.insert(cols.end(), {"winj_fx", "winj_fy", "winj_fz", "winj_tx", "winj_ty",
                           "winj_tz"});
  cols.insert(cols.end(), {"zmp_x", "zmp_y", "margin", "margin_com", "grf_error",
                           "events"});
  return cols;
}

void append_row(std::string& out, const TickRecord& rec) {
  out += fmt9(rec.t);
  out += ',';
  out += phase_name(rec.phase);
  out += ',';
  out += leg_name(rec.leg);
  for (int a = 0; a < 3; ++a) out += ',' + fmt9(rec.com(a));
  for (int a = 0; a < 3; ++a) out += ',' + fmt9(rec.com_velocity(a));
  for (int a = 0; a < 3; ++a) out += ',' + fmt9(rec.rpy(a));
  for (int i = 0; i < 4; ++i) {
    for (int a = 0; a < 3; ++a) out += ',' + fmt9(rec.feet[i](a));
  }
  for (int i = 0; i < 4; ++i) out += rec.contact[i] ? ",1" : ",0";
  for (int i = 0; i < 4; ++i) {
    for (int a = 0; a < 3; ++a) out += ',' + fmt9(rec.grf_desired[i](a));
  }
  for (int i = 0; i < 4; ++i) {
    for (int a = 0; a < 3; ++a) out += ',' + fmt9(rec.grf_realized[i](a));
  }
  for (int a = 0; a < 3; ++a) out += ',' + fmt9(rec.terrain_normal(a));
  out += ',' + fmt9(rec.terrain_roll);
  out += ',' + fmt9(rec.terrain_pitch);
  out += ',' + fmt9(rec.terrain_fit_error);
  for (int a = 0; a < 3; ++a) out += ',' + fmt9(rec.force_estimate(a));
  for (int a = 0; a < 3; ++a) out += ',' + fmt9(rec.torque_estimate(a));
  out += ',' + fmt9(rec.com_shift.x());
  out += ',' + fmt9(rec.com_shift.y());
  out += rec.divergence ? ",1" : ",0";
  for (int a = 0; a < 6; ++a) out += ',' + fmt9(rec.injected(a));
  out += ',' + fmt9(rec.zmp.x());
  out += ',' + fmt9(rec.zmp.y());
  out += ',' + fmt9(rec.margin);
  out += ',' + fmt9(rec.margin_com);
  out += ',' + fmt9(rec.grf_error);
  out += ',';
  out += rec.events;
  out += '\n';
}

std::string json_escape(const std::string& s) {
  std::string out;
  for (char ch : s) {
    if (ch == '"' || ch == '\\') out += '\\';
    out += ch;
  }
  return out;
}

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> fields;
  size_t start = 0;
  while (true) {
    const size_t pos = line.find(',', start);
    if (pos == std::string::npos) {
      fields.push_back(line.substr(start));
      break;
    }
    fields.push_back(line.substr(start, pos - start));
    start = pos + 1;
  }
  return fields;
}

}  // namespace

void write_log_csv(const SimLog& log, std::ostream& out) {
  out << log_csv_string(log);
}

std::string log_csv_string(const SimLog& log) {
  std::string out = std::string("# ") + kLogSchema + "\n";
  const std::vector<std::string> cols = column_names();
  for (size_t i = 0; i < cols.size(); ++i) {
    if (i) out += ',';
    out += cols[i];
  }
  out += '\n';
  out.reserve(out.size() + log.ticks.size() * 700);
  for (const TickRecord& rec : log.ticks) append_row(out, rec);
  return out;
}

std::string summary_json(const SimLog& log) {
  const RunSummary& s = log.summary;
  std::ostringstream out;
  out << "{\n";
  out << "  \"schema\": \"" << json_escape(s.schema) << "\",\n";
  out << "  \"duration\": " << fmt9(s.duration) << ",\n";
  out << "  \"ticks\": " << s.ticks << ",\n";
  out << "  \"distance_xy\": " << fmt9(s.distance_xy) << ",\n";
  out << "  \"min_margin\": " << fmt9(s.min_margin) << ",\n";
  out << "  \"margin_violations\": " << s.margin_violations << ",\n";
  out << "  \"grf_rms\": [" << fmt9(s.grf_rms.x()) << ", " << fmt9(s.grf_rms.y())
      << ", " << fmt9(s.grf_rms.z()) << "],\n";
  out << "  \"grf_error_rms\": " << fmt9(s.grf_error_rms) << ",\n";
  out << "  \"touchdowns\": " << s.touchdowns << ",\n";
  out << "  \"touchdowns_search\": " << s.touchdowns_search << ",\n";
  out << "  \"step_reflexes\": " << s.step_reflexes << ",\n";
  out << "  \"missed_reflexes\": " << s.missed_reflexes << ",\n";
  out << "  \"height_reflexes\": " << s.height_reflexes << ",\n";
  out << "  \"stumbles\": " << s.stumbles << ",\n";
  out << "  \"kinematic_errors\": " << s.kinematic_errors << ",\n";
  out << "  \"resequences\": " << s.resequences << ",\n";
  out << "  \"divergence\": " << (s.divergence ? "true" : "false") << ",\n";
  out << "  \"halted\": " << (s.halted ? "true" : "false") << ",\n";
  out << "  \"halt_reason\": \"" << json_escape(s.halt_reason) << "\",\n";
  out << "  \"final_com\": [" << fmt9(s.final_com.x()) << ", "
      << fmt9(s.final_com.y()) << ", " << fmt9(s.final_com.z()) << "],\n";
  out << "  \"bookkeeping_residual\": " << fmt9(s.bookkeeping_residual) << ",\n";
  out << "  \"foot_ref_drift\": " << fmt9(s.foot_ref_drift) << "\n";
  out << "}\n";
  return out.str();
}

std::string plot_channels(std::istream& csv,
                          const std::vector<std::string>& channels) {
  if (channels.empty()) throw std::invalid_argument("no channels requested");
  std::string line;
  if (!std::getline(csv, line) ||
      line.rfind(std::string("# ") + kLogSchema, 0) != 0) {
    throw std::invalid_argument(std::string("input is not a ") + kLogSchema +
                                " file");
  }
  if (!std::getline(csv, line)) {
    throw std::invalid_argument("log has no column header");
  }
  const std::vector<std::string> cols = split_csv(line);

  std::vector<size_t> picks;
  for (const std::string& want : channels) {
    size_t found = cols.size();
    for (size_t i = 0; i < cols.size(); ++i) {
      if (cols[i] == want) {
        found = i;
        break;
      }
    }
    if (found == cols.size() || textual_column(want)) {
      std::string msg = (found == cols.size() ? "unknown channel: "
                                              : "non-numeric channel: ") +
                        want + "; available:";
      for (const std::string& c : cols) {
        if (!textual_column(c)) msg += " " + c;
      }
      throw std::invalid_argument(msg);
    }
    picks.push_back(found);
  }

  constexpr int kWidth = 15;
  std::ostringstream out;
  out << "#";
  for (size_t i = 0; i < channels.size(); ++i) {
    out << ' ' << std::setw(i == 0 ? kWidth - 2 : kWidth) << channels[i];
  }
  out << '\n';
  size_t row = 2;
  while (std::getline(csv, line)) {
    ++row;
    if (line.empty()) continue;
    const std::vector<std::string> fields = split_csv(line);
    if (fields.size() != cols.size()) {
      throw std::invalid_argument("malformed log row at line " +
                                  std::to_string(row));
    }
    for (size_t i = 0; i < picks.size(); ++i) {
      const std::string& cell = fields[picks[i]];
      char* end = nullptr;
      std::strtod(cell.c_str(), &end);
      if (end == cell.c_str() || *end != '\0') {
        throw std::invalid_argument("non-numeric data in channel " + channels[i] +
                                    " at line " + std::to_string(row));
      }
      out << (i == 0 ? "" : " ") << std::setw(kWidth) << cell;
    }
    out << '\n';
  }
  return out.str();
}

}  // namespace crawl
