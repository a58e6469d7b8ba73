#pragma once

// Trace CSV (`t_ms,ax,ay,az` with a `# unit=counts|ms2` comment) and
// calibration CSV (`axis,offset,gain`).

#include <string>
#include <string_view>

#include "mbs/error.hpp"
#include "mbs/signal_core.hpp"
#include "mbs/text.hpp"

namespace mbs {

inline Trace parse_trace(std::string_view contents) {
  Trace trace;
  bool saw_unit = false;
  bool saw_header = false;
  std::size_t line_no = 0;
  for (const auto& raw : text::lines(contents)) {
    ++line_no;
    const auto line = text::trim(raw);
    if (line.empty()) continue;
    if (line.front() == '#') {
      const auto body = text::trim(line.substr(1));
      if (body.starts_with("unit=")) {
        const auto unit = text::trim(body.substr(5));
        if (unit == "counts") {
          trace.calibrated = false;
        } else if (unit == "ms2") {
          trace.calibrated = true;
        } else {
          throw Error(Errc::parse_error, "unknown unit '" + std::string(unit) + "'");
        }
        saw_unit = true;
      } else if (body.starts_with("sample_rate_hz=")) {
        trace.sample_rate_hz = text::parse_double(body.substr(15));
      }
      continue;
    }
    if (!saw_header) {
      if (line != "t_ms,ax,ay,az") throw Error(Errc::parse_error, "expected header 't_ms,ax,ay,az'");
      saw_header = true;
      continue;
    }
    const auto cells = text::split(line, ',');
    if (cells.size() != 4) {
      throw Error(Errc::parse_error, "line " + std::to_string(line_no) + ": expected 4 columns");
    }
    trace.samples.push_back({text::parse_double(cells[0]), text::parse_double(cells[1]),
                             text::parse_double(cells[2]), text::parse_double(cells[3])});
  }
  if (!saw_unit) throw Error(Errc::parse_error, "missing '# unit=counts' or '# unit=ms2' line");
  if (!saw_header) throw Error(Errc::parse_error, "missing header");
  validate(trace);
  return trace;
}

inline std::string format_trace(const Trace& trace) {
  std::string out;
  out += trace.calibrated ? "# unit=ms2\n" : "# unit=counts\n";
  out += "# sample_rate_hz=" + text::format_double(trace.sample_rate_hz) + "\n";
  out += "t_ms,ax,ay,az\n";
  for (const auto& s : trace.samples) {
    out += text::format_double(s.t_ms) + ',' + text::format_double(s.ax) + ',' + text::format_double(s.ay) + ',' +
           text::format_double(s.az) + '\n';
  }
  return out;
}

inline Trace read_trace(const std::string& path) { return parse_trace(text::read_file(path)); }

inline void write_trace(const std::string& path, const Trace& trace) { text::write_file(path, format_trace(trace)); }

inline Calibration parse_calibration(std::string_view contents) {
  Calibration cal;
  bool seen[3] = {false, false, false};
  bool saw_header = false;
  for (const auto& raw : text::lines(contents)) {
    const auto line = text::trim(raw);
    if (line.empty() || line.front() == '#') continue;
    if (!saw_header) {
      if (line != "axis,offset,gain") throw Error(Errc::parse_error, "expected header 'axis,offset,gain'");
      saw_header = true;
      continue;
    }
    const auto cells = text::split(line, ',');
    if (cells.size() != 3) throw Error(Errc::parse_error, "calibration rows need 3 columns");
    int axis = -1;
    if (cells[0] == "x") axis = 0;
    if (cells[0] == "y") axis = 1;
    if (cells[0] == "z") axis = 2;
    if (axis < 0) throw Error(Errc::parse_error, "unknown axis '" + cells[0] + "'");
    cal.axes[axis] = {text::parse_double(cells[1]), text::parse_double(cells[2])};
    seen[axis] = true;
  }
  if (!seen[0] || !seen[1] || !seen[2]) throw Error(Errc::parse_error, "calibration needs x, y and z rows");
  return cal;
}

inline std::string format_calibration(const Calibration& cal) {
  static constexpr const char* names[3] = {"x", "y", "z"};
  std::string out = "axis,offset,gain\n";
  for (int i = 0; i < 3; ++i) {
    out += std::string(names[i]) + ',' + text::format_double(cal.axes[i].offset) + ',' +
           text::format_double(cal.axes[i].gain) + '\n';
  }
  return out;
}

}  // namespace mbs
