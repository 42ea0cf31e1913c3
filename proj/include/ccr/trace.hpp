#pragma once

// Newline-delimited JSON pose trace.
//
//   {"t":0.5,"robot":"nille","x":0,"y":0.0625,"heading":0,"v":0.25}

#include <algorithm>
#include <cstdio>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

#include "ccr/format.hpp"
#include "ccr/scheduler.hpp"

namespace ccr {

struct TraceFrame {
  double t = 0.0;
  std::string robot;
  double x = 0.0;
  double y = 0.0;
  double heading = 0.0;
  double v = 0.0;
};

/// Frames for every placed robot at each sample time, ordered by (t, robot name).
inline std::vector<TraceFrame> trace_frames(const Timeline& tl, double dt) {
  std::vector<std::size_t> order;
  for (std::size_t r = 0; r < tl.tracks.size(); ++r) {
    if (tl.tracks[r].placed) order.push_back(r);
  }
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return tl.robots[a].name < tl.robots[b].name; });

  std::vector<TraceFrame> frames;
  for (double t : sample_times(tl, dt)) {
    for (std::size_t r : order) {
      RobotState s = robot_pose_at(tl, r, t);
      frames.push_back({t, tl.robots[r].name, s.pose.x, s.pose.y, s.pose.heading, s.speed});
    }
  }
  return frames;
}

namespace detail {

inline std::string json_string(const std::string& s) {
  std::string out = "\"";
  for (char c : s) {
    if (c == '"' || c == '\\') {
      out += '\\';
      out += c;
    } else if (static_cast<unsigned char>(c) < 0x20) {
      char buf[8];
      std::snprintf(buf, sizeof buf, "\\u%04x", c);
      out += buf;
    } else {
      out += c;
    }
  }
  return out + "\"";
}

}  // namespace detail

inline std::string format_frame(const TraceFrame& f) {
  return "{\"t\":" + compact(f.t, 9) + ",\"robot\":" + detail::json_string(f.robot) + ",\"x\":" + compact(f.x, 9) +
         ",\"y\":" + compact(f.y, 9) + ",\"heading\":" + compact(f.heading, 9) + ",\"v\":" + compact(f.v, 9) + "}";
}

/// Writes the trace and returns the number of frames.
inline std::size_t write_trace(const Timeline& tl, double dt, std::ostream& sink) {
  auto frames = trace_frames(tl, dt);
  for (const auto& f : frames) sink << format_frame(f) << '\n';
  if (!sink) throw std::runtime_error("failed to write trace");
  return frames.size();
}

}  // namespace ccr
