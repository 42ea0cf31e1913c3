#pragma once

// Script annotated with timing, one line per executed instruction:
//
//   [t=0.000 +2.000] nille: wait(2) → (0.000, 0.000, 0.0)
//   ...
//   total: 12.345 s

#include <map>
#include <string>
#include <vector>

#include "ccr/format.hpp"
#include "ccr/scheduler.hpp"
#include "ccr/script.hpp"

namespace ccr {

struct ReportLine {
  std::size_t source_index = 0;
  std::size_t robot = 0;
  std::string text;
  double start = 0.0;
  double duration = 0.0;
  Pose end_pose;
};

namespace detail {

inline std::string pose_text(const Pose& p) {
  return "(" + fixed(p.x, 3) + ", " + fixed(p.y, 3) + ", " + fixed(p.heading, 1) + ")";
}

}  // namespace detail

/// Lines in source order, then robot index. Settings take no time and are
/// left out; a synchronize gets one line per participant showing its hold.
inline std::vector<ReportLine> report_lines(const InstructionStream& stream, const Timeline& tl) {
  std::map<std::pair<std::size_t, std::size_t>, const TimedAction*> actions;  // (source, robot)
  for (const auto& track : tl.tracks) {
    for (const auto& a : track.actions) {
      if (a.kind != ActionKind::hold) actions[{a.source_index, a.robot}] = &a;
    }
  }
  std::map<std::size_t, const BarrierRecord*> barriers;
  for (const auto& b : tl.barriers) barriers[b.source_index] = &b;

  std::vector<ReportLine> lines;
  for (std::size_t i = 0; i < stream.instructions.size(); ++i) {
    const Instruction& ins = stream.instructions[i];
    if (const auto* init = std::get_if<InitialPose>(&ins.op)) {
      lines.push_back({i, init->robot, ins.text, 0.0, 0.0, init->pose});
    } else if (std::holds_alternative<Synchronize>(ins.op)) {
      auto it = barriers.find(i);
      if (it == barriers.end()) continue;
      const BarrierRecord& b = *it->second;
      for (std::size_t k = 0; k < b.robots.size(); ++k) {
        std::size_t r = b.robots[k];
        lines.push_back({i, r, ins.text, b.arrivals[k], b.release - b.arrivals[k], robot_pose_at(tl, r, b.release).pose});
      }
    } else if (!std::holds_alternative<Setting>(ins.op)) {
      std::size_t r = *bound_robot(ins);
      auto it = actions.find({i, r});
      if (it == actions.end()) continue;
      const TimedAction& a = *it->second;
      lines.push_back({i, r, ins.text, a.start, a.end - a.start, a.end_pose});
    }
  }
  return lines;
}

inline std::string write_report(const InstructionStream& stream, const Timeline& tl) {
  std::string out;
  for (const auto& line : report_lines(stream, tl)) {
    out += "[t=" + fixed(line.start, 3) + " +" + fixed(line.duration, 3) + "] " + tl.robots[line.robot].name + ": " +
           line.text + " → " + detail::pose_text(line.end_pose) + "\n";
  }
  out += "total: " + fixed(tl.duration, 3) + " s\n";
  return out;
}

}  // namespace ccr
