#pragma once

// Per-robot timelines: ideal pose chaining, path planning, speed profiles,
// absolute start times and barrier synchronization.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "ccr/config.hpp"
#include "ccr/error.hpp"
#include "ccr/geometry.hpp"
#include "ccr/motion.hpp"
#include "ccr/script.hpp"

namespace ccr {

// ---------------------------------------------------------------------------
// Queues

struct QueueItem {
  std::size_t source_index = 0;  // into InstructionStream::instructions
  Operation op;
  SourceLoc loc;
  std::optional<std::size_t> barrier;  // set for synchronize markers
  // Ideal poses, filled by chain_ideal_poses for movements.
  Pose start;
  Pose goal;
};

struct RobotQueue {
  std::optional<Pose> initial_pose;
  std::size_t initial_source = 0;
  std::vector<QueueItem> items;
};

struct BarrierSpec {
  std::size_t source_index = 0;
  std::vector<std::size_t> robots;
};

struct RobotQueues {
  std::vector<RobotInfo> robots;
  std::vector<RobotQueue> queues;  // by robot index
  std::vector<BarrierSpec> barriers;  // source order
};

inline bool is_movement(const Operation& op) {
  return std::holds_alternative<MoveTo>(op) || std::holds_alternative<MoveStraight>(op) || std::holds_alternative<MoveArc>(op);
}

inline const std::string& control_of(const Operation& op) {
  static const std::string none;
  if (const auto* m = std::get_if<MoveTo>(&op)) return m->control;
  if (const auto* m = std::get_if<MoveStraight>(&op)) return m->control;
  if (const auto* m = std::get_if<MoveArc>(&op)) return m->control;
  return none;
}

/// Distributes the stream over per-robot queues in source order.
///
/// Each synchronize becomes one shared barrier placed in the queue of every
/// participant; global settings go to every robot's queue.
inline RobotQueues split_streams(const InstructionStream& stream) {
  RobotQueues q;
  q.robots = stream.robots;
  q.queues.resize(stream.robots.size());
  for (std::size_t i = 0; i < stream.instructions.size(); ++i) {
    const Instruction& ins = stream.instructions[i];
    QueueItem item{i, ins.op, ins.loc, std::nullopt, {}, {}};
    if (const auto* sync = std::get_if<Synchronize>(&ins.op)) {
      item.barrier = q.barriers.size();
      q.barriers.push_back({i, sync->robots});
      for (std::size_t r : sync->robots) {
        if (r >= q.queues.size()) throw ScriptError("synchronize names an undeclared robot", ins.loc);
        q.queues[r].items.push_back(item);
      }
    } else if (const auto* init = std::get_if<InitialPose>(&ins.op)) {
      q.queues[init->robot].initial_pose = init->pose;
      q.queues[init->robot].initial_source = i;
    } else if (const auto* setting = std::get_if<Setting>(&ins.op); setting && !setting->robot) {
      for (auto& queue : q.queues) queue.items.push_back(item);
    } else {
      std::size_t r = *bound_robot(ins);
      if (r >= q.queues.size()) throw ScriptError("instruction names an undeclared robot", ins.loc);
      q.queues[r].items.push_back(item);
    }
  }
  return q;
}

/// Start and goal of every movement assuming every earlier one was exact.
inline void chain_ideal_poses(RobotQueue& queue) {
  if (!queue.initial_pose) {
    for (const auto& item : queue.items) {
      if (is_movement(item.op) || std::holds_alternative<Wait>(item.op)) {
        throw ScriptError("movement before initialPose", item.loc);
      }
    }
    return;
  }
  Pose cursor = *queue.initial_pose;
  for (auto& item : queue.items) {
    item.start = cursor;
    if (const auto* m = std::get_if<MoveTo>(&item.op)) {
      item.goal = m->goal;
    } else if (const auto* m = std::get_if<MoveStraight>(&item.op)) {
      item.goal = line_endpoint(cursor, m->distance, m->travel);
    } else if (const auto* m = std::get_if<MoveArc>(&item.op)) {
      item.goal = arc_endpoint(cursor, m->radius, m->angle, m->side, m->travel);
    } else {
      item.goal = cursor;
    }
    cursor = item.goal;
  }
}

inline void chain_ideal_poses(RobotQueues& queues) {
  for (auto& q : queues.queues) chain_ideal_poses(q);
}

// ---------------------------------------------------------------------------
// Timeline

enum class ActionKind { path, wait, hold };

inline const char* to_string(ActionKind k) {
  switch (k) {
    case ActionKind::path: return "path";
    case ActionKind::wait: return "wait";
    case ActionKind::hold: return "hold";
  }
  return "?";
}

struct TimedAction {
  std::size_t robot = 0;
  std::size_t source_index = 0;
  ActionKind kind = ActionKind::path;
  std::vector<PathSegment> path;
  double length = 0.0;
  MotionProfile profile;
  double start = 0.0;
  double end = 0.0;
  Pose start_pose;
  Pose end_pose;
};

struct BarrierRecord {
  std::size_t source_index = 0;
  std::vector<std::size_t> robots;
  std::vector<double> arrivals;  // parallel to robots
  double release = 0.0;
};

struct RobotTrack {
  bool placed = false;
  Pose initial_pose;
  std::size_t initial_source = 0;
  std::vector<TimedAction> actions;

  double end_time() const { return actions.empty() ? 0.0 : actions.back().end; }
};

struct Note {
  SourceLoc loc;
  std::string message;
};

struct Timeline {
  std::vector<RobotInfo> robots;
  std::vector<RobotTrack> tracks;  // by robot index
  std::vector<BarrierRecord> barriers;
  std::vector<Note> notes;
  double duration = 0.0;
};

namespace detail {

struct CarryPlan {
  bool entry = false;
  bool exit = false;
};

// A carry is honored only between two consecutive movements of one robot
// whose control strings end and start with '='; settings in between do not
// count. A carry into a barrier is dropped with a note.
inline std::vector<CarryPlan> plan_carries(const std::vector<QueueItem>& items, const std::vector<RobotInfo>& robots,
                                           std::size_t robot, std::vector<Note>& notes) {
  std::vector<CarryPlan> plan(items.size());
  std::vector<ControlSpec> specs(items.size());
  for (std::size_t i = 0; i < items.size(); ++i) {
    if (is_movement(items[i].op)) specs[i] = parse_control_string(control_of(items[i].op));
  }
  for (std::size_t i = 0; i < items.size(); ++i) {
    if (!is_movement(items[i].op) || specs[i].exit != EdgeMarker::carry) continue;
    std::size_t j = i + 1;
    while (j < items.size() && std::holds_alternative<Setting>(items[j].op)) ++j;
    if (j >= items.size()) continue;
    if (items[j].barrier) {
      notes.push_back({items[i].loc, "robot '" + robots[robot].name +
                                         "' must stop at the following synchronize; its '=' exit is ignored"});
      continue;
    }
    if (is_movement(items[j].op) && specs[j].entry == EdgeMarker::carry) {
      plan[i].exit = true;
      plan[j].entry = true;
    }
  }
  return plan;
}

inline PlanningError at(const SourceLoc& loc, const std::string& what) { return PlanningError(what, loc); }

}  // namespace detail

/// Assigns absolute times to every robot's queue.
///
/// Robots run their queues back to back. At a barrier every participant
/// stops; all of them resume at the latest arrival, and each earlier arriver
/// gets a hold action covering its wait. Barriers are released in source order.
inline Timeline schedule(RobotQueues queues, const std::vector<RobotDefaults>& defaults) {
  const std::size_t n = queues.robots.size();
  if (defaults.size() != n) throw std::invalid_argument("one RobotDefaults entry per robot is required");
  chain_ideal_poses(queues);

  Timeline tl;
  tl.robots = queues.robots;
  tl.tracks.resize(n);
  std::vector<SpeedParams> speed;
  for (const auto& d : defaults) speed.push_back(d.speed);
  SpeedTable table(speed);

  std::vector<std::vector<detail::CarryPlan>> carries(n);
  for (std::size_t r = 0; r < n; ++r) {
    const RobotQueue& q = queues.queues[r];
    RobotTrack& track = tl.tracks[r];
    track.placed = q.initial_pose.has_value();
    if (track.placed) track.initial_pose = *q.initial_pose;
    track.initial_source = q.initial_source;
    carries[r] = detail::plan_carries(q.items, tl.robots, r, tl.notes);
  }

  std::vector<std::size_t> cursor(n, 0);
  std::vector<double> clock(n, 0.0);
  std::vector<double> exit_speed(n, 0.0);

  auto run_item = [&](std::size_t r, const QueueItem& item, const detail::CarryPlan& carry) {
    RobotTrack& track = tl.tracks[r];
    if (const auto* setting = std::get_if<Setting>(&item.op)) {
      Setting one = *setting;
      one.robot = r;
      try {
        apply_settings(one, table);
      } catch (const std::invalid_argument& e) {
        throw detail::at(item.loc, std::string(e.what()) + " for robot '" + tl.robots[r].name + "'");
      }
      return;
    }
    TimedAction act;
    act.robot = r;
    act.source_index = item.source_index;
    act.start = clock[r];
    act.start_pose = item.start;
    act.end_pose = item.start;
    if (const auto* w = std::get_if<Wait>(&item.op)) {
      act.kind = ActionKind::wait;
      act.end = act.start + w->seconds;
      exit_speed[r] = 0.0;
    } else {
      act.kind = ActionKind::path;
      TurnConstraint turn(defaults[r].min_turn_radius);
      if (const auto* m = std::get_if<MoveTo>(&item.op)) {
        try {
          act.path = plan_path(item.start, item.goal, m->travel, turn);
        } catch (const PlanningError& e) {
          throw detail::at(item.loc, e.message());
        }
      } else if (const auto* m = std::get_if<MoveStraight>(&item.op)) {
        if (m->distance > 0.0) act.path.push_back(make_line(item.start, m->distance, m->travel));
      } else if (const auto* m = std::get_if<MoveArc>(&item.op)) {
        if (m->radius < turn.min_radius) {
          throw detail::at(item.loc, "arc radius " + compact(m->radius) + " m is below the minimum turning radius " +
                                         compact(turn.min_radius) + " m of robot '" + tl.robots[r].name + "'");
        }
        if (m->angle > 0.0) act.path.push_back(make_arc(item.start, m->radius, m->angle, m->side, m->travel));
      }
      act.length = path_length(act.path);
      // The next action starts from the ideal goal; the path end agrees to rounding.
      act.end_pose = item.goal;

      ControlSpec spec = parse_control_string(control_of(item.op));
      if (spec.entry == EdgeMarker::carry && !carry.entry) spec.entry = EdgeMarker::normal;
      if (spec.exit == EdgeMarker::carry && !carry.exit) spec.exit = EdgeMarker::normal;
      try {
        act.profile = apply_control(act.length, table.current[r], spec, exit_speed[r]);
      } catch (const PlanningError& e) {
        throw detail::at(item.loc, e.message());
      }
      act.end = act.start + act.profile.duration();
      exit_speed[r] = act.profile.exit_speed();
    }
    clock[r] = act.end;
    track.actions.push_back(std::move(act));
  };

  std::size_t next_barrier = 0;
  for (;;) {
    for (std::size_t r = 0; r < n; ++r) {
      const auto& items = queues.queues[r].items;
      while (cursor[r] < items.size() && !items[cursor[r]].barrier) {
        run_item(r, items[cursor[r]], carries[r][cursor[r]]);
        ++cursor[r];
      }
    }
    if (next_barrier >= queues.barriers.size()) break;

    const BarrierSpec& spec = queues.barriers[next_barrier];
    BarrierRecord rec;
    rec.source_index = spec.source_index;
    rec.robots = spec.robots;
    for (std::size_t r : spec.robots) {
      const auto& items = queues.queues[r].items;
      // Barriers appear in the same relative order in every queue, so the
      // earliest unreleased one is at the head of all its participants.
      if (cursor[r] >= items.size() || items[cursor[r]].barrier != next_barrier) {
        throw std::logic_error("barrier scheduling reached an inconsistent state");
      }
      rec.arrivals.push_back(clock[r]);
    }
    rec.release = rec.arrivals.empty() ? 0.0 : *std::max_element(rec.arrivals.begin(), rec.arrivals.end());
    for (std::size_t k = 0; k < spec.robots.size(); ++k) {
      std::size_t r = spec.robots[k];
      if (rec.release > clock[r]) {
        TimedAction hold;
        hold.robot = r;
        hold.source_index = spec.source_index;
        hold.kind = ActionKind::hold;
        hold.start = clock[r];
        hold.end = rec.release;
        hold.start_pose = hold.end_pose = tl.tracks[r].actions.empty() ? queues.queues[r].items[cursor[r]].start
                                                                       : tl.tracks[r].actions.back().end_pose;
        tl.tracks[r].actions.push_back(std::move(hold));
        clock[r] = rec.release;
      }
      exit_speed[r] = 0.0;
      ++cursor[r];
    }
    tl.barriers.push_back(std::move(rec));
    ++next_barrier;
  }

  for (const auto& track : tl.tracks) tl.duration = std::max(tl.duration, track.end_time());
  return tl;
}

/// Convenience: split, chain and schedule with per-robot defaults from `config`.
inline Timeline schedule(const InstructionStream& stream, const Config& config = {}) {
  std::vector<RobotDefaults> defaults;
  for (const auto& r : stream.robots) {
    try {
      defaults.push_back(config.for_robot(r.name));
    } catch (const std::invalid_argument& e) {
      throw PlanningError(std::string("configuration for robot '") + r.name + "': " + e.what());
    }
  }
  return schedule(split_streams(stream), defaults);
}

struct RobotState {
  Pose pose;
  double speed = 0.0;
};

/// Pose and speed of one robot at absolute time t.
inline RobotState robot_pose_at(const Timeline& tl, std::size_t robot, double t) {
  if (robot >= tl.tracks.size()) throw std::out_of_range("unknown robot index " + std::to_string(robot));
  const RobotTrack& track = tl.tracks[robot];
  if (!track.placed) throw std::out_of_range("robot '" + tl.robots[robot].name + "' has no initialPose");
  double slack = 1e-9 * std::max(1.0, tl.duration);
  if (!(t >= -slack && t <= tl.duration + slack)) {
    throw std::out_of_range("time " + std::to_string(t) + " outside [0, " + std::to_string(tl.duration) + "]");
  }
  const auto& acts = track.actions;
  auto it = std::upper_bound(acts.begin(), acts.end(), t, [](double v, const TimedAction& a) { return v < a.start; });
  if (it == acts.begin()) return {track.initial_pose, 0.0};
  const TimedAction& a = *std::prev(it);
  if (t >= a.end) return {a.end_pose, a.kind == ActionKind::path ? a.profile.exit_speed() : 0.0};
  if (a.kind != ActionKind::path || a.path.empty()) return {a.start_pose, 0.0};
  double local = t - a.start;
  double s = std::clamp(a.profile.distance_at(local), 0.0, a.length);
  return {sample_path(a.path, s), a.profile.speed_at(local)};
}

inline RobotState robot_pose_at(const Timeline& tl, std::string_view robot, double t) {
  for (std::size_t i = 0; i < tl.robots.size(); ++i) {
    if (tl.robots[i].name == robot) return robot_pose_at(tl, i, t);
  }
  throw std::out_of_range("unknown robot '" + std::string(robot) + "'");
}

/// Sampling instants: multiples of dt up to the duration, the duration itself
/// and every action boundary, sorted with near-duplicates (1e-9 s) merged.
inline std::vector<double> sample_times(const Timeline& tl, double dt) {
  if (!(dt > 0.0) || !std::isfinite(dt)) throw std::invalid_argument("sampling interval must be positive");
  std::vector<double> times;
  auto steps = static_cast<std::size_t>(std::floor(tl.duration / dt + 1e-9));
  for (std::size_t i = 0; i <= steps; ++i) times.push_back(std::min(static_cast<double>(i) * dt, tl.duration));
  times.push_back(tl.duration);
  for (const auto& track : tl.tracks) {
    for (const auto& a : track.actions) {
      times.push_back(a.start);
      times.push_back(a.end);
    }
  }
  std::sort(times.begin(), times.end());
  std::vector<double> merged;
  for (double t : times) {
    if (merged.empty() || t - merged.back() > 1e-9) merged.push_back(t);
  }
  return merged;
}

/// Exact text form of a timeline (hex floats); equal strings mean equal
/// timelines. Source indices are left out and barriers sorted so reordered
/// scripts compare equal.
inline std::string to_text(const Timeline& tl) {
  std::string o;
  auto num = [&](double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, " %a", v);
    o += buf;
  };
  auto pose = [&](const Pose& p) {
    num(p.x);
    num(p.y);
    num(p.heading);
  };
  for (std::size_t r = 0; r < tl.tracks.size(); ++r) {
    const RobotTrack& track = tl.tracks[r];
    o += "robot " + tl.robots[r].name + (track.placed ? " placed" : " unplaced");
    pose(track.initial_pose);
    o += "\n";
    for (const auto& a : track.actions) {
      o += std::string("  ") + to_string(a.kind);
      num(a.start);
      num(a.end);
      pose(a.start_pose);
      pose(a.end_pose);
      o += "\n";
      for (const auto& seg : a.path) {
        o += seg.kind == SegmentKind::line ? "    line" : "    arc";
        o += seg.travel == Travel::forward ? " forward" : " backing";
        pose(seg.start);
        pose(seg.end);
        num(seg.length);
        if (seg.kind == SegmentKind::arc) {
          num(seg.center.x);
          num(seg.center.y);
          num(seg.radius);
          num(seg.sweep);
          o += seg.side == Side::right ? " right" : " left";
        }
        o += "\n";
      }
      if (a.kind == ActionKind::path) {
        o += "    profile";
        num(a.profile.entry_speed());
        for (const auto& ph : a.profile.phases()) {
          num(ph.duration);
          num(ph.v0);
          num(ph.accel);
        }
        o += "\n";
      }
    }
  }
  // Barriers of disjoint robot groups may be declared in either order.
  std::vector<std::string> barrier_lines;
  for (const auto& b : tl.barriers) {
    std::string body = std::move(o);
    o = "barrier";
    for (std::size_t k = 0; k < b.robots.size(); ++k) {
      o += " " + tl.robots[b.robots[k]].name;
      num(b.arrivals[k]);
    }
    num(b.release);
    o += "\n";
    barrier_lines.push_back(std::move(o));
    o = std::move(body);
  }
  std::sort(barrier_lines.begin(), barrier_lines.end());
  for (const auto& line : barrier_lines) o += line;
  o += "duration";
  num(tl.duration);
  o += "\n";
  return o;
}

}  // namespace ccr
