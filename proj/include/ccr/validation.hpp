#pragma once

// Position checks of sampled trajectories against the scene.

#include <algorithm>
#include <string>
#include <vector>

#include "ccr/format.hpp"
#include "ccr/scene.hpp"
#include "ccr/scheduler.hpp"

namespace ccr {

struct Warning {
  std::size_t robot = 0;
  double time = 0.0;
  double x = 0.0;
  double y = 0.0;
  Classification cause;  // never legal

  friend bool operator==(const Warning&, const Warning&) = default;
};

inline constexpr double kDefaultScanStep = 0.02;

/// One warning per robot and cause for each contiguous run of illegal
/// samples, stamped with the first sample of the run. Robots are points.
inline std::vector<Warning> scan_timeline(const Scene& scene, const Timeline& tl, double dt = kDefaultScanStep) {
  std::vector<double> times = sample_times(tl, dt);
  std::vector<Warning> out;
  for (std::size_t r = 0; r < tl.tracks.size(); ++r) {
    if (!tl.tracks[r].placed) continue;
    Classification previous;
    for (double t : times) {
      Pose p = robot_pose_at(tl, r, t).pose;
      Classification c = classify_point(scene, p.x, p.y);
      if (c.kind != PointClass::legal && !(c == previous)) out.push_back({r, t, p.x, p.y, c});
      previous = c;
    }
  }
  std::stable_sort(out.begin(), out.end(), [](const Warning& a, const Warning& b) {
    return a.time != b.time ? a.time < b.time : a.robot < b.robot;
  });
  return out;
}

inline std::string describe(const Warning& w, const Timeline& tl) {
  std::string where = w.cause.kind == PointClass::out_of_scene ? "leaves the scene"
                                                               : "enters forbidden area \"" + w.cause.area + "\"";
  return "robot '" + tl.robots[w.robot].name + "' " + where + " at t=" + fixed(w.time, 3) + " s (" + fixed(w.x, 3) +
         ", " + fixed(w.y, 3) + ")";
}

}  // namespace ccr
