#pragma once

// Independent reference computations shared by the unit tests and the
// acceptance runner. Nothing here calls into the code under test except to
// read its results.

#include <algorithm>
#include <array>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "ccr/ccr.hpp"

namespace oracle {

inline constexpr double kPi = 3.14159265358979323846;

inline double rad(double deg) { return deg * kPi / 180.0; }

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : gen_(seed) {}
  double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(gen_); }
  int integer(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(gen_); }
  bool chance(double p) { return uniform(0.0, 1.0) < p; }
  std::mt19937_64& engine() { return gen_; }

 private:
  std::mt19937_64 gen_;
};

// ---------------------------------------------------------------------------
// Geometry

struct P {
  double x, y, h;  // h in degrees, compass
};

inline double wrap360(double deg) {
  double r = std::fmod(deg, 360.0);
  return r < 0.0 ? r + 360.0 : r;
}

inline double angle_gap(double a, double b) {
  double d = wrap360(a - b);
  return std::min(d, 360.0 - d);
}

/// Pose after driving `length` along a unicycle with signed curvature
/// (positive = clockwise seen from above), RK4 with `steps` steps. The sign of
/// `speed` selects forward (+1) or backing (-1).
inline P integrate_unicycle(P p, double length, double curvature, double speed, int steps) {
  double h = rad(p.h);
  double x = p.x, y = p.y;
  double ds = length / steps;
  auto f = [&](double heading) { return std::array<double, 3>{speed * std::sin(heading), speed * std::cos(heading), speed * curvature}; };
  for (int i = 0; i < steps; ++i) {
    auto k1 = f(h);
    auto k2 = f(h + ds / 2 * k1[2]);
    auto k3 = f(h + ds / 2 * k2[2]);
    auto k4 = f(h + ds * k3[2]);
    x += ds / 6 * (k1[0] + 2 * k2[0] + 2 * k3[0] + k4[0]);
    y += ds / 6 * (k1[1] + 2 * k2[1] + 2 * k3[1] + k4[1]);
    h += ds / 6 * (k1[2] + 2 * k2[2] + 2 * k3[2] + k4[2]);
  }
  return {x, y, wrap360(h * 180.0 / kPi)};
}

/// Replays planned segments from `start` with the analytic endpoint
/// formulas, ignoring the end poses the planner stored.
inline ccr::Pose fold_segments(ccr::Pose p, const std::vector<ccr::PathSegment>& segs) {
  for (const auto& s : segs) {
    p = s.kind == ccr::SegmentKind::line ? ccr::line_endpoint(p, s.length, s.travel)
                                         : ccr::arc_endpoint(p, s.radius, s.sweep, s.side, s.travel);
  }
  return p;
}

/// Shortest forward CSC length by scanning the first arc angle and solving
/// the tangency condition by bisection. Returns +inf when no word works.
inline double brute_force_csc(P start, P goal, double r) {
  auto dir = [](double h) { return std::array<double, 2>{std::sin(rad(h)), std::cos(rad(h))}; };
  auto right_normal = [](double h) { return std::array<double, 2>{std::cos(rad(h)), -std::sin(rad(h))}; };
  double best = INFINITY;
  for (int s1 : {1, -1}) {
    for (int s2 : {1, -1}) {
      auto n0 = right_normal(start.h);
      double c1x = start.x + s1 * r * n0[0], c1y = start.y + s1 * r * n0[1];
      auto ng = right_normal(goal.h);
      double cgx = goal.x + s2 * r * ng[0], cgy = goal.y + s2 * r * ng[1];
      // Pose after the first arc and the tangency residual there.
      auto eval = [&](double th1, double& len, double& h1) {
        h1 = start.h + s1 * th1;
        auto n1 = right_normal(h1);
        double qx = c1x - s1 * r * n1[0], qy = c1y - s1 * r * n1[1];
        double wx = cgx - qx - s2 * r * n1[0], wy = cgy - qy - s2 * r * n1[1];
        auto d = dir(h1);
        len = d[0] * wx + d[1] * wy;
        return d[0] * wy - d[1] * wx;
      };
      const double step = 0.01;
      double len = 0, h1 = 0;
      double prev_th = -step;
      double prev_f = eval(prev_th, len, h1);
      for (double th = 0.0; th <= 360.0 + step; th += step) {
        double f = eval(th, len, h1);
        if ((prev_f <= 0.0) != (f <= 0.0)) {
          double lo = prev_th, hi = th, flo = prev_f;
          for (int it = 0; it < 200 && hi - lo > 1e-13; ++it) {
            double mid = 0.5 * (lo + hi);
            double fm = eval(mid, len, h1);
            if ((fm <= 0.0) == (flo <= 0.0)) {
              lo = mid;
              flo = fm;
            } else {
              hi = mid;
            }
          }
          double th1 = 0.5 * (lo + hi);
          eval(th1, len, h1);
          th1 = wrap360(th1);
          if (th1 > 360.0 - 1e-7) th1 = 0.0;
          if (len >= -1e-9) {
            double th2 = wrap360(s2 * (goal.h - h1));
            if (th2 > 360.0 - 1e-7) th2 = 0.0;
            best = std::min(best, r * rad(th1) + std::max(0.0, len) + r * rad(th2));
          }
        }
        prev_th = th;
        prev_f = f;
      }
    }
  }
  return best;
}

// ---------------------------------------------------------------------------
// Motion

/// Exact integral of the (piecewise linear) speed, using only speed_at at
/// the phase breakpoints.
inline double profile_integral(const ccr::MotionProfile& p) {
  double t = 0.0, sum = 0.0;
  for (const auto& ph : p.phases()) {
    double t1 = t + ph.duration;
    sum += 0.5 * (p.speed_at(t) + p.speed_at(t1)) * ph.duration;
    t = t1;
  }
  return sum;
}

/// Numeric integral of speed_at with the trapezoid rule at step dt.
inline double integrate_speed(const ccr::MotionProfile& p, double dt) {
  double T = p.duration();
  auto n = static_cast<long>(std::ceil(T / dt));
  double sum = 0.0;
  for (long i = 0; i < n; ++i) {
    double t0 = T * i / n, t1 = T * (i + 1) / n;
    sum += 0.5 * (p.speed_at(t0) + p.speed_at(t1)) * (t1 - t0);
  }
  return sum;
}

/// Distance a point mass can cover from rest in time T and be at rest again:
/// accelerate at `a` up to `vmax`, and brake at `b` once the time left is
/// just enough to stop. Euler steps of dt.
inline double reachable_distance(double T, double vmax, double a, double b, double dt) {
  double s = 0.0, v = 0.0;
  auto n = static_cast<long>(std::ceil(T / dt));
  double h = T / static_cast<double>(n);
  for (long i = 0; i < n; ++i) {
    double left = T - static_cast<double>(i) * h;
    double accel = v / b >= left - h ? -b : v < vmax ? a : 0.0;
    double v1 = std::clamp(v + accel * h, 0.0, vmax);
    if (accel < 0.0) v1 = std::max(0.0, v - b * h);
    s += 0.5 * (v + v1) * h;
    v = v1;
  }
  return s;
}

/// Shortest rest-to-rest time for `distance` by bisection on reachable_distance.
inline double minimum_time(double distance, double vmax, double a, double b, double dt) {
  double lo = 0.0, hi = 1.0;
  while (reachable_distance(hi, vmax, a, b, dt) < distance) hi *= 2.0;
  for (int i = 0; i < 40; ++i) {
    double mid = 0.5 * (lo + hi);
    (reachable_distance(mid, vmax, a, b, dt) < distance ? lo : hi) = mid;
  }
  return hi;
}

// ---------------------------------------------------------------------------
// Files and outputs

inline std::filesystem::path scripts_dir() { return CCR_SCRIPTS_DIR; }
inline std::filesystem::path golden_dir() { return CCR_GOLDEN_DIR; }

inline std::string read_text(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline std::vector<std::filesystem::path> script_files() {
  std::vector<std::filesystem::path> out;
  for (const auto& e : std::filesystem::directory_iterator(scripts_dir())) {
    if (e.path().extension() == ".ccr") out.push_back(e.path());
  }
  std::sort(out.begin(), out.end());
  return out;
}

inline ccr::InstructionStream load(const std::string& name) { return ccr::load_script(read_text(scripts_dir() / name)); }

struct Outputs {
  std::string trace;
  std::string svg;
  std::string report;
};

inline constexpr double kGoldenDt = 0.25;

inline Outputs render_all(const std::string& source, double dt) {
  auto stream = ccr::load_script(source);
  auto tl = ccr::schedule(stream);
  std::ostringstream trace;
  ccr::write_trace(tl, dt, trace);
  return {trace.str(), ccr::render_svg(stream.scene, tl), ccr::write_report(stream, tl)};
}

// ---------------------------------------------------------------------------
// Random multi-robot scripts

/// One statement and the robots whose order it constrains.
struct Event {
  std::string text;
  std::vector<int> robots;
};

struct RandomScript {
  std::string header;
  std::vector<Event> events;  // one valid order

  std::string render(const std::vector<std::size_t>& order) const {
    std::string s = header;
    for (std::size_t i : order) s += events[i].text + "\n";
    return s;
  }
};

inline RandomScript random_script(Rng& rng, int robot_count = 3) {
  static const char* names[] = {"ra", "rb", "rc", "rd"};
  RandomScript rs;
  rs.header = "sceneWidth = 12;\nsceneDepth = 8;\n";
  for (int r = 0; r < robot_count; ++r) {
    rs.header += std::string("robot ") + names[r] + " = robot(\"R" + std::to_string(r) + "\", color(" +
                 std::to_string(60 * r) + ", 100, 200));\n";
  }
  auto num = [&](double lo, double hi) { return ccr::compact(std::round(rng.uniform(lo, hi) * 100) / 100, 6); };
  for (int r = 0; r < robot_count; ++r) {
    rs.events.push_back({std::string("initialPose(") + names[r] + ", " + num(-4, 4) + ", " + num(1, 7) + ", " +
                             num(0, 359) + ");",
                         {r}});
  }
  static const char* controls[] = {"", "\"=\"", "\"!\"", "\"+-x\"", "\"==\"", "\"!+\""};
  int count = rng.integer(6, 18);
  for (int i = 0; i < count; ++i) {
    int kind = rng.integer(0, 9);
    int r = rng.integer(0, robot_count - 1);
    std::string rob = names[r];
    std::string ctrl = controls[rng.integer(0, 5)];
    std::string c = ctrl.empty() ? "" : ", " + ctrl;
    switch (kind) {
      case 0:
        rs.events.push_back({"move(" + rob + ", " + num(0, 2) + c + ");", {r}});
        break;
      case 1:
        rs.events.push_back({"moveBacking(" + rob + ", " + num(0, 2) + c + ");", {r}});
        break;
      case 2:
        rs.events.push_back({"circleLeft(" + rob + ", " + num(0.5, 2) + ", " + num(0, 200) + c + ");", {r}});
        break;
      case 3:
        rs.events.push_back({"circleRightBacking(" + rob + ", " + num(0.5, 2) + ", " + num(0, 200) + c + ");", {r}});
        break;
      case 4:
      case 5:
        rs.events.push_back({"moveTo(" + rob + ", " + num(-4, 4) + ", " + num(1, 7) + ", " + num(0, 359) + c + ");", {r}});
        break;
      case 6:
        rs.events.push_back({"wait(" + rob + ", " + num(0, 3) + ");", {r}});
        break;
      case 7:
        rs.events.push_back({"maxSpeed(" + rob + ", " + num(0.3, 1.9) + ");", {r}});
        break;
      case 8: {
        std::vector<int> who;
        std::string args;
        for (int k = 0; k < robot_count; ++k) {
          if (rng.chance(0.6)) {
            who.push_back(k);
            args += std::string(args.empty() ? "" : ", ") + names[k];
          }
        }
        if (who.empty()) {
          rs.events.push_back({"synchronize();", {}});
          for (int k = 0; k < robot_count; ++k) rs.events.back().robots.push_back(k);
        } else {
          rs.events.push_back({"synchronize(" + args + ");", who});
        }
        break;
      }
      case 9: {
        // Global setting: orders against every robot.
        std::vector<int> all;
        for (int k = 0; k < robot_count; ++k) all.push_back(k);
        rs.events.push_back({"acceleration(" + num(0.2, 1.5) + ");", all});
        break;
      }
    }
  }
  return rs;
}

/// A uniformly drawn order that keeps every robot's statements in sequence.
inline std::vector<std::size_t> random_interleaving(const RandomScript& rs, Rng& rng) {
  std::size_t n = rs.events.size();
  std::vector<std::vector<std::size_t>> preds(n);
  std::vector<long> last(8, -1);
  for (std::size_t i = 0; i < n; ++i) {
    for (int r : rs.events[i].robots) {
      if (last[r] >= 0) preds[i].push_back(static_cast<std::size_t>(last[r]));
      last[r] = static_cast<long>(i);
    }
  }
  std::vector<bool> done(n, false);
  std::vector<std::size_t> order;
  while (order.size() < n) {
    std::vector<std::size_t> ready;
    for (std::size_t i = 0; i < n; ++i) {
      if (done[i]) continue;
      bool ok = std::all_of(preds[i].begin(), preds[i].end(), [&](std::size_t p) { return done[p]; });
      if (ok) ready.push_back(i);
    }
    std::size_t pick = ready[static_cast<std::size_t>(rng.integer(0, static_cast<int>(ready.size()) - 1))];
    done[pick] = true;
    order.push_back(pick);
  }
  return order;
}

inline std::vector<std::size_t> identity_order(const RandomScript& rs) {
  std::vector<std::size_t> o(rs.events.size());
  for (std::size_t i = 0; i < o.size(); ++i) o[i] = i;
  return o;
}

}  // namespace oracle
