#pragma once

// Compass-heading geometry for turn-limited robots on a flat stage.
//
// Coordinates are meters with +x to stage right and +y into the scene.
// Headings are compass degrees: 0 points into the scene (north), 90 to
// stage right (east), and they grow clockwise when seen from above.

#include <array>
#include <cmath>
#include <numbers>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "ccr/error.hpp"

namespace ccr {

inline constexpr double kPi = std::numbers::pi;

inline double deg_to_rad(double deg) { return deg * (kPi / 180.0); }
inline double rad_to_deg(double rad) { return rad * (180.0 / kPi); }

/// Maps any finite angle onto [0, 360).
inline double normalize_heading(double deg) {
  double h = std::fmod(deg, 360.0);
  if (h < 0.0) h += 360.0;
  // fmod of a tiny negative value can round back up to exactly 360.
  if (h >= 360.0) h -= 360.0;
  return h + 0.0;  // folds -0 into +0
}

struct Vec2 {
  double x = 0.0;
  double y = 0.0;

  friend Vec2 operator+(Vec2 a, Vec2 b) { return {a.x + b.x, a.y + b.y}; }
  friend Vec2 operator-(Vec2 a, Vec2 b) { return {a.x - b.x, a.y - b.y}; }
  friend Vec2 operator*(double k, Vec2 a) { return {k * a.x, k * a.y}; }
  friend bool operator==(const Vec2&, const Vec2&) = default;

  double norm() const { return std::hypot(x, y); }
};

/// sin and cos of a degree angle, exact on multiples of 90.
///
/// The angle is reduced to the nearest quarter turn first so that headings
/// such as south or 36000 degrees do not pick up rounding noise.
inline Vec2 sincos_deg(double deg) {
  double r = normalize_heading(deg);
  double quarter = std::nearbyint(r / 90.0);
  double rem = deg_to_rad(r - 90.0 * quarter);
  double s = std::sin(rem);
  double c = std::cos(rem);
  switch (static_cast<int>(quarter) & 3) {
    case 0: return {s, c};
    case 1: return {c, -s};
    case 2: return {-s, -c};
    default: return {-c, s};
  }
}

/// Unit vector of a compass heading: (sin, cos), so north is (0, 1).
inline Vec2 heading_to_vector(double heading) { return sincos_deg(heading); }

/// Compass heading of a non-zero vector.
inline double vector_to_heading(Vec2 v) { return normalize_heading(rad_to_deg(std::atan2(v.x, v.y))); }

struct Pose {
  double x = 0.0;
  double y = 0.0;
  double heading = 0.0;

  Pose() = default;
  Pose(double x_, double y_, double heading_) : x(x_ + 0.0), y(y_ + 0.0), heading(normalize_heading(heading_)) {}

  Vec2 position() const { return {x, y}; }

  friend bool operator==(const Pose&, const Pose&) = default;
};

/// Smallest absolute difference between two headings, in degrees.
inline double heading_distance(double a, double b) {
  double d = normalize_heading(a - b);
  return std::min(d, 360.0 - d);
}

enum class Travel { forward, backing };
enum class Side { left, right };

inline const char* to_string(Travel t) { return t == Travel::forward ? "forward" : "backing"; }
inline const char* to_string(Side s) { return s == Side::left ? "left" : "right"; }

inline Side opposite(Side s) { return s == Side::left ? Side::right : Side::left; }

struct TurnConstraint {
  double min_radius = 0.5;

  explicit TurnConstraint(double r = 0.5) : min_radius(r) {
    if (!(std::isfinite(r) && r > 0.0)) throw std::invalid_argument("minimum turning radius must be finite and positive");
  }
};

namespace detail {

inline Vec2 right_of(double heading) {
  Vec2 f = heading_to_vector(heading);
  return {f.y, -f.x};
}

inline Vec2 side_vector(double heading, Side side) {
  Vec2 r = right_of(heading);
  return side == Side::right ? r : Vec2{-r.x, -r.y};
}

// +1 when the robot revolves clockwise around the arc center.
inline double rotation_sense(Side side, Travel travel) {
  bool clockwise = (side == Side::right) == (travel == Travel::forward);
  return clockwise ? 1.0 : -1.0;
}

// Rotates v clockwise by a compass angle.
inline Vec2 rotate_clockwise(Vec2 v, double deg) {
  Vec2 sc = sincos_deg(deg);
  return {v.x * sc.y + v.y * sc.x, -v.x * sc.x + v.y * sc.y};
}

}  // namespace detail

/// Center of the turning circle of radius `radius` on the given side of a pose.
inline Vec2 turn_center(const Pose& p, double radius, Side side) {
  return p.position() + radius * detail::side_vector(p.heading, side);
}

inline Pose line_endpoint(const Pose& start, double distance, Travel travel) {
  if (!(std::isfinite(distance) && distance >= 0.0)) throw std::invalid_argument("line distance must be finite and non-negative");
  Vec2 f = heading_to_vector(start.heading);
  double d = travel == Travel::forward ? distance : -distance;
  return Pose(start.x + d * f.x, start.y + d * f.y, start.heading);
}

/// Pose reached after driving `angle` degrees along a circle of `radius`.
///
/// The circle center sits on the named side of the start heading. Driving
/// forward-right or backing-left revolves the robot clockwise; the heading
/// changes by +angle for forward-right and backing-left, -angle otherwise.
inline Pose arc_endpoint(const Pose& start, double radius, double angle, Side side, Travel travel) {
  if (!(std::isfinite(radius) && radius > 0.0)) throw std::invalid_argument("arc radius must be finite and positive");
  if (!(std::isfinite(angle) && angle >= 0.0)) throw std::invalid_argument("arc angle must be finite and non-negative");
  Vec2 center = turn_center(start, radius, side);
  double turn = detail::rotation_sense(side, travel) * angle;
  Vec2 rel = detail::rotate_clockwise(start.position() - center, turn);
  return Pose(center.x + rel.x, center.y + rel.y, start.heading + turn);
}

enum class SegmentKind { line, arc };

struct PathSegment {
  SegmentKind kind = SegmentKind::line;
  Pose start;
  Pose end;
  double length = 0.0;
  Travel travel = Travel::forward;
  // Arc-only fields.
  Vec2 center;
  double radius = 0.0;
  Side side = Side::right;
  double sweep = 0.0;  // degrees

  /// Pose at arclength s into this segment, with s clamped to [0, length].
  Pose at(double s) const {
    if (s <= 0.0) return start;
    if (s >= length) return end;
    if (kind == SegmentKind::line) return line_endpoint(start, s, travel);
    return arc_endpoint(start, radius, rad_to_deg(s / radius), side, travel);
  }

  friend bool operator==(const PathSegment&, const PathSegment&) = default;
};

inline PathSegment make_line(const Pose& start, double distance, Travel travel) {
  PathSegment seg;
  seg.kind = SegmentKind::line;
  seg.start = start;
  seg.end = line_endpoint(start, distance, travel);
  seg.length = distance;
  seg.travel = travel;
  return seg;
}

inline PathSegment make_arc(const Pose& start, double radius, double angle, Side side, Travel travel) {
  PathSegment seg;
  seg.kind = SegmentKind::arc;
  seg.start = start;
  seg.end = arc_endpoint(start, radius, angle, side, travel);
  seg.length = radius * deg_to_rad(angle);
  seg.travel = travel;
  seg.center = turn_center(start, radius, side);
  seg.radius = radius;
  seg.side = side;
  seg.sweep = angle;
  return seg;
}

inline double path_length(std::span<const PathSegment> path) {
  double total = 0.0;
  for (const auto& seg : path) total += seg.length;
  return total;
}

/// Pose at arclength s along a chained path.
inline Pose sample_path(std::span<const PathSegment> path, double s) {
  if (path.empty()) throw std::invalid_argument("cannot sample an empty path");
  double total = path_length(path);
  double slack = 1e-9 * std::max(1.0, total);
  if (!(s >= -slack && s <= total + slack)) {
    throw std::out_of_range("arclength " + std::to_string(s) + " outside [0, " + std::to_string(total) + "]");
  }
  for (const auto& seg : path) {
    if (s <= seg.length) return seg.at(s);
    s -= seg.length;
  }
  return path.back().end;
}

namespace detail {

// Angles this close to 0 or 360 are rounding noise from atan2.
inline constexpr double kSweepSnap = 1e-10;

// Degrees needed to turn from heading `from` to heading `to` on a circle
// driven forward on `side`.
inline double forward_sweep(double from, double to, Side side) {
  double a = side == Side::right ? normalize_heading(to - from) : normalize_heading(from - to);
  if (a < kSweepSnap || a > 360.0 - kSweepSnap) return 0.0;
  return a;
}

struct CscCandidate {
  Side first = Side::right;
  Side second = Side::right;
  double first_sweep = 0.0;
  double line = 0.0;
  double second_sweep = 0.0;
  double radius = 0.0;

  double length() const { return radius * deg_to_rad(first_sweep) + line + radius * deg_to_rad(second_sweep); }

  int segment_count() const { return (first_sweep > 0.0) + (line > 0.0) + (second_sweep > 0.0); }
};

// Forward CSC construction through tangents of the start and goal circles.
inline std::optional<CscCandidate> csc_candidate(const Pose& start, const Pose& goal, double radius, Side first,
                                                 Side second) {
  Vec2 c1 = turn_center(start, radius, first);
  Vec2 c2 = turn_center(goal, radius, second);
  Vec2 v = c2 - c1;
  double dist = v.norm();
  CscCandidate c;
  c.first = first;
  c.second = second;
  c.radius = radius;
  if (first == second) {
    if (dist <= 1e-12 * std::max(1.0, radius)) {
      c.first_sweep = forward_sweep(start.heading, goal.heading, first);
      return c;
    }
    double psi = vector_to_heading(v);
    c.first_sweep = forward_sweep(start.heading, psi, first);
    c.line = dist;
    c.second_sweep = forward_sweep(psi, goal.heading, second);
    return c;
  }
  double diameter = 2.0 * radius;
  double gap = dist * dist - diameter * diameter;
  if (gap < 0.0) {
    if (dist < diameter * (1.0 - 1e-12)) return std::nullopt;
    gap = 0.0;
  }
  double line = std::sqrt(gap);
  double offset = rad_to_deg(std::atan2(diameter, line));
  double psi = vector_to_heading(v) + (first == Side::right ? offset : -offset);
  c.first_sweep = forward_sweep(start.heading, psi, first);
  c.line = line;
  c.second_sweep = forward_sweep(psi, goal.heading, second);
  return c;
}

inline bool better_candidate(const CscCandidate& a, const CscCandidate& b) {
  double la = a.length();
  double lb = b.length();
  double tol = 1e-9 * std::max(1.0, std::min(la, lb));
  if (std::abs(la - lb) > tol) return la < lb;
  if (a.first != b.first) return a.first == Side::right;
  return a.segment_count() < b.segment_count();
}

}  // namespace detail

/// Shortest circle-straight-circle path from start to goal.
///
/// All segments share `travel`. Zero-length pieces are dropped, so a
/// collinear goal yields a single line and start == goal yields no segments.
/// Equal-length candidates prefer a right turn first, then fewer segments.
inline std::vector<PathSegment> plan_path(const Pose& start, const Pose& goal, Travel travel,
                                          const TurnConstraint& constraint) {
  for (double v : {start.x, start.y, start.heading, goal.x, goal.y, goal.heading}) {
    if (!std::isfinite(v)) throw PlanningError("cannot plan a path between non-finite poses");
  }
  if (start == goal) return {};

  // A backing path is a forward path of a robot facing the other way; its
  // left and right trade places.
  bool backing = travel == Travel::backing;
  Pose from = backing ? Pose(start.x, start.y, start.heading + 180.0) : start;
  Pose to = backing ? Pose(goal.x, goal.y, goal.heading + 180.0) : goal;

  const std::array<std::array<Side, 2>, 4> families{{
      {Side::right, Side::right},
      {Side::right, Side::left},
      {Side::left, Side::right},
      {Side::left, Side::left},
  }};
  std::optional<detail::CscCandidate> best;
  for (const auto& fam : families) {
    auto c = detail::csc_candidate(from, to, constraint.min_radius, fam[0], fam[1]);
    if (c && (!best || detail::better_candidate(*c, *best))) best = c;
  }
  if (!best) {
    throw PlanningError("no circle-straight-circle path with turning radius " + std::to_string(constraint.min_radius) +
                        " reaches the goal pose");
  }

  auto real_side = [&](Side s) { return backing ? opposite(s) : s; };
  std::vector<PathSegment> path;
  Pose cursor = start;
  if (best->first_sweep > 0.0) {
    path.push_back(make_arc(cursor, best->radius, best->first_sweep, real_side(best->first), travel));
    cursor = path.back().end;
  }
  if (best->line > 0.0) {
    path.push_back(make_line(cursor, best->line, travel));
    cursor = path.back().end;
  }
  if (best->second_sweep > 0.0) {
    path.push_back(make_arc(cursor, best->radius, best->second_sweep, real_side(best->second), travel));
  }
  return path;
}

}  // namespace ccr
