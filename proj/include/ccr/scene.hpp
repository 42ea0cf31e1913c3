#pragma once

#include <algorithm>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace ccr {

struct Color {
  std::uint8_t r = 0;
  std::uint8_t g = 0;
  std::uint8_t b = 0;

  friend bool operator==(const Color&, const Color&) = default;
};

struct Rect {
  double min_x = 0.0;
  double min_y = 0.0;
  double max_x = 0.0;
  double max_y = 0.0;

  /// Rectangle spanned by two opposite corners, in any order.
  static Rect from_corners(double x1, double y1, double x2, double y2) {
    return {std::min(x1, x2), std::min(y1, y2), std::max(x1, x2), std::max(y1, y2)};
  }

  bool contains(double x, double y) const { return x >= min_x && x <= max_x && y >= min_y && y <= max_y; }

  friend bool operator==(const Rect&, const Rect&) = default;
};

struct ForbiddenArea {
  std::string name;
  Color color;
  Rect rect;
};

struct ReferencePoint {
  Color color;
  double x = 0.0;
  double y = 0.0;
};

/// The stage: width along x centered on 0, depth along y from the audience edge.
class Scene {
 public:
  Scene() = default;
  Scene(double width, double depth) : width_(width), depth_(depth) {
    if (!(width > 0.0) || !(depth > 0.0)) throw std::invalid_argument("scene width and depth must be positive");
  }

  double width() const { return width_; }
  double depth() const { return depth_; }

  const std::vector<ForbiddenArea>& areas() const { return areas_; }
  const std::vector<ReferencePoint>& reference_points() const { return points_; }
  bool grid() const { return grid_; }

  /// Areas are final once declared; a second area with the same name throws.
  void add_area(ForbiddenArea area) {
    for (const auto& a : areas_) {
      if (a.name == area.name) throw std::invalid_argument("forbidden area \"" + area.name + "\" is already declared");
    }
    areas_.push_back(std::move(area));
  }
  void add_reference_point(ReferencePoint p) { points_.push_back(p); }
  void enable_grid() { grid_ = true; }

  bool in_bounds(double x, double y) const {
    double half = width_ / 2.0;
    return x >= -half && x <= half && y >= 0.0 && y <= depth_;
  }

 private:
  double width_ = 0.0;
  double depth_ = 0.0;
  std::vector<ForbiddenArea> areas_;
  std::vector<ReferencePoint> points_;
  bool grid_ = false;
};

enum class PointClass { legal, out_of_scene, forbidden };

struct Classification {
  PointClass kind = PointClass::legal;
  std::string area;  // set when kind == forbidden

  friend bool operator==(const Classification&, const Classification&) = default;
};

/// Legal, outside the stage, or inside the first declared forbidden area
/// containing the point (area borders count as inside).
inline Classification classify_point(const Scene& scene, double x, double y) {
  if (!scene.in_bounds(x, y)) return {PointClass::out_of_scene, {}};
  for (const auto& area : scene.areas()) {
    if (area.rect.contains(x, y)) return {PointClass::forbidden, area.name};
  }
  return {};
}

}  // namespace ccr
