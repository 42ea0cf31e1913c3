#pragma once

// Top-down SVG drawing of the scene and the robots' trajectories.
//
// Scene coordinates map to SVG user units by
//   X = (x + width/2) * scale + margin
//   Y = (depth - y) * scale + margin
// so stage right is to the right and the audience edge (y = 0) at the bottom.

#include <cmath>
#include <string>
#include <vector>

#include "ccr/format.hpp"
#include "ccr/scene.hpp"
#include "ccr/scheduler.hpp"

namespace ccr {

struct SvgOptions {
  double scale = 100.0;     // user units per meter
  double margin = 50.0;     // user units around the stage
  double path_step = 0.05;  // arclength between trajectory samples, meters
  double marker_size = 0.2; // robot triangle length, meters
};

struct SvgPoint {
  double x = 0.0;
  double y = 0.0;
};

inline SvgPoint to_svg(const Scene& scene, double x, double y, const SvgOptions& opt = {}) {
  return {(x + scene.width() / 2.0) * opt.scale + opt.margin, (scene.depth() - y) * opt.scale + opt.margin};
}

namespace detail {

inline std::string svg_color(const Color& c) {
  return "rgb(" + std::to_string(c.r) + "," + std::to_string(c.g) + "," + std::to_string(c.b) + ")";
}

inline std::string xml_escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

inline std::string coord(double v) { return fixed(v, 3); }

// Scene positions along one robot's whole performance.
inline std::vector<Vec2> trajectory_points(const RobotTrack& track, double step) {
  std::vector<Vec2> pts{{track.initial_pose.x, track.initial_pose.y}};
  auto add = [&](const Pose& p) {
    Vec2 v{p.x, p.y};
    if (!(v == pts.back())) pts.push_back(v);
  };
  for (const auto& a : track.actions) {
    for (const auto& seg : a.path) {
      auto n = static_cast<std::size_t>(std::ceil(seg.length / step));
      for (std::size_t i = 1; i < n; ++i) add(seg.at(seg.length * static_cast<double>(i) / static_cast<double>(n)));
      add(seg.end);
    }
  }
  return pts;
}

inline std::string triangle(const Scene& scene, const Pose& p, const SvgOptions& opt) {
  Vec2 dir = heading_to_vector(p.heading);
  Vec2 side{dir.y, -dir.x};
  Vec2 c{p.x, p.y};
  double len = opt.marker_size;
  Vec2 corners[3] = {c + (len / 2.0) * dir, c - (len / 2.0) * dir + (len / 2.5) * side,
                     c - (len / 2.0) * dir - (len / 2.5) * side};
  std::string pts;
  for (const auto& v : corners) {
    SvgPoint s = to_svg(scene, v.x, v.y, opt);
    if (!pts.empty()) pts += ' ';
    pts += coord(s.x) + "," + coord(s.y);
  }
  return pts;
}

}  // namespace detail

/// Standalone SVG 1.1 document. Output depends only on the inputs.
inline std::string render_svg(const Scene& scene, const Timeline& tl, const SvgOptions& opt = {}) {
  using detail::coord;
  const double w = scene.width() * opt.scale + 2.0 * opt.margin;
  const double h = scene.depth() * opt.scale + 2.0 * opt.margin;
  std::string o;
  o += "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  o += "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"" + coord(w) + "\" height=\"" + coord(h) +
       "\" viewBox=\"0 0 " + coord(w) + " " + coord(h) + "\">\n";

  SvgPoint top_left = to_svg(scene, -scene.width() / 2.0, scene.depth(), opt);
  o += "<rect class=\"scene\" x=\"" + coord(top_left.x) + "\" y=\"" + coord(top_left.y) + "\" width=\"" +
       coord(scene.width() * opt.scale) + "\" height=\"" + coord(scene.depth() * opt.scale) +
       "\" fill=\"white\" stroke=\"black\" stroke-width=\"2\"/>\n";

  if (scene.grid()) {
    o += "<g class=\"grid\" stroke=\"rgb(200,200,200)\" stroke-width=\"1\">\n";
    const double half = scene.width() / 2.0;
    auto columns = static_cast<int>(std::floor(scene.width() + 1e-9));
    for (int k = 0; k <= columns; ++k) {
      SvgPoint a = to_svg(scene, -half + k, 0.0, opt);
      SvgPoint b = to_svg(scene, -half + k, scene.depth(), opt);
      o += "<line x1=\"" + coord(a.x) + "\" y1=\"" + coord(a.y) + "\" x2=\"" + coord(b.x) + "\" y2=\"" + coord(b.y) + "\"/>\n";
    }
    auto rows = static_cast<int>(std::floor(scene.depth() + 1e-9));
    for (int k = 0; k <= rows; ++k) {
      SvgPoint a = to_svg(scene, -half, k, opt);
      SvgPoint b = to_svg(scene, half, k, opt);
      o += "<line x1=\"" + coord(a.x) + "\" y1=\"" + coord(a.y) + "\" x2=\"" + coord(b.x) + "\" y2=\"" + coord(b.y) + "\"/>\n";
    }
    o += "</g>\n";
  }

  for (const auto& area : scene.areas()) {
    SvgPoint tl_corner = to_svg(scene, area.rect.min_x, area.rect.max_y, opt);
    SvgPoint center = to_svg(scene, (area.rect.min_x + area.rect.max_x) / 2.0, (area.rect.min_y + area.rect.max_y) / 2.0, opt);
    o += "<g class=\"forbidden\">\n";
    o += "<rect x=\"" + coord(tl_corner.x) + "\" y=\"" + coord(tl_corner.y) + "\" width=\"" +
         coord((area.rect.max_x - area.rect.min_x) * opt.scale) + "\" height=\"" +
         coord((area.rect.max_y - area.rect.min_y) * opt.scale) + "\" fill=\"" + detail::svg_color(area.color) +
         "\" stroke=\"black\" stroke-width=\"1\"/>\n";
    o += "<text x=\"" + coord(center.x) + "\" y=\"" + coord(center.y) +
         "\" font-family=\"sans-serif\" font-size=\"14\" text-anchor=\"middle\" dominant-baseline=\"middle\">" +
         detail::xml_escape(area.name) + "</text>\n";
    o += "</g>\n";
  }

  for (const auto& p : scene.reference_points()) {
    SvgPoint c = to_svg(scene, p.x, p.y, opt);
    o += "<circle class=\"refpoint\" cx=\"" + coord(c.x) + "\" cy=\"" + coord(c.y) + "\" r=\"6.000\" fill=\"" +
         detail::svg_color(p.color) + "\"/>\n";
  }

  for (std::size_t r = 0; r < tl.tracks.size(); ++r) {
    const RobotTrack& track = tl.tracks[r];
    if (!track.placed) continue;
    const std::string color = detail::svg_color(tl.robots[r].color);
    const std::string name = detail::xml_escape(tl.robots[r].name);
    std::string pts;
    for (const Vec2& v : detail::trajectory_points(track, opt.path_step)) {
      SvgPoint s = to_svg(scene, v.x, v.y, opt);
      if (!pts.empty()) pts += ' ';
      pts += coord(s.x) + "," + coord(s.y);
    }
    o += "<polyline class=\"trajectory\" data-robot=\"" + name + "\" points=\"" + pts + "\" fill=\"none\" stroke=\"" +
         color + "\" stroke-width=\"3\"/>\n";
    Pose end = track.actions.empty() ? track.initial_pose : track.actions.back().end_pose;
    o += "<polygon class=\"robot-start\" data-robot=\"" + name + "\" points=\"" +
         detail::triangle(scene, track.initial_pose, opt) + "\" fill=\"white\" stroke=\"" + color + "\" stroke-width=\"2\"/>\n";
    o += "<polygon class=\"robot-end\" data-robot=\"" + name + "\" points=\"" + detail::triangle(scene, end, opt) +
         "\" fill=\"" + color + "\" stroke=\"black\" stroke-width=\"1\"/>\n";
  }

  o += "</svg>\n";
  return o;
}

}  // namespace ccr
