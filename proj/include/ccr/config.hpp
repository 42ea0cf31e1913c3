#pragma once

// Default robot parameters from a `key = value` text file.
//
//   # comment
//   max_speed = 1.0
//   nille.min_turn_radius = 0.3     # applies to robot `nille` only

#include <charconv>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>

#include "ccr/error.hpp"
#include "ccr/motion.hpp"

namespace ccr {

struct RobotDefaults {
  SpeedParams speed;
  double min_turn_radius = 0.5;

  friend bool operator==(const RobotDefaults&, const RobotDefaults&) = default;
};

class Config {
 public:
  /// Defaults for one robot: global keys first, then `robot.key` overrides.
  RobotDefaults for_robot(const std::string& robot) const {
    RobotDefaults d;
    for (const auto& [key, value] : global_) set(d, key, value);
    if (auto it = per_robot_.find(robot); it != per_robot_.end()) {
      for (const auto& [key, value] : it->second) set(d, key, value);
    }
    d.speed.validate();
    if (!(d.min_turn_radius > 0.0)) throw std::invalid_argument("min_turn_radius must be positive");
    return d;
  }

  void assign(const std::string& key, double value, const std::string& robot = {}) {
    if (!known(key)) throw std::invalid_argument("unknown configuration key '" + key + "'");
    if (robot.empty()) global_[key] = value;
    else per_robot_[robot][key] = value;
  }

  static bool known(std::string_view key) {
    return key == "max_speed" || key == "acceleration" || key == "deceleration" || key == "physical_max" ||
           key == "hard_acceleration" || key == "hard_deceleration" || key == "min_turn_radius";
  }

 private:
  static void set(RobotDefaults& d, const std::string& key, double v) {
    if (key == "max_speed") d.speed.max_speed = v;
    else if (key == "acceleration") d.speed.acceleration = v;
    else if (key == "deceleration") d.speed.deceleration = v;
    else if (key == "physical_max") d.speed.physical_max = v;
    else if (key == "hard_acceleration") d.speed.hard_acceleration = v;
    else if (key == "hard_deceleration") d.speed.hard_deceleration = v;
    else if (key == "min_turn_radius") d.min_turn_radius = v;
  }

  std::map<std::string, double> global_;
  std::map<std::string, std::map<std::string, double>> per_robot_;
};

namespace detail {

inline std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

}  // namespace detail

/// Parses config text; errors carry the offending line number.
inline Config parse_config(std::string_view text) {
  Config cfg;
  int line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    std::size_t nl = text.find('\n', pos);
    std::string_view line = text.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
    pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
    ++line_no;
    if (auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = detail::trim(line);
    if (line.empty()) continue;

    auto eq = line.find('=');
    if (eq == std::string_view::npos) throw Error("expected 'key = value'", {line_no, 1});
    std::string key(detail::trim(line.substr(0, eq)));
    std::string_view raw = detail::trim(line.substr(eq + 1));
    double value = 0.0;
    auto [ptr, ec] = std::from_chars(raw.data(), raw.data() + raw.size(), value);
    if (ec != std::errc() || ptr != raw.data() + raw.size()) {
      throw Error("value of '" + key + "' is not a number", {line_no, static_cast<int>(eq) + 2});
    }
    std::string robot;
    if (auto dot = key.find('.'); dot != std::string::npos) {
      robot = key.substr(0, dot);
      key = key.substr(dot + 1);
    }
    try {
      cfg.assign(key, value, robot);
    } catch (const std::invalid_argument& e) {
      throw Error(e.what(), {line_no, 1});
    }
  }
  return cfg;
}

inline Config load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read config file '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

}  // namespace ccr
