#pragma once

// Speed parameters, control strings and piecewise-constant-acceleration
// speed profiles for one path execution.

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "ccr/error.hpp"

namespace ccr {

struct SpeedParams {
  double max_speed = 1.0;          // m/s
  double acceleration = 0.5;       // m/s^2
  double deceleration = 0.5;       // m/s^2
  double hard_acceleration = 4.0;  // m/s^2
  double hard_deceleration = 4.0;  // m/s^2
  double physical_max = 2.0;       // m/s

  /// Throws std::invalid_argument naming the first violated bound.
  void validate() const {
    auto positive = [](double v, const char* name) {
      if (!(std::isfinite(v) && v > 0.0)) throw std::invalid_argument(std::string(name) + " must be finite and positive");
    };
    positive(max_speed, "max_speed");
    positive(acceleration, "acceleration");
    positive(deceleration, "deceleration");
    positive(hard_acceleration, "hard_acceleration");
    positive(hard_deceleration, "hard_deceleration");
    positive(physical_max, "physical_max");
    if (max_speed > physical_max) throw std::invalid_argument("max_speed exceeds physical_max");
    if (acceleration > hard_acceleration) throw std::invalid_argument("acceleration exceeds hard_acceleration");
    if (deceleration > hard_deceleration) throw std::invalid_argument("deceleration exceeds hard_deceleration");
  }

  friend bool operator==(const SpeedParams&, const SpeedParams&) = default;
};

// ---------------------------------------------------------------------------
// Control strings

enum class EdgeMarker { normal, hard, carry };
enum class SpeedAction { increase, decrease, hold, jump };

struct ControlSpec {
  EdgeMarker entry = EdgeMarker::normal;
  EdgeMarker exit = EdgeMarker::normal;
  std::vector<SpeedAction> interior;

  friend bool operator==(const ControlSpec&, const ControlSpec&) = default;
};

/// Splits a control string into entry marker, interior actions and exit marker.
///
/// `!` and `=` are markers only as first or last character; a lone `!` or `=`
/// stands for `!!` or `==`. An empty string is the plain default.
inline ControlSpec parse_control_string(std::string_view s) {
  ControlSpec spec;
  if (s.empty()) return spec;
  if (s == "!") return {EdgeMarker::hard, EdgeMarker::hard, {}};
  if (s == "=") return {EdgeMarker::carry, EdgeMarker::carry, {}};

  auto marker = [](char c) {
    if (c == '!') return EdgeMarker::hard;
    if (c == '=') return EdgeMarker::carry;
    return EdgeMarker::normal;
  };
  spec.entry = marker(s.front());
  if (spec.entry != EdgeMarker::normal) s.remove_prefix(1);
  if (!s.empty()) {
    spec.exit = marker(s.back());
    if (spec.exit != EdgeMarker::normal) s.remove_suffix(1);
  }
  for (char c : s) {
    switch (c) {
      case '+': spec.interior.push_back(SpeedAction::increase); break;
      case '-': spec.interior.push_back(SpeedAction::decrease); break;
      case '!': spec.interior.push_back(SpeedAction::jump); break;
      default: spec.interior.push_back(SpeedAction::hold); break;
    }
  }
  return spec;
}

// ---------------------------------------------------------------------------
// Profiles

struct MotionPhase {
  double duration = 0.0;
  double v0 = 0.0;
  double accel = 0.0;

  /// A braking phase that ends within rounding of rest ends exactly at rest.
  double end_speed() const {
    double v = v0 + accel * duration;
    return v <= 1e-12 * v0 ? 0.0 : v;
  }
  double distance() const { return v0 * duration + 0.5 * accel * duration * duration; }

  friend bool operator==(const MotionPhase&, const MotionPhase&) = default;
};

/// Speed as a function of time over one path execution.
class MotionProfile {
 public:
  MotionProfile() = default;

  /// Zero-duration profile that enters and leaves at `speed`.
  static MotionProfile stationary(double speed) {
    MotionProfile p;
    p.entry_ = p.exit_ = speed;
    return p;
  }

  explicit MotionProfile(std::vector<MotionPhase> phases, double entry_speed) : phases_(std::move(phases)) {
    entry_ = exit_ = entry_speed;
    starts_.reserve(phases_.size());
    offsets_.reserve(phases_.size());
    for (const auto& ph : phases_) {
      starts_.push_back(duration_);
      offsets_.push_back(distance_);
      duration_ += ph.duration;
      distance_ += ph.distance();
      exit_ = ph.end_speed();
    }
  }

  double duration() const { return duration_; }
  double distance() const { return distance_; }
  double entry_speed() const { return entry_; }
  double exit_speed() const { return exit_; }
  std::span<const MotionPhase> phases() const { return phases_; }

  double speed_at(double t) const {
    if (phases_.empty()) return entry_;
    if (t <= 0.0) return entry_;
    if (t >= duration_) return exit_;
    std::size_t i = phase_index(t);
    double tau = t - starts_[i];
    return std::max(0.0, phases_[i].v0 + phases_[i].accel * tau);
  }

  double distance_at(double t) const {
    if (phases_.empty() || t <= 0.0) return 0.0;
    if (t >= duration_) return distance_;
    std::size_t i = phase_index(t);
    double tau = t - starts_[i];
    const auto& ph = phases_[i];
    return offsets_[i] + ph.v0 * tau + 0.5 * ph.accel * tau * tau;
  }

  friend bool operator==(const MotionProfile& a, const MotionProfile& b) {
    return a.phases_ == b.phases_ && a.entry_ == b.entry_;
  }

 private:
  std::size_t phase_index(double t) const {
    auto it = std::upper_bound(starts_.begin(), starts_.end(), t);
    return static_cast<std::size_t>(std::max<std::ptrdiff_t>(0, (it - starts_.begin()) - 1));
  }

  std::vector<MotionPhase> phases_;
  std::vector<double> starts_;
  std::vector<double> offsets_;
  double duration_ = 0.0;
  double distance_ = 0.0;
  double entry_ = 0.0;
  double exit_ = 0.0;
};

namespace detail {

inline void push_phase(std::vector<MotionPhase>& out, double v0, double accel, double duration) {
  if (duration > 0.0) out.push_back({duration, v0, accel});
}

inline double ramp_distance(double v0, double v1, double up, double down) {
  if (v1 >= v0) return (v1 * v1 - v0 * v0) / (2.0 * up);
  return (v0 * v0 - v1 * v1) / (2.0 * down);
}

inline void require_finite_nonnegative(double v, const char* what) {
  if (!(std::isfinite(v) && v >= 0.0)) throw std::invalid_argument(std::string(what) + " must be finite and non-negative");
}

}  // namespace detail

/// Minimal-time trapezoid (or triangle) covering `distance`.
///
/// Ramps from `entry_speed` at `acceleration` toward `max_speed`, cruises,
/// and ramps down at `deceleration` to `exit_speed`. Throws PlanningError
/// when the distance is too short to get from entry to exit speed.
inline MotionProfile base_profile(double distance, const SpeedParams& params, double entry_speed, double exit_speed) {
  detail::require_finite_nonnegative(distance, "distance");
  detail::require_finite_nonnegative(entry_speed, "entry speed");
  detail::require_finite_nonnegative(exit_speed, "exit speed");
  const double vmax = params.max_speed;
  const double a = params.acceleration;
  const double b = params.deceleration;
  if (entry_speed > vmax * (1.0 + 1e-12) || exit_speed > vmax * (1.0 + 1e-12)) {
    throw std::invalid_argument("entry and exit speeds must not exceed max_speed");
  }
  entry_speed = std::min(entry_speed, vmax);
  exit_speed = std::min(exit_speed, vmax);

  const double needed = detail::ramp_distance(entry_speed, exit_speed, a, b);
  if (needed > distance + 1e-12 * std::max(1.0, distance)) {
    throw PlanningError("distance " + std::to_string(distance) + " m is too short to change speed from " +
                        std::to_string(entry_speed) + " to " + std::to_string(exit_speed) + " m/s");
  }

  // Peak of the unconstrained triangle: up-ramp plus down-ramp fills the distance.
  double peak_sq = (2.0 * a * b * distance + b * entry_speed * entry_speed + a * exit_speed * exit_speed) / (a + b);
  double peak = std::min(vmax, std::sqrt(std::max(0.0, peak_sq)));
  peak = std::max({peak, entry_speed, exit_speed});

  double up = (peak * peak - entry_speed * entry_speed) / (2.0 * a);
  double down = (peak * peak - exit_speed * exit_speed) / (2.0 * b);
  double cruise = std::max(0.0, distance - up - down);

  std::vector<MotionPhase> phases;
  detail::push_phase(phases, entry_speed, a, (peak - entry_speed) / a);
  if (peak > 0.0) detail::push_phase(phases, peak, 0.0, cruise / peak);
  detail::push_phase(phases, peak, -b, (peak - exit_speed) / b);
  return MotionProfile(std::move(phases), entry_speed);
}

namespace detail {

inline constexpr double kIncreaseFactor = 1.25;
inline constexpr double kDecreaseFactor = 0.8;

// Forward simulation of a speed controller that tracks a modulated target
// speed and stops (or leaves at speed, for a carried exit) exactly at the
// end of the path. Every phase has constant acceleration and phase ends are
// found analytically, so the covered distance is exact up to rounding.
class ProfileBuilder {
 public:
  ProfileBuilder(double length, double entry_speed, const SpeedParams& params, const ControlSpec& spec)
      : length_(length), params_(params), carry_exit_(spec.exit == EdgeMarker::carry) {
    v_ = entry_ = entry_speed;
    target_ = params.max_speed;
    up_ = spec.entry == EdgeMarker::hard ? params.hard_acceleration : params.acceleration;
    exit_rate_ = spec.exit == EdgeMarker::hard ? params.hard_deceleration : params.deceleration;
    if (!carry_exit_ && v_ * v_ > envelope_sq() * (1.0 + 1e-12) + 1e-15) {
      throw PlanningError("distance " + std::to_string(length) + " m is too short to stop from " +
                          std::to_string(entry_speed) + " m/s");
    }
  }

  MotionProfile run(std::span<const SpeedAction> interior, double window) {
    for (std::size_t k = 0; k < interior.size() && !done_; ++k) {
      double window_end = window * static_cast<double>(k + 1);
      apply(interior[k]);
      while (!done_ && t_ < window_end) track(window_end - t_, window_end);
    }
    while (!done_) track(std::numeric_limits<double>::infinity(), 0.0);
    return MotionProfile(std::move(phases_), entry_);
  }

 private:
  double envelope_sq() const { return 2.0 * exit_rate_ * (length_ - s_); }

  void apply(SpeedAction action) {
    switch (action) {
      case SpeedAction::increase: target_ = std::min(target_ * kIncreaseFactor, params_.physical_max); break;
      case SpeedAction::decrease: target_ = std::min(target_ * kDecreaseFactor, params_.physical_max); break;
      case SpeedAction::hold: break;
      case SpeedAction::jump:
        if (v_ > 0.0) advance(-params_.hard_deceleration, std::numeric_limits<double>::infinity(), 0.0);
        up_ = params_.hard_acceleration;
        break;
    }
  }

  void track(double limit, double window_end) {
    bool limited = false;
    if (v_ < target_) {
      limited = advance(up_, limit, target_);
      if (!done_ && v_ >= target_) up_ = params_.acceleration;
    } else if (v_ > target_) {
      limited = advance(-params_.deceleration, limit, target_);
    } else {
      limited = advance(0.0, limit, target_);
    }
    if (limited && std::isfinite(limit)) t_ = window_end;
  }

  // One constant-acceleration phase lasting at most `limit`, stopping early
  // at speed `stop_at`, at the braking envelope, or at the end of the path.
  // Returns true when the phase ran for the whole `limit`.
  bool advance(double accel, double limit, double stop_at) {
    if (!carry_exit_ && v_ * v_ >= envelope_sq()) {
      finish_braking();
      return false;
    }
    double tau = limit;
    bool limited = true;
    if (accel != 0.0) {
      double to_stop = (stop_at - v_) / accel;
      if (to_stop <= tau) {
        tau = to_stop;
        limited = false;
      }
    }
    double v1 = !limited ? stop_at : accel == 0.0 ? v_ : std::max(0.0, v_ + accel * tau);
    double dx = std::isfinite(tau) ? (v_ + v1) * 0.5 * tau : std::numeric_limits<double>::infinity();

    if (carry_exit_) {
      double remaining = length_ - s_;
      if (dx >= remaining) {
        double v_end = std::sqrt(std::max(0.0, v_ * v_ + 2.0 * accel * remaining));
        double dt = accel != 0.0 ? (v_end - v_) / accel : remaining / v_;
        push(accel, dt, v_end);
        s_ = length_;
        done_ = true;
        return false;
      }
    } else {
      // Braking envelope v^2 = 2 b (L - s) meets v^2 = v0^2 + 2 a x at x*.
      double closing = accel + exit_rate_;
      if (closing > 0.0) {
        double x_hit = (envelope_sq() - v_ * v_) / (2.0 * closing);
        if (x_hit <= dx) {
          double v_hit = std::sqrt(std::max(0.0, v_ * v_ + 2.0 * accel * x_hit));
          double dt = accel != 0.0 ? (v_hit - v_) / accel : x_hit / v_;
          push(accel, dt, v_hit);
          s_ += x_hit;
          finish_braking();
          return false;
        }
      }
    }
    push(accel, tau, v1);
    s_ += dx;
    return limited;
  }

  void finish_braking() {
    push(-exit_rate_, v_ / exit_rate_, 0.0);
    s_ = length_;
    done_ = true;
  }

  void push(double accel, double dt, double v_end) {
    if (dt > 0.0) {
      phases_.push_back({dt, v_, accel});
      t_ += dt;
    }
    v_ = v_end;
  }

  double length_;
  SpeedParams params_;
  bool carry_exit_;
  double exit_rate_ = 0.0;
  double up_ = 0.0;
  double target_ = 0.0;
  double entry_ = 0.0;
  double t_ = 0.0;
  double s_ = 0.0;
  double v_ = 0.0;
  bool done_ = false;
  std::vector<MotionPhase> phases_;
};

}  // namespace detail

/// Speed profile of one instruction with its control string applied.
///
/// A carried entry starts at `previous_exit_speed`; a carried exit leaves at
/// whatever speed the robot has when it reaches the end of the path. Interior
/// actions each own an equal slice of the unmodulated duration: `+` and `-`
/// scale the target speed by 1.25 and 0.8, `!` brakes to a standstill and
/// relaunches at the hard rates.
inline MotionProfile apply_control(double length, const SpeedParams& params, const ControlSpec& spec,
                                   double previous_exit_speed) {
  detail::require_finite_nonnegative(length, "path length");
  detail::require_finite_nonnegative(previous_exit_speed, "previous exit speed");
  double entry = spec.entry == EdgeMarker::carry ? previous_exit_speed : 0.0;

  if (spec.interior.empty() && spec.exit != EdgeMarker::carry && entry <= params.max_speed) {
    SpeedParams shaped = params;
    if (spec.entry == EdgeMarker::hard) shaped.acceleration = params.hard_acceleration;
    if (spec.exit == EdgeMarker::hard) shaped.deceleration = params.hard_deceleration;
    return base_profile(length, shaped, entry, 0.0);
  }

  auto build = [&](std::span<const SpeedAction> interior, double window) {
    return detail::ProfileBuilder(length, entry, params, spec).run(interior, window);
  };
  if (spec.interior.empty()) return build({}, 0.0);
  double nominal = build({}, 0.0).duration();
  return build(spec.interior, nominal / static_cast<double>(spec.interior.size()));
}

// ---------------------------------------------------------------------------
// Settings

enum class SettingKind { max_speed, acceleration, deceleration };
enum class SpeedConstant { max, std };

inline const char* to_string(SettingKind k) {
  switch (k) {
    case SettingKind::max_speed: return "maxSpeed";
    case SettingKind::acceleration: return "acceleration";
    case SettingKind::deceleration: return "deceleration";
  }
  return "?";
}

inline const char* to_string(SpeedConstant c) { return c == SpeedConstant::max ? "max" : "std"; }

using SettingValue = std::variant<double, SpeedConstant>;

/// A speed setting, either for one robot or (robot empty) for all of them.
struct Setting {
  std::optional<std::size_t> robot;
  SettingKind kind = SettingKind::max_speed;
  SettingValue value = 1.0;
};

/// Current and standard speed parameters of every robot, by robot index.
struct SpeedTable {
  std::vector<SpeedParams> current;
  std::vector<SpeedParams> standard;

  explicit SpeedTable(std::vector<SpeedParams> defaults) : current(defaults), standard(std::move(defaults)) {}
};

namespace detail {

inline void apply_setting_to(const Setting& setting, SpeedParams& p, const SpeedParams& standard) {
  double value = 0.0;
  if (const double* v = std::get_if<double>(&setting.value)) {
    if (!(std::isfinite(*v) && *v > 0.0)) {
      throw std::invalid_argument(std::string(to_string(setting.kind)) + " must be a positive number");
    }
    value = *v;
  } else if (std::get<SpeedConstant>(setting.value) == SpeedConstant::max) {
    switch (setting.kind) {
      case SettingKind::max_speed: value = p.physical_max; break;
      case SettingKind::acceleration: value = p.hard_acceleration; break;
      case SettingKind::deceleration: value = p.hard_deceleration; break;
    }
  } else {
    switch (setting.kind) {
      case SettingKind::max_speed: value = standard.max_speed; break;
      case SettingKind::acceleration: value = standard.acceleration; break;
      case SettingKind::deceleration: value = standard.deceleration; break;
    }
  }
  SpeedParams next = p;
  switch (setting.kind) {
    case SettingKind::max_speed: next.max_speed = value; break;
    case SettingKind::acceleration: next.acceleration = value; break;
    case SettingKind::deceleration: next.deceleration = value; break;
  }
  next.validate();
  p = next;
}

}  // namespace detail

/// Applies one speed setting; `max` and `std` resolve per robot.
///
/// Throws std::invalid_argument for non-positive values or values beyond the
/// robot's physical limits; the table is left unchanged in that case.
inline void apply_settings(const Setting& setting, SpeedTable& table) {
  if (setting.robot) {
    std::size_t r = *setting.robot;
    if (r >= table.current.size()) throw std::out_of_range("setting names an unknown robot");
    detail::apply_setting_to(setting, table.current[r], table.standard[r]);
    return;
  }
  std::vector<SpeedParams> next = table.current;
  for (std::size_t r = 0; r < next.size(); ++r) detail::apply_setting_to(setting, next[r], table.standard[r]);
  table.current = std::move(next);
}

}  // namespace ccr
