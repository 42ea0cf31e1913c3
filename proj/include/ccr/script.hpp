#pragma once

// Evaluation of a parsed script into a flat, ordered instruction stream.

#include <array>
#include <cmath>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "ccr/error.hpp"
#include "ccr/format.hpp"
#include "ccr/geometry.hpp"
#include "ccr/motion.hpp"
#include "ccr/parser.hpp"
#include "ccr/scene.hpp"

namespace ccr {

// ---------------------------------------------------------------------------
// Values

struct RobotRef {
  std::size_t index = 0;
  friend bool operator==(const RobotRef&, const RobotRef&) = default;
};

using Value = std::variant<double, std::string, Color, Pose, RobotRef, SpeedConstant>;

inline const char* type_name(const Value& v) {
  static constexpr std::array<const char*, 6> names{"number", "text", "color", "pose", "robot", "speed constant"};
  return names[v.index()];
}

inline constexpr std::array<std::string_view, 16> kCompassNames{
    "north", "nne", "northEast", "ene", "east", "ese", "southEast", "sse",
    "south", "ssw", "southWest", "wsw", "west", "wnw", "northWest", "nnw"};

/// Compass degrees of one of the 16 wind-rose names, north = 0.
inline std::optional<double> resolve_direction(std::string_view name) {
  for (std::size_t k = 0; k < kCompassNames.size(); ++k) {
    if (kCompassNames[k] == name) return 22.5 * static_cast<double>(k);
  }
  return std::nullopt;
}

/// Names bound by `let` and procedure parameters, innermost scope first.
class Environment {
 public:
  Environment(double scene_width, double scene_depth, const std::map<std::string, std::size_t>* robots = nullptr)
      : width_(scene_width), depth_(scene_depth), robots_(robots) {}

  void push_scope() { scopes_.emplace_back(); }
  void pop_scope() { scopes_.pop_back(); }

  /// Binds in the innermost scope; a name may be bound once per scope.
  bool bind(const std::string& name, Value v) {
    if (scopes_.empty()) push_scope();
    return scopes_.back().emplace(name, std::move(v)).second;
  }

  std::optional<Value> lookup(const std::string& name) const {
    for (auto it = scopes_.rbegin(); it != scopes_.rend(); ++it) {
      if (auto f = it->find(name); f != it->end()) return f->second;
    }
    if (robots_) {
      if (auto f = robots_->find(name); f != robots_->end()) return RobotRef{f->second};
    }
    if (name == "sw" || name == "sceneWidth") return width_;
    if (name == "hsw") return width_ / 2.0;
    if (name == "sd" || name == "sceneDepth") return depth_;
    if (name == "m") return 1.0;
    if (name == "max") return SpeedConstant::max;
    if (name == "std") return SpeedConstant::std;
    if (auto d = resolve_direction(name)) return *d;
    return std::nullopt;
  }

  /// Top-level bindings, visible from inside procedures.
  std::map<std::string, Value> outermost() const { return scopes_.empty() ? std::map<std::string, Value>{} : scopes_.front(); }

  double scene_width() const { return width_; }
  double scene_depth() const { return depth_; }

 private:
  double width_;
  double depth_;
  const std::map<std::string, std::size_t>* robots_;
  std::vector<std::map<std::string, Value>> scopes_;
};

namespace detail {

inline double as_number(const Value& v, const SourceLoc& loc, const char* what) {
  if (const double* d = std::get_if<double>(&v)) return *d;
  throw ScriptError(std::string(what) + " must be a number, got " + type_name(v), loc);
}

inline std::uint8_t as_channel(const Value& v, const SourceLoc& loc) {
  double c = as_number(v, loc, "color channel");
  if (!(c >= 0.0 && c <= 255.0) || c != std::floor(c)) {
    throw ScriptError("color channel must be an integer in [0, 255], got " + compact(c), loc);
  }
  return static_cast<std::uint8_t>(c);
}

}  // namespace detail

/// Evaluates arithmetic, names and the `pose`/`color` constructors.
inline Value eval_expr(const Expr& e, const Environment& env) {
  switch (e.kind) {
    case Expr::Kind::number: return e.number;
    case Expr::Kind::string: return e.text;
    case Expr::Kind::name: {
      if (auto v = env.lookup(e.text)) return *v;
      throw ScriptError("unbound identifier '" + e.text + "'", e.loc);
    }
    case Expr::Kind::negate: {
      Value v = eval_expr(e.args[0], env);
      return -detail::as_number(v, e.loc, "operand of unary '-'");
    }
    case Expr::Kind::binary: {
      Value lv = eval_expr(e.args[0], env);
      Value rv = eval_expr(e.args[1], env);
      if (!std::holds_alternative<double>(lv) || !std::holds_alternative<double>(rv)) {
        throw ScriptError(std::string("cannot apply '") + e.op + "' to " + type_name(lv) + " and " + type_name(rv), e.loc);
      }
      double l = std::get<double>(lv);
      double r = std::get<double>(rv);
      switch (e.op) {
        case '+': return l + r;
        case '-': return l - r;
        case '*': return l * r;
        case '/':
          if (r == 0.0) throw ScriptError("division by zero", e.loc);
          return l / r;
      }
      throw ScriptError(std::string("unknown operator '") + e.op + "'", e.loc);
    }
    case Expr::Kind::call: {
      std::vector<Value> args;
      for (const auto& a : e.args) args.push_back(eval_expr(a, env));
      if (e.text == "pose") {
        if (args.size() != 3) throw ScriptError("pose(x, y, heading) takes 3 arguments", e.loc);
        double x = detail::as_number(args[0], e.args[0].loc, "pose x");
        double y = detail::as_number(args[1], e.args[1].loc, "pose y");
        double h = detail::as_number(args[2], e.args[2].loc, "pose heading");
        if (!std::isfinite(x) || !std::isfinite(y) || !std::isfinite(h)) throw ScriptError("pose must be finite", e.loc);
        return Pose(x, y, h);
      }
      if (e.text == "color") {
        if (args.size() != 3) throw ScriptError("color(r, g, b) takes 3 arguments", e.loc);
        return Color{detail::as_channel(args[0], e.args[0].loc), detail::as_channel(args[1], e.args[1].loc),
                     detail::as_channel(args[2], e.args[2].loc)};
      }
      throw ScriptError("unknown function '" + e.text + "'", e.loc);
    }
  }
  throw ScriptError("malformed expression", e.loc);
}

// ---------------------------------------------------------------------------
// Instruction stream

struct RobotInfo {
  std::string name;          // script variable, used in all outputs
  std::string display_name;  // first argument of robot(...)
  Color color;
};

struct InitialPose {
  std::size_t robot = 0;
  Pose pose;
};

struct MoveTo {
  std::size_t robot = 0;
  Pose goal;
  Travel travel = Travel::forward;
  std::string control;
};

struct MoveStraight {
  std::size_t robot = 0;
  double distance = 0.0;
  Travel travel = Travel::forward;
  std::string control;
};

struct MoveArc {
  std::size_t robot = 0;
  double radius = 1.0;
  double angle = 0.0;
  Side side = Side::right;
  Travel travel = Travel::forward;
  std::string control;
};

struct Wait {
  std::size_t robot = 0;
  double seconds = 0.0;
};

struct Synchronize {
  std::vector<std::size_t> robots;  // ascending robot index
  bool all = false;                 // written without arguments
};

using Operation = std::variant<InitialPose, MoveTo, MoveStraight, MoveArc, Wait, Synchronize, Setting>;

struct Instruction {
  Operation op;
  SourceLoc loc;
  std::string text;  // canonical form without the robot argument, e.g. "wait(2)"
};

/// Robot index an instruction is bound to; empty for barriers and global settings.
inline std::optional<std::size_t> bound_robot(const Instruction& ins) {
  return std::visit(
      [](const auto& op) -> std::optional<std::size_t> {
        using T = std::decay_t<decltype(op)>;
        if constexpr (std::is_same_v<T, Synchronize>) {
          return std::nullopt;
        } else {
          return op.robot;
        }
      },
      ins.op);
}

struct InstructionStream {
  Scene scene;
  std::vector<RobotInfo> robots;
  std::vector<Instruction> instructions;

  std::optional<std::size_t> find_robot(std::string_view name) const {
    for (std::size_t i = 0; i < robots.size(); ++i) {
      if (robots[i].name == name) return i;
    }
    return std::nullopt;
  }
};

struct ExpandOptions {
  int max_call_depth = 64;
  std::size_t max_instructions = 1'000'000;
};

namespace detail {

class Expander {
 public:
  Expander(const ScriptAst& ast, ExpandOptions opts) : ast_(ast), opts_(opts) {}

  InstructionStream run() {
    std::optional<double> width;
    std::optional<double> depth;
    for (const auto& item : ast_.items) {
      if (const auto* dim = std::get_if<SceneDim>(&item.node)) {
        Environment bare(0.0, 0.0);
        double v = as_number(eval_expr(dim->value, bare), dim->value.loc, dim->is_width ? "sceneWidth" : "sceneDepth");
        if (!(std::isfinite(v) && v > 0.0)) throw ScriptError("scene dimensions must be positive", item.loc);
        (dim->is_width ? width : depth) = v;
      } else if (const auto* proc = std::get_if<ProcDef>(&item.node)) {
        procs_[proc->name] = proc;
      }
    }
    if (!width || !depth) throw ScriptError("the script does not declare sceneWidth and sceneDepth", SourceLoc{1, 1});
    out_.scene = Scene(*width, *depth);
    env_.emplace(*width, *depth, &robot_index_);
    env_->push_scope();
    placed_.clear();

    for (const auto& item : ast_.items) exec(item, 0);
    return std::move(out_);
  }

 private:
  void exec(const Stmt& s, int depth) {
    std::visit([&](const auto& node) { exec_node(node, s, depth); }, s.node);
  }

  void exec_node(const SceneDim&, const Stmt&, int) {}
  void exec_node(const ProcDef&, const Stmt&, int) {}

  void exec_node(const RobotDecl& decl, const Stmt& s, int) {
    if (robot_index_.count(decl.name)) throw ScriptError("robot '" + decl.name + "' is already declared", s.loc);
    if (decl.args.size() != 2) throw ScriptError("robot(name, color) takes 2 arguments", s.loc);
    Value name = eval_expr(decl.args[0], *env_);
    Value color = eval_expr(decl.args[1], *env_);
    if (!std::holds_alternative<std::string>(name)) throw ScriptError("robot name must be text", decl.args[0].loc);
    if (!std::holds_alternative<Color>(color)) throw ScriptError("robot color must be a color", decl.args[1].loc);
    robot_index_[decl.name] = out_.robots.size();
    out_.robots.push_back({decl.name, std::get<std::string>(name), std::get<Color>(color)});
    placed_.push_back(false);
  }

  void exec_node(const LetDecl& decl, const Stmt& s, int) {
    if (!env_->bind(decl.name, eval_expr(decl.value, *env_))) {
      throw ScriptError("'" + decl.name + "' is already defined in this scope", s.loc);
    }
  }

  void exec_node(const Repeat& rep, const Stmt& s, int depth) {
    double n = as_number(eval_expr(rep.count, *env_), rep.count.loc, "repeat count");
    if (!(n >= 0.0) || n != std::floor(n) || n > 1e9) {
      throw ScriptError("repeat count must be a non-negative integer, got " + compact(n), s.loc);
    }
    for (long long i = 0; i < static_cast<long long>(n); ++i) {
      env_->push_scope();
      for (const auto& inner : rep.body) exec(inner, depth);
      env_->pop_scope();
    }
  }

  void exec_node(const CallStmt& call, const Stmt& s, int depth) {
    std::vector<Value> args;
    args.reserve(call.args.size());
    for (const auto& a : call.args) args.push_back(eval_expr(a, *env_));

    if (auto it = procs_.find(call.name); it != procs_.end()) {
      const ProcDef& proc = *it->second;
      if (args.size() != proc.params.size()) {
        throw ScriptError("'" + proc.name + "' takes " + std::to_string(proc.params.size()) + " arguments, got " +
                              std::to_string(args.size()),
                          s.loc);
      }
      if (depth + 1 > opts_.max_call_depth) {
        throw ScriptError("procedure calls nest deeper than " + std::to_string(opts_.max_call_depth) + " levels", s.loc);
      }
      // Procedures see globals and their own parameters, not the caller's locals.
      Environment saved = std::move(*env_);
      env_.emplace(out_.scene.width(), out_.scene.depth(), &robot_index_);
      env_->push_scope();
      for (const auto& [name, value] : saved.outermost()) env_->bind(name, value);
      env_->push_scope();
      for (std::size_t i = 0; i < args.size(); ++i) env_->bind(proc.params[i], args[i]);
      for (const auto& inner : proc.body) exec(inner, depth + 1);
      env_ = std::move(saved);
      return;
    }
    builtin(call, args, s.loc);
  }

  // -- built-in instructions ------------------------------------------------

  void builtin(const CallStmt& call, const std::vector<Value>& args, const SourceLoc& loc) {
    const std::string& n = call.name;
    auto arg_loc = [&](std::size_t i) { return i < call.args.size() ? call.args[i].loc : loc; };

    auto number = [&](std::size_t i, const char* what) { return as_number(args[i], arg_loc(i), what); };
    auto robot = [&](std::size_t i) {
      if (const auto* r = std::get_if<RobotRef>(&args[i])) return r->index;
      throw ScriptError(n + ": argument " + std::to_string(i + 1) + " must be a robot, got " + type_name(args[i]), arg_loc(i));
    };
    auto text = [&](std::size_t i, const char* what) {
      if (const auto* t = std::get_if<std::string>(&args[i])) return *t;
      throw ScriptError(std::string(what) + " must be text, got " + type_name(args[i]), arg_loc(i));
    };
    auto color = [&](std::size_t i) {
      if (const auto* c = std::get_if<Color>(&args[i])) return *c;
      throw ScriptError(n + ": argument " + std::to_string(i + 1) + " must be a color", arg_loc(i));
    };
    auto arity = [&](std::initializer_list<std::size_t> allowed, const char* usage) {
      for (auto a : allowed) {
        if (args.size() == a) return;
      }
      throw ScriptError(std::string("usage: ") + usage, loc);
    };
    auto placed = [&](std::size_t r) {
      if (!placed_[r]) throw ScriptError("robot '" + out_.robots[r].name + "' is used before its initialPose", loc);
    };
    // Either (x, y, heading) or one pose value starting at argument i.
    auto pose_at = [&](std::size_t i, bool expanded) {
      if (expanded) {
        double x = number(i, "x");
        double y = number(i + 1, "y");
        double h = number(i + 2, "heading");
        if (!std::isfinite(x) || !std::isfinite(y) || !std::isfinite(h)) throw ScriptError("pose must be finite", loc);
        return Pose(x, y, h);
      }
      if (const auto* p = std::get_if<Pose>(&args[i])) return *p;
      throw ScriptError(n + ": argument " + std::to_string(i + 1) + " must be a pose", arg_loc(i));
    };
    auto control = [&](std::size_t i) { return i < args.size() ? text(i, "control string") : std::string(); };
    auto with_control = [](std::string s, const std::string& ctrl) {
      if (!ctrl.empty()) s += ", \"" + ctrl + "\"";
      return s + ")";
    };

    if (n == "initialPose") {
      arity({2, 4}, "initialPose(robot, x, y, heading) or initialPose(robot, pose)");
      std::size_t r = robot(0);
      if (placed_[r]) throw ScriptError("robot '" + out_.robots[r].name + "' already has an initialPose", loc);
      Pose p = pose_at(1, args.size() == 4);
      placed_[r] = true;
      emit(InitialPose{r, p}, loc, "initialPose(" + pose_text(p) + ")");
    } else if (n == "moveTo" || n == "moveToBacking") {
      arity({2, 3, 4, 5}, "moveTo(robot, x, y, heading [, control]) or moveTo(robot, pose [, control])");
      std::size_t r = robot(0);
      bool expanded = args.size() >= 4;
      if (!expanded && args.size() == 3 && !std::holds_alternative<Pose>(args[1])) {
        throw ScriptError(std::string("usage: ") + n + "(robot, x, y, heading [, control]) or " + n + "(robot, pose [, control])", loc);
      }
      Pose goal = pose_at(1, expanded);
      std::string ctrl = control(expanded ? 4 : 2);
      placed(r);
      Travel travel = n == "moveTo" ? Travel::forward : Travel::backing;
      emit(MoveTo{r, goal, travel, ctrl}, loc, with_control(n + "(" + pose_text(goal), ctrl));
    } else if (n == "move" || n == "moveBacking") {
      arity({2, 3}, "move(robot, distance [, control])");
      std::size_t r = robot(0);
      double d = number(1, "distance");
      if (!(std::isfinite(d) && d >= 0.0)) throw ScriptError("distance must be a non-negative number, got " + compact(d), arg_loc(1));
      std::string ctrl = control(2);
      placed(r);
      Travel travel = n == "move" ? Travel::forward : Travel::backing;
      emit(MoveStraight{r, d, travel, ctrl}, loc, with_control(n + "(" + compact(d), ctrl));
    } else if (n == "circleRight" || n == "circleLeft" || n == "circleRightBacking" || n == "circleLeftBacking") {
      arity({3, 4}, "circleRight(robot, radius, angle [, control])");
      std::size_t r = robot(0);
      double radius = number(1, "radius");
      double angle = number(2, "angle");
      if (!(std::isfinite(radius) && radius > 0.0)) throw ScriptError("radius must be positive, got " + compact(radius), arg_loc(1));
      if (!(std::isfinite(angle) && angle >= 0.0)) throw ScriptError("angle must be non-negative, got " + compact(angle), arg_loc(2));
      std::string ctrl = control(3);
      placed(r);
      Side side = n.rfind("circleRight", 0) == 0 ? Side::right : Side::left;
      Travel travel = n.ends_with("Backing") ? Travel::backing : Travel::forward;
      emit(MoveArc{r, radius, angle, side, travel, ctrl}, loc,
           with_control(n + "(" + compact(radius) + ", " + compact(angle), ctrl));
    } else if (n == "wait") {
      arity({2}, "wait(robot, seconds)");
      std::size_t r = robot(0);
      double secs = number(1, "wait time");
      if (!(std::isfinite(secs) && secs >= 0.0)) throw ScriptError("wait time must be non-negative, got " + compact(secs), arg_loc(1));
      placed(r);
      emit(Wait{r, secs}, loc, "wait(" + compact(secs) + ")");
    } else if (n == "synchronize") {
      Synchronize sync;
      std::string names;
      if (args.empty()) {
        sync.all = true;
        for (std::size_t r = 0; r < out_.robots.size(); ++r) sync.robots.push_back(r);
      } else {
        for (std::size_t i = 0; i < args.size(); ++i) {
          std::size_t r = robot(i);
          if (std::find(sync.robots.begin(), sync.robots.end(), r) != sync.robots.end()) {
            throw ScriptError("synchronize lists robot '" + out_.robots[r].name + "' twice", arg_loc(i));
          }
          sync.robots.push_back(r);
          names += (i ? ", " : "") + out_.robots[r].name;
        }
        std::sort(sync.robots.begin(), sync.robots.end());
      }
      for (std::size_t r : sync.robots) placed(r);
      emit(std::move(sync), loc, "synchronize(" + names + ")");
    } else if (n == "maxSpeed" || n == "acceleration" || n == "deceleration") {
      arity({1, 2}, "maxSpeed([robot,] value)");
      Setting setting;
      setting.kind = n == "maxSpeed" ? SettingKind::max_speed
                     : n == "acceleration" ? SettingKind::acceleration
                                           : SettingKind::deceleration;
      std::size_t vi = args.size() - 1;
      std::string prefix;
      if (args.size() == 2) {
        setting.robot = robot(0);
        prefix = out_.robots[*setting.robot].name + ", ";
      }
      if (const auto* c = std::get_if<SpeedConstant>(&args[vi])) {
        setting.value = *c;
      } else {
        double v = number(vi, "setting value");
        if (!(std::isfinite(v) && v > 0.0)) throw ScriptError(n + " must be positive, got " + compact(v), arg_loc(vi));
        setting.value = v;
      }
      std::string shown = std::holds_alternative<double>(setting.value) ? compact(std::get<double>(setting.value))
                                                                         : to_string(std::get<SpeedConstant>(setting.value));
      emit(std::move(setting), loc, n + "(" + prefix + shown + ")");
    } else if (n == "grid") {
      arity({0}, "grid()");
      out_.scene.enable_grid();
    } else if (n == "referencePoint") {
      arity({3}, "referencePoint(color, x, y)");
      out_.scene.add_reference_point({color(0), number(1, "x"), number(2, "y")});
    } else if (n == "forbiddenArea") {
      arity({6}, "forbiddenArea(name, color, x1, y1, x2, y2)");
      ForbiddenArea area{text(0, "area name"), color(1),
                         Rect::from_corners(number(2, "x1"), number(3, "y1"), number(4, "x2"), number(5, "y2"))};
      try {
        out_.scene.add_area(std::move(area));
      } catch (const std::invalid_argument& e) {
        throw ScriptError(e.what(), loc);
      }
    } else if (n == "pose" || n == "color" || n == "robot") {
      throw ScriptError("'" + n + "(...)' is a value, not an instruction", loc);
    } else {
      throw ScriptError("call to undefined procedure '" + n + "'", loc);
    }
  }

  static std::string pose_text(const Pose& p) { return compact(p.x) + ", " + compact(p.y) + ", " + compact(p.heading); }

  void emit(Operation op, const SourceLoc& loc, std::string text) {
    if (out_.instructions.size() >= opts_.max_instructions) {
      throw ScriptError("script expands to more than " + std::to_string(opts_.max_instructions) + " instructions", loc);
    }
    out_.instructions.push_back({std::move(op), loc, std::move(text)});
  }

  const ScriptAst& ast_;
  ExpandOptions opts_;
  InstructionStream out_;
  std::map<std::string, const ProcDef*> procs_;
  std::map<std::string, std::size_t> robot_index_;
  std::vector<bool> placed_;
  std::optional<Environment> env_;
};

}  // namespace detail

/// Inlines procedures, unrolls repeats and evaluates every argument.
inline InstructionStream expand(const ScriptAst& ast, ExpandOptions opts = {}) { return detail::Expander(ast, opts).run(); }

/// tokenize + parse + expand.
inline InstructionStream load_script(std::string_view source, ExpandOptions opts = {}) {
  return expand(parse_source(source), opts);
}

}  // namespace ccr
