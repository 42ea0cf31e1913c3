#pragma once

// `ccrsim` command line:
//
//   ccrsim run <file.ccr> [--dt S] [--trace PATH|-] [--svg PATH] [--report PATH|-]
//                         [--config PATH] [--strict]
//   ccrsim check <file.ccr> [--config PATH]
//
// Exit codes: 0 ok, 1 script or config error, 2 planning error,
// 3 warnings under --strict, 4 output could not be written, 64 usage error.

#include <fstream>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "ccr/config.hpp"
#include "ccr/error.hpp"
#include "ccr/report.hpp"
#include "ccr/scheduler.hpp"
#include "ccr/script.hpp"
#include "ccr/svg.hpp"
#include "ccr/trace.hpp"
#include "ccr/validation.hpp"

namespace ccr {

enum ExitCode : int {
  exit_ok = 0,
  exit_script = 1,
  exit_planning = 2,
  exit_warnings = 3,
  exit_output = 4,
  exit_usage = 64,
};

namespace detail {

struct OutputError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

inline std::optional<std::string> read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) return std::nullopt;
  std::ostringstream ss;
  ss << in.rdbuf();
  if (in.bad()) return std::nullopt;
  return ss.str();
}

inline void emit(const std::string& path, const std::string& content, std::ostream& out) {
  if (path == "-") {
    out << content;
    out.flush();
    if (!out) throw OutputError("cannot write to standard output");
    return;
  }
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw OutputError("cannot open '" + path + "' for writing");
  f << content;
  f.close();
  if (!f) throw OutputError("cannot write '" + path + "'");
}

}  // namespace detail

/// Runs the simulator; `args` excludes the program name.
inline int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"CCRScript interpreter and headless choreography simulator", "ccrsim"};
  app.require_subcommand(1);

  std::string script_path;
  std::string config_path;
  double dt = kDefaultScanStep;
  std::string trace_path;
  std::string svg_path;
  std::string report_path;
  bool strict = false;

  CLI::App* run = app.add_subcommand("run", "simulate a script and write the requested outputs");
  run->add_option("script", script_path, "script file (.ccr)")->required();
  run->add_option("--dt", dt, "sampling interval for trace and scene checks, seconds")
      ->check(CLI::PositiveNumber);
  run->add_option("--trace", trace_path, "pose trace as JSON lines ('-' for standard output)");
  run->add_option("--svg", svg_path, "SVG drawing of scene and trajectories");
  run->add_option("--report", report_path, "timing report ('-' for standard output)");
  run->add_option("--config", config_path, "robot defaults (key = value)");
  run->add_flag("--strict", strict, "exit with status 3 when any warning is issued");

  CLI::App* check = app.add_subcommand("check", "parse and plan a script without writing outputs");
  check->add_option("script", script_path, "script file (.ccr)")->required();
  check->add_option("--config", config_path, "robot defaults (key = value)");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e, out, err);
    return code == 0 ? exit_ok : exit_usage;
  }

  auto diagnose = [&](const std::string& where, const Error& e) {
    err << where;
    if (e.loc().known()) err << ":" << to_string(e.loc());
    err << ": error: " << e.message() << "\n";
  };

  Config config;
  if (!config_path.empty()) {
    auto text = detail::read_file(config_path);
    if (!text) {
      err << config_path << ": error: cannot read file\n";
      return exit_script;
    }
    try {
      config = parse_config(*text);
    } catch (const Error& e) {
      diagnose(config_path, e);
      return exit_script;
    }
  }

  auto source = detail::read_file(script_path);
  if (!source) {
    err << script_path << ": error: cannot read file\n";
    return exit_script;
  }

  InstructionStream stream;
  Timeline timeline;
  try {
    stream = load_script(*source);
  } catch (const Error& e) {
    diagnose(script_path, e);
    return exit_script;
  } catch (const std::exception& e) {
    err << script_path << ": error: " << e.what() << "\n";
    return exit_script;
  }
  try {
    timeline = schedule(stream, config);
  } catch (const Error& e) {
    diagnose(script_path, e);
    return exit_planning;
  } catch (const std::exception& e) {
    err << script_path << ": error: " << e.what() << "\n";
    return exit_planning;
  }

  std::size_t warnings = 0;
  for (const auto& note : timeline.notes) {
    err << script_path;
    if (note.loc.known()) err << ":" << to_string(note.loc);
    err << ": warning: " << note.message << "\n";
    ++warnings;
  }

  if (check->parsed()) {
    out << script_path << ": ok, " << timeline.robots.size() << " robot(s), " << stream.instructions.size()
        << " instruction(s), total " << fixed(timeline.duration, 3) << " s\n";
    return exit_ok;
  }

  for (const auto& w : scan_timeline(stream.scene, timeline, dt)) {
    err << script_path << ": warning: " << describe(w, timeline) << "\n";
    ++warnings;
  }

  try {
    if (!trace_path.empty()) {
      std::ostringstream trace;
      write_trace(timeline, dt, trace);
      detail::emit(trace_path, trace.str(), out);
    }
    if (!svg_path.empty()) detail::emit(svg_path, render_svg(stream.scene, timeline), out);
    if (!report_path.empty()) detail::emit(report_path, write_report(stream, timeline), out);
  } catch (const detail::OutputError& e) {
    err << "error: " << e.what() << "\n";
    return exit_output;
  }

  return strict && warnings > 0 ? exit_warnings : exit_ok;
}

}  // namespace ccr
