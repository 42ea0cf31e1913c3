#include <catch_amalgamated.hpp>

#include <cstdlib>
#include <fstream>

#include "ccr/cli.hpp"
#include "oracles.hpp"

using namespace ccr;
using Catch::Matchers::WithinAbs;
namespace fs = std::filesystem;

namespace {

const std::string kHeader =
    "sceneWidth = 10;\nsceneDepth = 5;\n"
    "robot nille = robot(\"Nille\", color(255,0,0));\n"
    "robot frederik = robot(\"Frederik\", color(0,0,255));\n"
    "initialPose(nille, 0, 1, north);\n"
    "initialPose(frederik, 2, 1, north);\n";

std::size_t count(const std::string& text, const std::string& needle) {
  std::size_t n = 0;
  for (auto pos = text.find(needle); pos != std::string::npos; pos = text.find(needle, pos + needle.size())) ++n;
  return n;
}

std::size_t line_count(const std::string& text) { return count(text, "\n"); }

struct TempDir {
  fs::path path;
  TempDir() {
    path = fs::temp_directory_path() / ("ccr-test-" + std::to_string(std::rand()));
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
  fs::path write(const std::string& name, const std::string& text) const {
    std::ofstream(path / name, std::ios::binary) << text;
    return path / name;
  }
};

struct CliResult {
  int code;
  std::string out;
  std::string err;
};

CliResult cli(std::vector<std::string> args) {
  std::ostringstream out, err;
  int code = run_cli(args, out, err);
  return {code, out.str(), err.str()};
}

std::string script(const std::string& name) { return (oracle::scripts_dir() / name).string(); }

}  // namespace

TEST_CASE("trace frames at every sample time") {
  auto tl = schedule(load_script(kHeader + "wait(nille, 2);\n"));
  std::ostringstream trace;
  // Both robots are placed; frederik stays put.
  CHECK(write_trace(tl, 0.5, trace) == 10);

  auto single = schedule(load_script("sceneWidth = 10;\nsceneDepth = 5;\nrobot nille = robot(\"Nille\", color(0,0,0));\n"
                                     "initialPose(nille, 0, 1, north);\nwait(nille, 2);\n"));
  std::ostringstream one;
  CHECK(write_trace(single, 0.5, one) == 5);
  CHECK(one.str().substr(0, one.str().find('\n')) == "{\"t\":0,\"robot\":\"nille\",\"x\":0,\"y\":1,\"heading\":0,\"v\":0}");

  auto both = schedule(load_script(kHeader + "wait(nille, 1);\nwait(frederik, 1);\n"));
  auto frames = trace_frames(both, 0.5);
  REQUIRE(frames.size() == 6);
  // Ordered by time, then robot name.
  CHECK(frames[0].robot == "frederik");
  CHECK(frames[1].robot == "nille");
  CHECK(frames[5].t == 1.0);
}

TEST_CASE("trace follows the arc") {
  auto tl = schedule(load_script(kHeader + "circleLeft(nille, 1, 90);\n"));
  const auto& act = tl.tracks[0].actions.at(0);
  int checked = 0;
  for (const auto& f : trace_frames(tl, 0.05)) {
    if (f.robot != "nille") continue;
    // Counterclockwise about (-1, 1), starting due east of the center.
    double s = act.profile.distance_at(std::min(f.t, act.end));
    double phi = s;
    CHECK_THAT(f.x, WithinAbs(-1.0 + std::cos(phi), 1e-9));
    CHECK_THAT(f.y, WithinAbs(1.0 + std::sin(phi), 1e-9));
    CHECK_THAT(oracle::angle_gap(f.heading, 360.0 - phi * 180.0 / oracle::kPi), WithinAbs(0.0, 1e-9));
    ++checked;
  }
  CHECK(checked > 40);
}

TEST_CASE("trace numbers are compact and never negative zero") {
  auto tl = schedule(load_script(kHeader + "moveBacking(nille, 0.5);\nmove(nille, 0.5);\n"));
  std::ostringstream trace;
  write_trace(tl, 0.1, trace);
  CHECK(trace.str().find("-0,") == std::string::npos);
  CHECK(trace.str().find("-0}") == std::string::npos);
  CHECK(trace.str().find("e+") == std::string::npos);
  CHECK(detail::json_string("a\"b\\c\n") == "\"a\\\"b\\\\c\\u000a\"");
}

TEST_CASE("svg of the furniture scene") {
  auto stream = oracle::load("scene_furniture.ccr");
  auto svg = render_svg(stream.scene, schedule(stream));
  CHECK(svg.rfind("<?xml", 0) == 0);
  CHECK(count(svg, "<g class=\"forbidden\">") == 2);
  CHECK(count(svg, "<circle class=\"refpoint\"") == 2);
  CHECK(count(svg, "<line ") == 11 + 6);
  CHECK(count(svg, "<g") == count(svg, "</g>"));
  CHECK(count(svg, "<polyline") == 0);
  CHECK(svg.find(">green stuff</text>") != std::string::npos);
  CHECK(svg.find("width=\"1100.000\" height=\"600.000\"") != std::string::npos);
  // Reference point at (hsw/2, sd/2) = (2.5, 2.5).
  CHECK(svg.find("cx=\"800.000\" cy=\"300.000\"") != std::string::npos);
  // Top-left corner of green stuff: (-4.5, 3.25).
  CHECK(svg.find("<rect x=\"100.000\" y=\"225.000\" width=\"250.000\" height=\"25.000\"") != std::string::npos);
}

TEST_CASE("svg maps scene points affinely") {
  Scene scene(10, 5);
  oracle::Rng rng(41);
  for (int i = 0; i < 1000; ++i) {
    double x = rng.uniform(-5, 5), y = rng.uniform(0, 5);
    SvgPoint p = to_svg(scene, x, y);
    CHECK_THAT(p.x, WithinAbs((x + 5) * 100 + 50, 1e-9));
    CHECK_THAT(p.y, WithinAbs((5 - y) * 100 + 50, 1e-9));
  }
}

TEST_CASE("svg draws one trajectory per placed robot") {
  auto stream = oracle::load("forbidden.ccr");
  auto svg = render_svg(stream.scene, schedule(stream));
  CHECK(count(svg, "<polyline class=\"trajectory\"") == 2);
  CHECK(count(svg, "data-robot=\"nille\"") == 3);
  CHECK(count(svg, "<polygon class=\"robot-end\"") == 2);
  // nille ends at (-4, 4).
  CHECK(svg.find("150.000,150.000\" fill=\"none\"") != std::string::npos);
}

TEST_CASE("report lines") {
  auto stream = oracle::load("wait.ccr");
  CHECK(write_report(stream, schedule(stream)) ==
        "[t=0.000 +0.000] nille: initialPose(0, 1, 0) → (0.000, 1.000, 0.0)\n"
        "[t=0.000 +2.828] nille: move(1) → (0.000, 2.000, 0.0)\n"
        "[t=2.828 +2.000] nille: wait(2) → (0.000, 2.000, 0.0)\n"
        "[t=4.828 +2.828] nille: move(1) → (0.000, 3.000, 0.0)\n"
        "total: 7.657 s\n");

  auto sync = oracle::load("synchronize.ccr");
  auto report = write_report(sync, schedule(sync));
  CHECK(report.find("[t=2.828 +2.172] nille: synchronize() → (-2.000, 2.000, 0.0)\n") != std::string::npos);
  CHECK(report.find("[t=5.000 +0.000] frederik: synchronize() → (2.000, 4.000, 0.0)\n") != std::string::npos);

  auto settings = oracle::load("settings.ccr");
  CHECK(write_report(settings, schedule(settings)).find("maxSpeed") == std::string::npos);

  auto empty = load_script("sceneWidth = 10;\nsceneDepth = 5;\n");
  CHECK(write_report(empty, schedule(empty)) == "total: 0.000 s\n");
}

TEST_CASE("cli exit codes") {
  TempDir tmp;
  CHECK(cli({"run", script("wait.ccr")}).code == 0);
  CHECK(cli({"check", script("steps.ccr")}).code == 0);
  CHECK(cli({}).code == 64);
  CHECK(cli({"run"}).code == 64);
  CHECK(cli({"run", script("wait.ccr"), "--dt", "0"}).code == 64);

  auto syntax = cli({"run", tmp.write("bad.ccr", "sceneWidth = 10;\nsceneDepth = 5;\nrobot x = ;\n").string()});
  CHECK(syntax.code == 1);
  CHECK(syntax.err.find("bad.ccr:3:") != std::string::npos);
  CHECK(syntax.err.find(": error: ") != std::string::npos);
  CHECK(cli({"run", (tmp.path / "missing.ccr").string()}).code == 1);

  auto planning = cli({"run", tmp.write("tight.ccr", kHeader + "circleLeft(nille, 0.2, 90);\n").string()});
  CHECK(planning.code == 2);
  CHECK(planning.err.find("tight.ccr:7:") != std::string::npos);

  auto loose = cli({"run", script("forbidden.ccr")});
  CHECK(loose.code == 0);
  CHECK(loose.err.find("warning: robot 'nille' enters forbidden area \"green stuff\"") != std::string::npos);
  CHECK(cli({"run", script("forbidden.ccr"), "--strict"}).code == 3);
  CHECK(cli({"run", script("wait.ccr"), "--strict"}).code == 0);

  CHECK(cli({"run", script("wait.ccr"), "--svg", (tmp.path / "no" / "such" / "dir.svg").string()}).code == 4);

  auto config = tmp.write("fast.cfg", "max_speed = 2\nacceleration = 1\ndeceleration = 1\n");
  auto fast = cli({"run", script("wait.ccr"), "--config", config.string(), "--report", "-"});
  CHECK(fast.code == 0);
  CHECK(fast.out.find("total: 6.000 s") != std::string::npos);
  CHECK(cli({"run", script("wait.ccr"), "--config", tmp.write("bad.cfg", "max_speed = fast\n").string()}).code == 1);
}

TEST_CASE("cli writes the requested files") {
  TempDir tmp;
  auto trace = tmp.path / "t.ndjson", svg = tmp.path / "s.svg", report = tmp.path / "r.txt";
  auto r = cli({"run", script("synchronize.ccr"), "--dt", "0.25", "--trace", trace.string(), "--svg", svg.string(),
                "--report", report.string()});
  REQUIRE(r.code == 0);
  CHECK(r.out.empty());
  auto expected = oracle::render_all(oracle::read_text(script("synchronize.ccr")), 0.25);
  CHECK(oracle::read_text(trace) == expected.trace);
  CHECK(oracle::read_text(svg) == expected.svg);
  CHECK(oracle::read_text(report) == expected.report);
  CHECK(line_count(expected.trace) == 2 * sample_times(schedule(oracle::load("synchronize.ccr")), 0.25).size());
}

TEST_CASE("outputs are deterministic and match the golden files") {
  const bool update = std::getenv("CCR_UPDATE_GOLDEN") != nullptr;
  for (const auto& path : oracle::script_files()) {
    const std::string source = oracle::read_text(path);
    auto first = oracle::render_all(source, oracle::kGoldenDt);
    auto second = oracle::render_all(source, oracle::kGoldenDt);
    CHECK(first.trace == second.trace);
    CHECK(first.svg == second.svg);
    CHECK(first.report == second.report);

    const std::string stem = path.stem().string();
    const std::pair<std::string, const std::string*> files[] = {
        {stem + ".trace.ndjson", &first.trace}, {stem + ".svg", &first.svg}, {stem + ".report.txt", &first.report}};
    for (const auto& [name, content] : files) {
      fs::path golden = oracle::golden_dir() / name;
      if (update) {
        fs::create_directories(golden.parent_path());
        std::ofstream(golden, std::ios::binary) << *content;
      }
      INFO(golden.string());
      REQUIRE(fs::exists(golden));
      CHECK(oracle::read_text(golden) == *content);
    }
  }
}
