#include "doctest.h"

#include <cmath>
#include <unistd.h>

#include "vstbench/error.hpp"
#include "vstbench/io.hpp"
#include "vstbench/report.hpp"
#include "vstbench/scene.hpp"

using namespace vstbench;
using namespace vstbench::io;

namespace {

fs::path scratch(const std::string& name) {
  auto dir = fs::temp_directory_path() / ("vstbench_io_" + std::to_string(::getpid()));
  fs::create_directories(dir);
  return dir / name;
}

std::string error_of(auto&& f) {
  try {
    f();
  } catch (const ConfigError& e) {
    return e.what();
  }
  return "";
}

}  // namespace

TEST_CASE("rig round trip") {
  auto rig = geometry::make_rig();
  rig.right_camera.pose = geometry::Pose::from_euler(0.01, -0.02, 0.003, {0.05, 0.001, 0.03});
  rig.left_eye.intrinsics.fx = 510;
  auto back = rig_from_json(rig_to_json(rig), "rig");
  CHECK(back.right_camera.pose.rotation.isApprox(rig.right_camera.pose.rotation, 1e-15));
  CHECK(back.right_camera.pose.translation == rig.right_camera.pose.translation);
  CHECK(back.left_eye.intrinsics.fx == 510);
  CHECK(rig_to_json(back) == rig_to_json(rig));

  auto j = rig_to_json(rig);
  j["left_eye"]["intrinsics"]["fx"] = -1;
  CHECK_THROWS_AS(rig_from_json(j, "rig"), ConfigError);
  auto missing = error_of([] { load_rig("/nonexistent/rig.json"); });
  CHECK(missing.find("/nonexistent/rig.json") != std::string::npos);
}

TEST_CASE("scene round trip renders identically") {
  auto rig = geometry::make_rig();
  for (const auto& name : scene::suite_names()) {
    auto s = scene::make_suite_scene(name, rig, 5);
    auto j = scene_to_json(s);
    auto back = scene_from_json(j, name);
    CHECK(scene_to_json(back) == j);
    auto a = scene::render(s, rig.left_camera), b = scene::render(back, rig.left_camera);
    CHECK(a.image == b.image);
    CHECK(a.depth == b.depth);
  }
}

TEST_CASE("config round trip and strictness") {
  bench::BenchmarkConfig c;
  c.modes = {passthrough::Mode::DP, passthrough::Mode::GapSmooth};
  c.scenes = {"plane"};
  c.seed = 42;
  c.warping.params.localization_noise_px = 0.2;
  auto j = config_to_json(c);
  CHECK(config_to_json(config_from_json(j, "cfg")) == j);

  auto typo = j;
  typo["trajectory"]["frame"] = 3;
  auto msg = error_of([&] { config_from_json(typo, "cfg.json"); });
  CHECK(msg.find("frame") != std::string::npos);
  CHECK(msg.find("cfg.json") != std::string::npos);

  auto wrong_type = j;
  wrong_type["seed"] = "one";
  CHECK_THROWS_AS(config_from_json(wrong_type, "cfg"), ConfigError);
  auto bad_mode = j;
  bad_mode["modes"] = {"gap"};
  CHECK(error_of([&] { config_from_json(bad_mode, "cfg"); }).find("gap") != std::string::npos);
  auto bad_stride = j;
  bad_stride["frame_stride"] = 0;
  CHECK_THROWS_AS(config_from_json(bad_stride, "cfg"), ConfigError);

  CHECK(config_to_json(config_from_json(Json::object(), "empty")) == config_to_json(bench::BenchmarkConfig{}));
}

TEST_CASE("JSON parse errors carry line and column") {
  auto p = scratch("broken.json");
  write_text(p, "{\n  \"seed\": 1,\n  \"modes\": [\"dp\",]\n}\n");
  auto msg = error_of([&] { read_json(p); });
  CHECK(msg.find("line 3") != std::string::npos);
  CHECK(msg.find("column") != std::string::npos);
  CHECK(error_of([&] { load_config(scratch("absent.json")); }).find("absent.json") != std::string::npos);
  CHECK_THROWS_AS(read_text(p.parent_path()), ConfigError);
  write_text(scratch("empty.txt"), "");
  CHECK(read_text(scratch("empty.txt")).empty());
}

TEST_CASE("resolve inputs") {
  bench::BenchmarkConfig c;
  c.scenes = {"plane", "two_plane"};
  auto rig_path = scratch("rig.json");
  write_json(rig_path, rig_to_json(geometry::make_lateral_rig(0.02)));
  c.rig_file = rig_path.filename().string();
  auto in = resolve_inputs(c, rig_path.parent_path());
  CHECK(in.scenes.size() == 2);
  CHECK(in.warping_scene.size() == 1);
  CHECK(in.rig.left_camera.pose.translation.z() == 0.0);
  c.scenes = {"mystery"};
  CHECK_THROWS_AS(resolve_inputs(c, rig_path.parent_path()), ConfigError);
  auto scene_path = scratch("custom.json");
  write_json(scene_path, scene_to_json(scene::make_suite_scene("plane", geometry::make_rig(), 1)));
  c.scenes = {scene_path.string()};
  c.rig_file.clear();
  c.warping.enabled = false;
  auto custom = resolve_inputs(c, "/");
  CHECK(custom.scenes[0].name() == "plane");
  CHECK(custom.warping_scene.empty());
}

TEST_CASE("png round trip quantizes to 8 bits") {
  ImageF img(17, 9);
  for (int y = 0; y < 9; ++y)
    for (int x = 0; x < 17; ++x) img(x, y) = static_cast<float>((x * 9 + y) / 160.0);
  img(0, 0) = 1.5f;
  auto p = scratch("img.png");
  write_png(p, img);
  auto back = read_png(p);
  REQUIRE(back.width() == 17);
  REQUIRE(back.height() == 9);
  CHECK(back(0, 0) == 1.0f);
  for (int y = 0; y < 9; ++y)
    for (int x = 1; x < 17; ++x) CHECK(std::abs(back(x, y) - img(x, y)) <= 0.5 / 255 + 1e-7);
  CHECK_THROWS_AS(read_png(scratch("nothing.png")), ConfigError);
}

TEST_CASE("depth sidecar round trip") {
  DepthMap d(5, 4);
  for (int y = 0; y < 4; ++y)
    for (int x = 0; x < 5; ++x)
      if ((x + y) % 3) d.set(x, y, 0.5 + 0.37 * x + 1.1 * y);
  auto p = scratch("d.depth");
  write_depth(p, d);
  auto raw = read_text(p);
  CHECK(raw.size() == 16 + 4 * 20);
  CHECK(raw.substr(0, 4) == "VSTD");
  auto back = read_depth(p);
  CHECK(back.mask() == d.mask());
  for (int y = 0; y < 4; ++y)
    for (int x = 0; x < 5; ++x) CHECK(back(x, y) == static_cast<float>(d(x, y)));
  write_text(p, raw.substr(0, 30));
  CHECK(error_of([&] { read_depth(p); }).find("truncated") != std::string::npos);
  write_text(p, "PNG garbage here....");
  CHECK(error_of([&] { read_depth(p); }).find("not a depth sidecar") != std::string::npos);
}

TEST_CASE("error heatmap ramp") {
  Image<double> e(6, 1);
  Mask valid(6, 1, 1);
  const double v[] = {0, 0.25, 0.5, 0.75, 1.0, 3.0};
  for (int i = 0; i < 6; ++i) e(i, 0) = v[i];
  valid(5, 0) = 0;
  auto rgb = error_heatmap(e, valid, 1.0);
  const std::uint8_t want[6][3] = {{0, 0, 0}, {0, 0, 255}, {0, 255, 255}, {255, 255, 0}, {255, 0, 0}, {128, 128, 128}};
  for (int i = 0; i < 6; ++i)
    for (int c = 0; c < 3; ++c) CHECK(rgb[i * 3 + c] == want[i][c]);
}

TEST_CASE("report diff") {
  Json a = {{"x", 1.0}, {"list", {1, 2, 3}}, {"nested", {{"name", "dp"}, {"v", 0.5}}}};
  CHECK(report::diff(a, a).empty());
  Json b = a;
  b["x"] = 1.0 + 1e-12;
  CHECK(report::diff(a, b).empty());
  b["nested"]["v"] = 0.6;
  b["list"].push_back(4);
  b["nested"]["name"] = "gap";
  b.erase("x");
  auto d = report::diff(a, b);
  CHECK(d.size() == 4);
  std::string all;
  for (const auto& line : d) all += line + "\n";
  CHECK(all.find("/nested/v") != std::string::npos);
  CHECK(all.find("/nested/name") != std::string::npos);
  CHECK(all.find("/list") != std::string::npos);
  CHECK(all.find("/x") != std::string::npos);
  CHECK(report::diff(a, b, {1.0, 0.0}).size() == 3);
}
