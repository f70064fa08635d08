#include "doctest.h"

#include <algorithm>
#include <cmath>

#include "vstbench/bench.hpp"
#include "vstbench/error.hpp"
#include "vstbench/report.hpp"

using namespace vstbench;
using namespace vstbench::bench;

namespace {

BenchmarkConfig small_config() {
  BenchmarkConfig c;
  c.scenes = {"plane", "two_plane"};
  c.trajectory.frames = 4;
  c.frame_stride = 2;
  c.warping.frames = 2;
  return c;
}

}  // namespace

TEST_CASE("estimate_depth semantics") {
  const auto rig = geometry::make_rig();
  BenchmarkConfig c;
  auto corrupted = DepthMap::constant(640, 480, 1.3);
  auto dp = estimate_depth(Mode::DP, Side::Right, corrupted, rig, c);
  for (int y = 0; y < 480; y += 7)
    for (int x = 0; x < 640; x += 7) CHECK(dp(x, y) == 2.0);
  auto raw = estimate_depth(Mode::GapRaw, Side::Left, corrupted, rig, c);
  CHECK(raw == corrupted);
  auto smooth = estimate_depth(Mode::GapSmooth, Side::Left, corrupted, rig, c);
  CHECK(std::abs(smooth(30, 20) - 1.3) < 1e-9);
  auto right = estimate_depth(Mode::GapRaw, Side::Right, corrupted, rig, c);
  CHECK(right.valid(100, 100));
  CHECK(std::abs(right(100, 100) - 1.3) < 1e-9);
}

TEST_CASE("result layout") {
  auto c = small_config();
  const auto rig = geometry::make_rig();
  auto result = run(c, suite_inputs(c, rig));
  REQUIRE(result.table.size() == 4);
  for (std::size_t i = 0; i < 4; ++i) {
    CHECK(result.table[i].mode == c.modes[i]);
    for (const auto& cell : result.table[i].spatial) {
      CHECK(cell.scenes == 2);
      CHECK(cell.frames == 4);
      CHECK(cell.pixels > 0);
      CHECK(std::isfinite(cell.mean));
    }
  }
  CHECK(result.frames.size() == 2 * 2 * 4 * 2);
  CHECK(result.ranges.size() == 8);
  REQUIRE(result.warping.size() == 4);
  for (const auto& w : result.warping) CHECK(w.report.frames_used == 2);

  auto csv = report::table1_csv(result);
  // header plus modes x metrics x eyes
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 1 + 4 * 2 * 2);
  auto j = report::benchmark_json(c, result);
  CHECK(j.contains("config"));
}

TEST_CASE("ground-truth depth gives zero left-eye error") {
  auto c = small_config();
  c.corruption = depth::DepthCorruptionSpec{};
  c.modes = {Mode::GapRaw};
  c.warping.enabled = false;
  auto result = run(c, suite_inputs(c, geometry::make_rig()));
  CHECK(result.table[0].spatial[0].mean == 0.0);
  CHECK(result.table[0].depth[0].mean == 0.0);
}

TEST_CASE("report bytes are reproducible") {
  auto c = small_config();
  c.warping.enabled = false;
  const auto rig = geometry::make_rig();
  auto a = report::benchmark_json(c, run(c, suite_inputs(c, rig))).dump(2);
  auto b = report::benchmark_json(c, run(c, suite_inputs(c, rig))).dump(2);
  CHECK(a == b);
  c.seed = 2;
  auto other = report::benchmark_json(c, run(c, suite_inputs(c, rig))).dump(2);
  CHECK(other != a);
}

TEST_CASE("config validation") {
  auto check_bad = [](auto mutate) {
    auto c = small_config();
    mutate(c);
    CHECK_THROWS_AS(c.validate(), ConfigError);
  };
  check_bad([](BenchmarkConfig& c) { c.scenes.clear(); });
  check_bad([](BenchmarkConfig& c) { c.modes.clear(); });
  check_bad([](BenchmarkConfig& c) { c.frame_stride = 0; });
  check_bad([](BenchmarkConfig& c) { c.depth_lag = -1; });
  check_bad([](BenchmarkConfig& c) { c.smooth_sigma_px = -1; });
  check_bad([](BenchmarkConfig& c) { c.warping.frames = 9; });
  check_bad([](BenchmarkConfig& c) { c.plane.distance = 0; });
  check_bad([](BenchmarkConfig& c) { c.corruption.noise_sigma_rel = -0.1; });
  CHECK_NOTHROW(small_config().validate());

  auto c = small_config();
  c.scenes = {"nowhere"};
  CHECK_THROWS_AS(suite_inputs(c, geometry::make_rig()), ConfigError);
  c = small_config();
  c.warping.scene = "plane";
  CHECK_THROWS_AS(run(c, suite_inputs(c, geometry::make_rig())), ConfigError);
}
