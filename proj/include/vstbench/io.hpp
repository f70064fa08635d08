#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "vstbench/bench.hpp"
#include "vstbench/depth_map.hpp"
#include "vstbench/geometry.hpp"
#include "vstbench/image.hpp"
#include "vstbench/scene.hpp"

namespace vstbench::io {

namespace fs = std::filesystem;
using Json = nlohmann::ordered_json;

// Parse failures report line and column; missing files name the path.
Json read_json(const fs::path& path);
std::string read_text(const fs::path& path);
// Creates parent directories.
void write_text(const fs::path& path, const std::string& text);
void write_json(const fs::path& path, const Json& j);

// Rig files: each viewpoint carries a row-major 3x3 rotation, a translation
// in meters and pinhole intrinsics.
Json rig_to_json(const geometry::RigCalibration& rig);
geometry::RigCalibration rig_from_json(const Json& j, const std::string& context);
geometry::RigCalibration load_rig(const fs::path& path);

Json scene_to_json(const scene::Scene& s);
scene::Scene scene_from_json(const Json& j, const std::string& context);
scene::Scene load_scene(const fs::path& path);

Json config_to_json(const bench::BenchmarkConfig& c);
bench::BenchmarkConfig config_from_json(const Json& j, const std::string& context);
bench::BenchmarkConfig load_config(const fs::path& path);

// Rig from config.rig_file (relative to root) or the default rig; scenes by
// suite name or by path to a scene file.
bench::BenchmarkInputs resolve_inputs(const bench::BenchmarkConfig& config, const fs::path& root);

// 8-bit grayscale, intensities clamped to [0, 1].
void write_png(const fs::path& path, const ImageF& image);
ImageF read_png(const fs::path& path);
void write_png_rgb(const fs::path& path, int width, int height, const std::vector<std::uint8_t>& rgb);

// Depth sidecar: "VSTD", uint32 version, width, height, then float32 depth
// per pixel, row-major, all little-endian. 0 marks an invalid pixel.
void write_depth(const fs::path& path, const DepthMap& depth);
DepthMap read_depth(const fs::path& path);

// Color ramp black -> blue -> cyan -> yellow -> red over [0, max_value];
// invalid pixels are mid gray.
std::vector<std::uint8_t> error_heatmap(const Image<double>& error, const Mask& valid, double max_value);

}  // namespace vstbench::io
