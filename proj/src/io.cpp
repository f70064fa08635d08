#include "vstbench/io.hpp"

#include <png.h>

#include <algorithm>
#include <array>
#include <cmath>
#include <cstring>
#include <fstream>
#include <set>
#include <sstream>

#include "vstbench/error.hpp"

namespace vstbench::io {

namespace {

std::string line_col(const std::string& text, std::size_t byte) {
  std::size_t line = 1, col = 1;
  for (std::size_t i = 0; i < std::min(byte, text.size()); ++i) {
    if (text[i] == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
  }
  return "line " + std::to_string(line) + ", column " + std::to_string(col);
}

template <class T>
const char* type_name() {
  if constexpr (std::is_same_v<T, bool>) return "a boolean";
  else if constexpr (std::is_integral_v<T>) return "an integer";
  else if constexpr (std::is_floating_point_v<T>) return "a number";
  else if constexpr (std::is_same_v<T, std::string>) return "a string";
  else return "an array";
}

template <class T>
bool matches_type(const Json& v) {
  if constexpr (std::is_same_v<T, bool>) return v.is_boolean();
  else if constexpr (std::is_integral_v<T>) {
    if (v.is_number_integer()) return std::is_signed_v<T> || v.get<long long>() >= 0;
    return v.is_number_float() && std::floor(v.get<double>()) == v.get<double>();
  } else if constexpr (std::is_floating_point_v<T>) return v.is_number();
  else if constexpr (std::is_same_v<T, std::string>) return v.is_string();
  else return v.is_array();
}

// Reads known keys from a JSON object and rejects the rest.
class ObjectReader {
 public:
  ObjectReader(const Json& j, std::string context) : j_(j), ctx_(std::move(context)) {
    if (!j_.is_object()) throw ConfigError(ctx_ + ": expected an object");
  }

  template <class T>
  bool get(const std::string& key, T& out) {
    seen_.insert(key);
    auto it = j_.find(key);
    if (it == j_.end()) return false;
    if (!matches_type<T>(*it)) throw ConfigError(ctx_ + "." + key + ": expected " + type_name<T>());
    if constexpr (std::is_integral_v<T> && !std::is_same_v<T, bool>) {
      out = it->is_number_float() ? static_cast<T>(it->template get<double>()) : it->template get<T>();
    } else {
      out = it->template get<T>();
    }
    return true;
  }

  template <class T>
  T require(const std::string& key) {
    T out{};
    if (!get(key, out)) throw ConfigError(ctx_ + ": missing required key '" + key + "'");
    return out;
  }

  const Json* child(const std::string& key) {
    seen_.insert(key);
    auto it = j_.find(key);
    return it == j_.end() ? nullptr : &*it;
  }

  const Json& require_child(const std::string& key) {
    const Json* c = child(key);
    if (!c) throw ConfigError(ctx_ + ": missing required key '" + key + "'");
    return *c;
  }

  std::string at(const std::string& key) const { return ctx_ + "." + key; }

  void finish() const {
    std::vector<std::string> unknown;
    for (auto it = j_.begin(); it != j_.end(); ++it)
      if (!seen_.count(it.key())) unknown.push_back("'" + it.key() + "'");
    if (unknown.empty()) return;
    std::string msg = ctx_ + ": unknown key";
    msg += unknown.size() > 1 ? "s " : " ";
    for (std::size_t i = 0; i < unknown.size(); ++i) msg += (i ? ", " : "") + unknown[i];
    throw ConfigError(msg);
  }

 private:
  const Json& j_;
  std::string ctx_;
  std::set<std::string> seen_;
};

template <class F>
auto as_config_error(const std::string& ctx, F&& f) -> decltype(f()) {
  try {
    return f();
  } catch (const ConfigError&) {
    throw;
  } catch (const std::exception& e) {
    throw ConfigError(ctx + ": " + e.what());
  }
}

Json vec3(const Eigen::Vector3d& v) { return Json::array({v.x(), v.y(), v.z()}); }

Eigen::Vector3d read_vec3(const Json& j, const std::string& ctx) {
  if (!j.is_array() || j.size() != 3) throw ConfigError(ctx + ": expected an array of 3 numbers");
  Eigen::Vector3d v;
  for (int i = 0; i < 3; ++i) {
    if (!j[i].is_number()) throw ConfigError(ctx + ": expected an array of 3 numbers");
    v[i] = j[i].get<double>();
  }
  return v;
}

Json viewpoint_to_json(const geometry::Viewpoint& vp) {
  Json rot = Json::array();
  for (int r = 0; r < 3; ++r)
    for (int c = 0; c < 3; ++c) rot.push_back(vp.pose.rotation(r, c));
  const auto& k = vp.intrinsics;
  return Json{{"rotation", rot},
              {"translation", vec3(vp.pose.translation)},
              {"intrinsics",
               {{"fx", k.fx}, {"fy", k.fy}, {"cx", k.cx}, {"cy", k.cy}, {"width", k.width}, {"height", k.height}}}};
}

geometry::Viewpoint viewpoint_from_json(const Json& j, const std::string& ctx) {
  ObjectReader r(j, ctx);
  geometry::Viewpoint vp;
  const Json& rot = r.require_child("rotation");
  if (!rot.is_array() || rot.size() != 9) throw ConfigError(r.at("rotation") + ": expected 9 numbers (row-major)");
  for (int i = 0; i < 9; ++i) {
    if (!rot[i].is_number()) throw ConfigError(r.at("rotation") + ": expected 9 numbers (row-major)");
    vp.pose.rotation(i / 3, i % 3) = rot[i].get<double>();
  }
  vp.pose.translation = read_vec3(r.require_child("translation"), r.at("translation"));
  ObjectReader k(r.require_child("intrinsics"), r.at("intrinsics"));
  auto& in = vp.intrinsics;
  in.fx = k.require<double>("fx");
  in.fy = k.require<double>("fy");
  in.cx = k.require<double>("cx");
  in.cy = k.require<double>("cy");
  in.width = k.require<int>("width");
  in.height = k.require<int>("height");
  k.finish();
  r.finish();
  return vp;
}

Json texture_to_json(const scene::TextureSpec& t) {
  Json j{{"kind", scene::to_string(t.kind)}, {"width", t.width}, {"height", t.height}, {"low", t.low},
         {"high", t.high}};
  switch (t.kind) {
    case scene::TextureKind::Checkerboard: j["squares"] = t.squares; break;
    case scene::TextureKind::Noise:
      j["noise_cells"] = t.noise_cells;
      j["seed"] = t.seed;
      break;
    case scene::TextureKind::BlobGrid:
      j["grid"] = t.grid;
      j["margin"] = t.margin;
      j["border"] = t.border;
      j["spacing"] = t.spacing;
      j["blob_sigma"] = t.blob_sigma;
      break;
    case scene::TextureKind::Constant: break;
  }
  return j;
}

scene::TextureSpec texture_from_json(const Json& j, const std::string& ctx) {
  ObjectReader r(j, ctx);
  scene::TextureSpec t;
  const auto kind = r.require<std::string>("kind");
  t.kind = as_config_error(r.at("kind"), [&] { return scene::parse_texture_kind(kind); });
  if (t.kind == scene::TextureKind::BlobGrid) {
    int grid = t.grid;
    r.get("grid", grid);
    t = scene::fiducial_texture(grid);
  }
  r.get("width", t.width);
  r.get("height", t.height);
  r.get("low", t.low);
  r.get("high", t.high);
  r.get("squares", t.squares);
  r.get("noise_cells", t.noise_cells);
  r.get("seed", t.seed);
  r.get("grid", t.grid);
  r.get("margin", t.margin);
  r.get("border", t.border);
  r.get("spacing", t.spacing);
  r.get("blob_sigma", t.blob_sigma);
  r.finish();
  as_config_error(ctx, [&] {
    t.validate();
    return 0;
  });
  return t;
}

Json patch_to_json(const scene::TexturedPatch& p) {
  Json corners = Json::array();
  for (const auto& c : p.corners) corners.push_back(vec3(c));
  return Json{{"id", p.id}, {"corners", corners}, {"texture", texture_to_json(p.texture)}};
}

scene::TexturedPatch patch_from_json(const Json& j, const std::string& ctx) {
  ObjectReader r(j, ctx);
  scene::TexturedPatch p;
  p.id = r.require<int>("id");
  const Json& corners = r.require_child("corners");
  if (!corners.is_array() || corners.size() != 4) throw ConfigError(r.at("corners") + ": expected 4 corners");
  for (std::size_t i = 0; i < 4; ++i)
    p.corners[i] = read_vec3(corners[i], r.at("corners") + "[" + std::to_string(i) + "]");
  p.texture = texture_from_json(r.require_child("texture"), r.at("texture"));
  r.finish();
  as_config_error(ctx, [&] {
    p.validate();
    return 0;
  });
  return p;
}

void check_stream(const std::ios& s, const fs::path& path, const char* what) {
  if (!s) throw ConfigError(std::string("cannot ") + what + " '" + path.string() + "'");
}

void ensure_parent(const fs::path& path) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
}

void put_u32(std::string& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xFFu));
}

std::uint32_t get_u32(const unsigned char* p) {
  return static_cast<std::uint32_t>(p[0]) | (static_cast<std::uint32_t>(p[1]) << 8) |
         (static_cast<std::uint32_t>(p[2]) << 16) | (static_cast<std::uint32_t>(p[3]) << 24);
}

}  // namespace

std::string read_text(const fs::path& path) {
  if (fs::is_directory(path)) throw ConfigError("'" + path.string() + "' is a directory");
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot read '" + path.string() + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Json read_json(const fs::path& path) {
  const std::string text = read_text(path);
  try {
    return Json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError(path.string() + ": JSON parse error at " + line_col(text, e.byte > 0 ? e.byte - 1 : 0));
  }
}

void write_text(const fs::path& path, const std::string& text) {
  ensure_parent(path);
  std::ofstream out(path, std::ios::binary);
  check_stream(out, path, "write");
  out << text;
  check_stream(out, path, "write");
}

void write_json(const fs::path& path, const Json& j) { write_text(path, j.dump(2) + "\n"); }

Json rig_to_json(const geometry::RigCalibration& rig) {
  return Json{{"left_camera", viewpoint_to_json(rig.left_camera)},
              {"right_camera", viewpoint_to_json(rig.right_camera)},
              {"left_eye", viewpoint_to_json(rig.left_eye)},
              {"right_eye", viewpoint_to_json(rig.right_eye)}};
}

geometry::RigCalibration rig_from_json(const Json& j, const std::string& context) {
  ObjectReader r(j, context);
  geometry::RigCalibration rig;
  rig.left_camera = viewpoint_from_json(r.require_child("left_camera"), r.at("left_camera"));
  rig.right_camera = viewpoint_from_json(r.require_child("right_camera"), r.at("right_camera"));
  rig.left_eye = viewpoint_from_json(r.require_child("left_eye"), r.at("left_eye"));
  rig.right_eye = viewpoint_from_json(r.require_child("right_eye"), r.at("right_eye"));
  r.finish();
  as_config_error(context, [&] {
    rig.validate();
    return 0;
  });
  return rig;
}

geometry::RigCalibration load_rig(const fs::path& path) {
  if (!fs::exists(path)) throw ConfigError("rig file not found: '" + path.string() + "'");
  return rig_from_json(read_json(path), path.string());
}

Json scene_to_json(const scene::Scene& s) {
  Json patches = Json::array(), targets = Json::array();
  for (const auto& p : s.patches()) patches.push_back(patch_to_json(p));
  for (const auto& t : s.targets()) targets.push_back(patch_to_json(t.patch));
  return Json{{"name", s.name()},
              {"seed", s.seed()},
              {"background_depth", s.background_depth()},
              {"background_intensity", s.background_intensity()},
              {"patches", patches},
              {"targets", targets}};
}

scene::Scene scene_from_json(const Json& j, const std::string& context) {
  ObjectReader r(j, context);
  const auto name = r.require<std::string>("name");
  std::uint64_t seed = 0;
  double bg_depth = 10.0, bg_intensity = 0.5;
  r.get("seed", seed);
  r.get("background_depth", bg_depth);
  r.get("background_intensity", bg_intensity);
  std::vector<scene::TexturedPatch> patches;
  std::vector<scene::FiducialTarget> targets;
  auto read_list = [&](const std::string& key, auto&& sink) {
    const Json* list = r.child(key);
    if (!list) return;
    if (!list->is_array()) throw ConfigError(r.at(key) + ": expected an array");
    for (std::size_t i = 0; i < list->size(); ++i)
      sink(patch_from_json((*list)[i], r.at(key) + "[" + std::to_string(i) + "]"));
  };
  read_list("patches", [&](scene::TexturedPatch p) { patches.push_back(std::move(p)); });
  read_list("targets", [&](scene::TexturedPatch p) { targets.push_back({std::move(p)}); });
  r.finish();
  return as_config_error(context, [&] {
    return scene::Scene(name, std::move(patches), std::move(targets), bg_depth, seed, bg_intensity);
  });
}

scene::Scene load_scene(const fs::path& path) {
  if (!fs::exists(path)) throw ConfigError("scene file not found: '" + path.string() + "'");
  return scene_from_json(read_json(path), path.string());
}

Json config_to_json(const bench::BenchmarkConfig& c) {
  Json modes = Json::array();
  for (auto m : c.modes) modes.push_back(passthrough::to_string(m));
  const auto& w = c.warping;
  const auto& wp = w.params;
  return Json{
      {"rig", c.rig_file},
      {"scenes", c.scenes},
      {"trajectory",
       {{"frames", c.trajectory.frames},
        {"sway_x", c.trajectory.sway_x},
        {"sway_y", c.trajectory.sway_y},
        {"sway_z", c.trajectory.sway_z},
        {"yaw_deg", c.trajectory.yaw_deg},
        {"pitch_deg", c.trajectory.pitch_deg},
        {"static", c.trajectory.is_static}}},
      {"modes", modes},
      {"corruption",
       {{"boundary_dilation_px", c.corruption.boundary_dilation_px},
        {"noise_sigma_rel", c.corruption.noise_sigma_rel},
        {"disparity_levels", c.corruption.disparity_levels},
        {"min_depth", c.corruption.min_depth},
        {"max_depth", c.corruption.max_depth},
        {"edge_jump", c.corruption.edge_jump}}},
      {"smoothing", {{"smooth_sigma_px", c.smooth_sigma_px}, {"oversmooth_sigma_px", c.oversmooth_sigma_px}}},
      {"plane_distance", c.plane.distance},
      {"mesh", {{"stride", c.mesh.stride}, {"disocclusion_ratio", c.mesh.disocclusion_ratio}}},
      {"bins", {{"start_mm", c.bins.start_mm}, {"stop_mm", c.bins.stop_mm}, {"width_mm", c.bins.width_mm}}},
      {"frame_stride", c.frame_stride},
      {"depth_lag", c.depth_lag},
      {"warping",
       {{"enabled", w.enabled},
        {"scene", w.scene},
        {"eye", std::string(geometry::to_string(w.eye))},
        {"frames", w.frames},
        {"localization_noise_px", wp.localization_noise_px},
        {"detection", metrics::to_string(wp.detection)},
        {"dark_threshold", wp.detect.threshold},
        {"min_size_px", wp.detect.min_size_px},
        {"refine_iterations", wp.detect.refine_iterations},
        {"search_radius", wp.match.search_radius},
        {"template_radius", wp.match.template_radius},
        {"confidence_threshold", wp.match.confidence_threshold},
        {"min_matches", wp.match.min_matches},
        {"inlier_threshold", wp.ransac.inlier_threshold},
        {"max_iterations", wp.ransac.max_iterations},
        {"ransac_confidence", wp.ransac.confidence},
        {"ransac_seed", wp.ransac.seed},
        {"inliers_only", wp.ransac.inliers_only},
        {"seed", wp.seed}}},
      {"seed", c.seed},
      {"output_dir", c.output_dir}};
}

bench::BenchmarkConfig config_from_json(const Json& j, const std::string& context) {
  ObjectReader r(j, context);
  bench::BenchmarkConfig c;
  r.get("rig", c.rig_file);
  r.get("scenes", c.scenes);
  if (const Json* t = r.child("trajectory")) {
    ObjectReader tr(*t, r.at("trajectory"));
    tr.get("frames", c.trajectory.frames);
    tr.get("sway_x", c.trajectory.sway_x);
    tr.get("sway_y", c.trajectory.sway_y);
    tr.get("sway_z", c.trajectory.sway_z);
    tr.get("yaw_deg", c.trajectory.yaw_deg);
    tr.get("pitch_deg", c.trajectory.pitch_deg);
    tr.get("static", c.trajectory.is_static);
    tr.finish();
  }
  std::vector<std::string> modes;
  if (r.get("modes", modes)) {
    c.modes.clear();
    for (const auto& m : modes) c.modes.push_back(as_config_error(r.at("modes"), [&] { return passthrough::parse_mode(m); }));
  }
  if (const Json* cj = r.child("corruption")) {
    ObjectReader cr(*cj, r.at("corruption"));
    cr.get("boundary_dilation_px", c.corruption.boundary_dilation_px);
    cr.get("noise_sigma_rel", c.corruption.noise_sigma_rel);
    cr.get("disparity_levels", c.corruption.disparity_levels);
    cr.get("min_depth", c.corruption.min_depth);
    cr.get("max_depth", c.corruption.max_depth);
    cr.get("edge_jump", c.corruption.edge_jump);
    cr.finish();
  }
  if (const Json* s = r.child("smoothing")) {
    ObjectReader sr(*s, r.at("smoothing"));
    sr.get("smooth_sigma_px", c.smooth_sigma_px);
    sr.get("oversmooth_sigma_px", c.oversmooth_sigma_px);
    sr.finish();
  }
  r.get("plane_distance", c.plane.distance);
  if (const Json* m = r.child("mesh")) {
    ObjectReader mr(*m, r.at("mesh"));
    mr.get("stride", c.mesh.stride);
    mr.get("disocclusion_ratio", c.mesh.disocclusion_ratio);
    mr.finish();
  }
  if (const Json* b = r.child("bins")) {
    ObjectReader br(*b, r.at("bins"));
    br.get("start_mm", c.bins.start_mm);
    br.get("stop_mm", c.bins.stop_mm);
    br.get("width_mm", c.bins.width_mm);
    br.finish();
  }
  r.get("frame_stride", c.frame_stride);
  r.get("depth_lag", c.depth_lag);
  if (const Json* w = r.child("warping")) {
    ObjectReader wr(*w, r.at("warping"));
    auto& clip = c.warping;
    auto& p = clip.params;
    wr.get("enabled", clip.enabled);
    wr.get("scene", clip.scene);
    std::string eye, detection;
    if (wr.get("eye", eye)) clip.eye = as_config_error(wr.at("eye"), [&] { return geometry::parse_side(eye); });
    wr.get("frames", clip.frames);
    wr.get("localization_noise_px", p.localization_noise_px);
    if (wr.get("detection", detection))
      p.detection = as_config_error(wr.at("detection"), [&] { return metrics::parse_detection_mode(detection); });
    wr.get("dark_threshold", p.detect.threshold);
    wr.get("min_size_px", p.detect.min_size_px);
    wr.get("refine_iterations", p.detect.refine_iterations);
    wr.get("search_radius", p.match.search_radius);
    wr.get("template_radius", p.match.template_radius);
    wr.get("confidence_threshold", p.match.confidence_threshold);
    wr.get("min_matches", p.match.min_matches);
    wr.get("inlier_threshold", p.ransac.inlier_threshold);
    wr.get("max_iterations", p.ransac.max_iterations);
    wr.get("ransac_confidence", p.ransac.confidence);
    wr.get("ransac_seed", p.ransac.seed);
    wr.get("inliers_only", p.ransac.inliers_only);
    wr.get("seed", p.seed);
    wr.finish();
  }
  r.get("seed", c.seed);
  r.get("output_dir", c.output_dir);
  r.finish();
  as_config_error(context, [&] {
    c.validate();
    return 0;
  });
  return c;
}

bench::BenchmarkConfig load_config(const fs::path& path) {
  if (!fs::exists(path)) throw ConfigError("config file not found: '" + path.string() + "'");
  return config_from_json(read_json(path), path.string());
}

bench::BenchmarkInputs resolve_inputs(const bench::BenchmarkConfig& config, const fs::path& root) {
  auto resolve = [&](const std::string& p) {
    const fs::path path(p);
    return path.is_absolute() ? path : root / path;
  };
  const auto rig = config.rig_file.empty() ? geometry::make_rig() : load_rig(resolve(config.rig_file));
  const auto names = scene::suite_names();
  auto build = [&](const std::string& name) {
    if (std::find(names.begin(), names.end(), name) != names.end())
      return scene::make_suite_scene(name, rig, config.seed);
    if (fs::path(name).extension() == ".json") return load_scene(resolve(name));
    throw ConfigError("config: '" + name + "' is neither a suite scene nor a scene file");
  };
  bench::BenchmarkInputs in{rig, {}, {}};
  for (const auto& n : config.scenes) in.scenes.push_back(build(n));
  if (config.warping.enabled) in.warping_scene.push_back(build(config.warping.scene));
  return in;
}

void write_png(const fs::path& path, const ImageF& image) {
  std::vector<std::uint8_t> px(image.data().size());
  for (std::size_t i = 0; i < px.size(); ++i)
    px[i] = static_cast<std::uint8_t>(std::lround(std::clamp(static_cast<double>(image.data()[i]), 0.0, 1.0) * 255.0));
  ensure_parent(path);
  png_image img;
  std::memset(&img, 0, sizeof img);
  img.version = PNG_IMAGE_VERSION;
  img.width = static_cast<png_uint_32>(image.width());
  img.height = static_cast<png_uint_32>(image.height());
  img.format = PNG_FORMAT_GRAY;
  if (!png_image_write_to_file(&img, path.string().c_str(), 0, px.data(), 0, nullptr))
    throw ConfigError("cannot write PNG '" + path.string() + "': " + img.message);
}

void write_png_rgb(const fs::path& path, int width, int height, const std::vector<std::uint8_t>& rgb) {
  if (rgb.size() != static_cast<std::size_t>(width) * height * 3) throw ConfigError("RGB buffer size mismatch");
  ensure_parent(path);
  png_image img;
  std::memset(&img, 0, sizeof img);
  img.version = PNG_IMAGE_VERSION;
  img.width = static_cast<png_uint_32>(width);
  img.height = static_cast<png_uint_32>(height);
  img.format = PNG_FORMAT_RGB;
  if (!png_image_write_to_file(&img, path.string().c_str(), 0, rgb.data(), 0, nullptr))
    throw ConfigError("cannot write PNG '" + path.string() + "': " + img.message);
}

ImageF read_png(const fs::path& path) {
  png_image img;
  std::memset(&img, 0, sizeof img);
  img.version = PNG_IMAGE_VERSION;
  if (!png_image_begin_read_from_file(&img, path.string().c_str()))
    throw ConfigError("cannot read PNG '" + path.string() + "': " + img.message);
  img.format = PNG_FORMAT_GRAY;
  std::vector<std::uint8_t> px(PNG_IMAGE_SIZE(img));
  if (!png_image_finish_read(&img, nullptr, px.data(), 0, nullptr)) {
    png_image_free(&img);
    throw ConfigError("cannot decode PNG '" + path.string() + "': " + img.message);
  }
  ImageF out(static_cast<int>(img.width), static_cast<int>(img.height));
  for (std::size_t i = 0; i < px.size(); ++i) out.data()[i] = static_cast<float>(px[i] / 255.0);
  return out;
}

void write_depth(const fs::path& path, const DepthMap& depth) {
  std::string buf = "VSTD";
  put_u32(buf, 1);
  put_u32(buf, static_cast<std::uint32_t>(depth.width()));
  put_u32(buf, static_cast<std::uint32_t>(depth.height()));
  buf.reserve(buf.size() + 4 * depth.values().data().size());
  for (int y = 0; y < depth.height(); ++y)
    for (int x = 0; x < depth.width(); ++x) {
      const float f = depth.valid(x, y) ? static_cast<float>(depth(x, y)) : 0.0f;
      std::uint32_t bits;
      std::memcpy(&bits, &f, 4);
      put_u32(buf, bits);
    }
  write_text(path, buf);
}

DepthMap read_depth(const fs::path& path) {
  const std::string buf = read_text(path);
  const auto* p = reinterpret_cast<const unsigned char*>(buf.data());
  if (buf.size() < 16 || buf.compare(0, 4, "VSTD") != 0)
    throw ConfigError("'" + path.string() + "' is not a depth sidecar");
  if (get_u32(p + 4) != 1) throw ConfigError("'" + path.string() + "': unsupported depth sidecar version");
  const auto w = get_u32(p + 8), h = get_u32(p + 12);
  if (buf.size() != 16 + 4ull * w * h) throw ConfigError("'" + path.string() + "': truncated depth sidecar");
  DepthMap d(static_cast<int>(w), static_cast<int>(h));
  for (std::uint32_t i = 0; i < w * h; ++i) {
    const std::uint32_t bits = get_u32(p + 16 + 4 * i);
    float f;
    std::memcpy(&f, &bits, 4);
    if (f > 0.0f) d.set(static_cast<int>(i % w), static_cast<int>(i / w), f);
  }
  return d;
}

std::vector<std::uint8_t> error_heatmap(const Image<double>& error, const Mask& valid, double max_value) {
  static constexpr std::array<std::array<double, 3>, 5> stops = {
      {{0, 0, 0}, {0, 0, 255}, {0, 255, 255}, {255, 255, 0}, {255, 0, 0}}};
  std::vector<std::uint8_t> rgb;
  rgb.reserve(error.data().size() * 3);
  for (int y = 0; y < error.height(); ++y)
    for (int x = 0; x < error.width(); ++x) {
      if (!valid(x, y)) {
        rgb.insert(rgb.end(), {128, 128, 128});
        continue;
      }
      const double t = max_value > 0 ? std::clamp(error(x, y) / max_value, 0.0, 1.0) * 4.0 : 0.0;
      const int i = std::min(3, static_cast<int>(t));
      const double f = t - i;
      for (int c = 0; c < 3; ++c)
        rgb.push_back(static_cast<std::uint8_t>(std::lround(stops[i][c] + f * (stops[i + 1][c] - stops[i][c]))));
    }
  return rgb;
}

}  // namespace vstbench::io
