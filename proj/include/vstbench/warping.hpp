#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "vstbench/geometry.hpp"
#include "vstbench/image.hpp"
#include "vstbench/scene.hpp"
#include "vstbench/stats.hpp"

namespace vstbench::metrics {

using geometry::Homography;
using geometry::PixelCoord;

enum class DetectionMode { Detect, Oracle };

std::string to_string(DetectionMode m);
DetectionMode parse_detection_mode(const std::string& s);

struct DetectionOptions {
  double threshold = 0.4;  // intensity below which a pixel counts as dark
  int min_size_px = 200;   // minimum quad extent along both image axes
  int refine_iterations = 2;
};

struct TargetDetection {
  std::array<PixelCoord, 4> corners;  // ordered like the target's border corners
  Homography reference_to_image;
  ImageF crop;  // rectified at reference resolution
};

// Finds the target's dark border by threshold and connected components,
// fits a quad to the component's hull and refines each side to sub-pixel
// by locating the mid-level crossing of intensity profiles across it.
// Throws PipelineError when no plausible quad is found.
TargetDetection detect_target(const ImageF& image, const scene::FiducialTarget& target,
                              const DetectionOptions& opts = {});

// Uses known image positions of the border corners instead of detection.
TargetDetection oracle_target(const ImageF& image, const scene::FiducialTarget& target,
                              const std::array<PixelCoord, 4>& corners);

// Border corners of a target projected into a viewpoint.
std::array<PixelCoord, 4> project_target_corners(const scene::Scene& scene, std::size_t target,
                                                 const geometry::Viewpoint& viewpoint);

struct Correspondence {
  PixelCoord reference;  // reference-texture texels
  PixelCoord observed;   // crop or image pixels, depending on stage
  double confidence = 0.0;
};

struct MatchOptions {
  int search_radius = 6;
  int template_radius = 5;
  double confidence_threshold = 0.3;
  std::size_t min_matches = 100;
};

struct MatchResult {
  std::vector<Correspondence> matches;  // confidence >= threshold, in crop pixels
  std::size_t attempted = 0;
  bool sufficient = false;
};

// Normalized cross-correlation of each reference blob's neighborhood over
// a window around its expected crop position; integer peak refined by a
// parabola fit per axis.
MatchResult match_features(const ImageF& reference, const std::vector<PixelCoord>& features, const ImageF& crop,
                           const MatchOptions& opts = {});

struct RansacParams {
  double inlier_threshold = 3.0;
  int max_iterations = 2000;
  double confidence = 0.999;
  std::uint64_t seed = 1;
  // Report residuals only for RANSAC inliers instead of every match.
  bool inliers_only = false;
};

struct HomographyFit {
  Homography homography;
  std::vector<bool> inliers;
  std::vector<double> residuals;  // |H ref - observed| per reported match
  std::size_t inlier_count = 0;
  int iterations = 0;
};

// Hartley-normalized least-squares DLT (reference -> observed). Needs >= 4
// points.
Homography fit_homography_dlt(const std::vector<Correspondence>& matches);

HomographyFit fit_homography_ransac(const std::vector<Correspondence>& matches, const RansacParams& params = {});

struct WarpingParams {
  DetectionMode detection = DetectionMode::Detect;
  DetectionOptions detect;
  MatchOptions match;
  RansacParams ransac;
  // Gaussian noise (pixels, per axis) added to observed points before the fit.
  double localization_noise_px = 0.0;
  std::uint64_t seed = 7;
};

struct FrameInput {
  const ImageF* image = nullptr;
  int frame_index = 0;
  std::optional<std::array<PixelCoord, 4>> oracle_corners;
};

struct FrameWarping {
  int frame_index = 0;
  std::size_t matches = 0;
  bool sufficient = false;
  std::vector<double> residuals;
  double mean = 0.0;
  std::string failure;  // non-empty when the frame could not be evaluated
};

struct WarpingReport {
  std::vector<FrameWarping> frames;
  std::size_t frames_used = 0;
  double mean = 0.0;        // mean of per-frame means
  double mean_std = 0.0;    // sample std of per-frame means
  double median = 0.0;      // pooled over all residuals of used frames
  double p90 = 0.0;
  double matches_per_frame = 0.0;
};

FrameWarping evaluate_frame(const FrameInput& frame, const scene::FiducialTarget& target, const ImageF& reference,
                            const WarpingParams& params);

// Aggregates frames that have enough matches. Throws PipelineError when
// none do.
WarpingReport summarize_warping(std::vector<FrameWarping> frames);

WarpingReport warping_error(const std::vector<FrameInput>& clip, const scene::FiducialTarget& target,
                            const ImageF& reference, const WarpingParams& params);

}  // namespace vstbench::metrics
