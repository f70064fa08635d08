#include "vstbench/warping.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "vstbench/error.hpp"
#include "vstbench/random.hpp"

namespace vstbench::metrics {

std::string to_string(DetectionMode m) { return m == DetectionMode::Detect ? "detect" : "oracle"; }

DetectionMode parse_detection_mode(const std::string& s) {
  if (s == "detect") return DetectionMode::Detect;
  if (s == "oracle") return DetectionMode::Oracle;
  throw ConfigError("unknown detection mode '" + s + "' (expected detect or oracle)");
}

namespace {

using Vec2 = Eigen::Vector2d;

Vec2 vec(const PixelCoord& p) { return {p.u, p.v}; }
PixelCoord pix(const Vec2& v) { return {v.x(), v.y()}; }

double cross(const Vec2& a, const Vec2& b) { return a.x() * b.y() - a.y() * b.x(); }

struct Component {
  std::vector<Vec2> pixels;
  int min_x = std::numeric_limits<int>::max(), max_x = -1, min_y = std::numeric_limits<int>::max(), max_y = -1;
  bool touches_border = false;
};

std::vector<Component> dark_components(const ImageF& image, double threshold) {
  const int w = image.width(), h = image.height();
  Image<int> label(w, h, -1);
  std::vector<Component> out;
  std::vector<std::pair<int, int>> stack;
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      if (label(x, y) >= 0 || !(image(x, y) < threshold)) continue;
      const int id = static_cast<int>(out.size());
      out.emplace_back();
      Component& c = out.back();
      stack.assign(1, {x, y});
      label(x, y) = id;
      while (!stack.empty()) {
        const auto [px, py] = stack.back();
        stack.pop_back();
        c.pixels.emplace_back(px, py);
        c.min_x = std::min(c.min_x, px);
        c.max_x = std::max(c.max_x, px);
        c.min_y = std::min(c.min_y, py);
        c.max_y = std::max(c.max_y, py);
        if (px == 0 || py == 0 || px == w - 1 || py == h - 1) c.touches_border = true;
        constexpr int dx[4] = {1, -1, 0, 0};
        constexpr int dy[4] = {0, 0, 1, -1};
        for (int k = 0; k < 4; ++k) {
          const int qx = px + dx[k], qy = py + dy[k];
          if (qx < 0 || qy < 0 || qx >= w || qy >= h || label(qx, qy) >= 0 || !(image(qx, qy) < threshold)) continue;
          label(qx, qy) = id;
          stack.emplace_back(qx, qy);
        }
      }
    }
  }
  return out;
}

std::vector<Vec2> convex_hull(std::vector<Vec2> pts) {
  std::sort(pts.begin(), pts.end(), [](const Vec2& a, const Vec2& b) {
    return a.x() < b.x() || (a.x() == b.x() && a.y() < b.y());
  });
  if (pts.size() < 3) return pts;
  std::vector<Vec2> hull(2 * pts.size());
  std::size_t k = 0;
  for (const auto& p : pts) {
    while (k >= 2 && cross(hull[k - 1] - hull[k - 2], p - hull[k - 2]) <= 0) --k;
    hull[k++] = p;
  }
  for (std::size_t i = pts.size() - 1, t = k + 1; i-- > 0;) {
    while (k >= t && cross(hull[k - 1] - hull[k - 2], pts[i] - hull[k - 2]) <= 0) --k;
    hull[k++] = pts[i];
  }
  hull.resize(k - 1);
  return hull;
}

std::array<Vec2, 4> hull_quad(const std::vector<Vec2>& hull) {
  Vec2 centroid = Vec2::Zero();
  for (const auto& p : hull) centroid += p;
  centroid /= static_cast<double>(hull.size());
  auto farthest = [&](auto&& score) {
    return *std::max_element(hull.begin(), hull.end(), [&](const Vec2& a, const Vec2& b) { return score(a) < score(b); });
  };
  const Vec2 a = farthest([&](const Vec2& p) { return (p - centroid).squaredNorm(); });
  const Vec2 c = farthest([&](const Vec2& p) { return (p - a).squaredNorm(); });
  const Vec2 b = farthest([&](const Vec2& p) { return cross(c - a, p - a); });
  const Vec2 d = farthest([&](const Vec2& p) { return -cross(c - a, p - a); });
  return {a, b, c, d};
}

// Image-space order matching the target's corner order: the corner with the
// smallest u + v first, then increasing angle (clockwise on screen).
std::array<Vec2, 4> order_corners(std::array<Vec2, 4> q) {
  const Vec2 c = (q[0] + q[1] + q[2] + q[3]) / 4.0;
  std::sort(q.begin(), q.end(), [&](const Vec2& a, const Vec2& b) {
    return std::atan2(a.y() - c.y(), a.x() - c.x()) < std::atan2(b.y() - c.y(), b.x() - c.x());
  });
  const auto first = std::min_element(q.begin(), q.end(), [](const Vec2& a, const Vec2& b) {
    return a.x() + a.y() < b.x() + b.y();
  });
  std::rotate(q.begin(), first, q.end());
  return q;
}

struct Line {
  Vec2 point;
  Vec2 dir;
};

std::optional<Vec2> intersect(const Line& a, const Line& b) {
  const double den = cross(a.dir, b.dir);
  if (std::abs(den) < 1e-12) return std::nullopt;
  const double t = cross(b.point - a.point, b.dir) / den;
  return a.point + t * a.dir;
}

std::array<Vec2, 4> refine_quad(const ImageF& image, const std::array<Vec2, 4>& quad) {
  const Vec2 centroid = (quad[0] + quad[1] + quad[2] + quad[3]) / 4.0;
  std::array<Line, 4> lines;
  for (int k = 0; k < 4; ++k) {
    const Vec2 p0 = quad[k], p1 = quad[(k + 1) % 4];
    const double len = (p1 - p0).norm();
    const Vec2 e = (p1 - p0) / len;
    Vec2 n(-e.y(), e.x());
    if (n.dot((p0 + p1) / 2.0 - centroid) < 0) n = -n;
    lines[k] = Line{p0, e};
    std::vector<Vec2> edge;
    for (double t = 0.12 * len; t <= 0.88 * len; t += 1.0) {
      const Vec2 q = p0 + t * e;
      constexpr double reach = 5.0, step = 0.25;
      std::vector<double> prof;
      bool ok = true;
      for (double s = -reach; s <= reach + 1e-9; s += step) {
        double v;
        const Vec2 at = q + s * n;
        if (!sample_bilinear(image, at.x(), at.y(), v)) {
          ok = false;
          break;
        }
        prof.push_back(v);
      }
      if (!ok) continue;
      const std::size_t m = prof.size();
      const std::size_t band = static_cast<std::size_t>(2.5 / step);
      const double dark = std::accumulate(prof.begin(), prof.begin() + static_cast<long>(band), 0.0) / band;
      const double light = std::accumulate(prof.end() - static_cast<long>(band), prof.end(), 0.0) / band;
      if (light - dark < 0.2) continue;
      const double level = 0.5 * (dark + light);
      for (std::size_t i = 0; i + 1 < m; ++i) {
        if (prof[i] < level && prof[i + 1] >= level) {
          const double s = -reach + step * (i + (level - prof[i]) / (prof[i + 1] - prof[i]));
          edge.push_back(q + s * n);
          break;
        }
      }
    }
    if (edge.size() < 5) continue;
    Vec2 mean = Vec2::Zero();
    for (const auto& p : edge) mean += p;
    mean /= static_cast<double>(edge.size());
    Eigen::Matrix2d cov = Eigen::Matrix2d::Zero();
    for (const auto& p : edge) cov += (p - mean) * (p - mean).transpose();
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> es(cov);
    lines[k] = Line{mean, es.eigenvectors().col(1)};
  }
  std::array<Vec2, 4> out = quad;
  for (int k = 0; k < 4; ++k) {
    if (auto c = intersect(lines[(k + 3) % 4], lines[k])) out[k] = *c;
  }
  return out;
}

ImageF rectify(const ImageF& image, const Homography& ref_to_img, int width, int height) {
  ImageF crop(width, height);
  for (int y = 0; y < height; ++y) {
    for (int x = 0; x < width; ++x) {
      PixelCoord p;
      if (ref_to_img.try_apply({static_cast<double>(x), static_cast<double>(y)}, p))
        crop(x, y) = static_cast<float>(sample_bilinear_clamped(image, p.u, p.v));
    }
  }
  return crop;
}

TargetDetection finish(const ImageF& image, const scene::FiducialTarget& target,
                       const std::array<PixelCoord, 4>& corners) {
  TargetDetection det;
  det.corners = corners;
  det.reference_to_image = geometry::four_point_homography(target.border_corners(), corners);
  det.crop = rectify(image, det.reference_to_image, target.patch.texture.width, target.patch.texture.height);
  return det;
}

}  // namespace

TargetDetection detect_target(const ImageF& image, const scene::FiducialTarget& target, const DetectionOptions& opts) {
  auto comps = dark_components(image, opts.threshold);
  const Component* best = nullptr;
  int largest_extent = 0;
  for (const auto& c : comps) {
    const int extent = std::min(c.max_x - c.min_x + 1, c.max_y - c.min_y + 1);
    if (!c.touches_border) largest_extent = std::max(largest_extent, extent);
    if (c.touches_border || extent < opts.min_size_px) continue;
    if (!best || c.pixels.size() > best->pixels.size()) best = &c;
  }
  if (!best)
    throw PipelineError("target not found: no dark quad of at least " + std::to_string(opts.min_size_px) +
                        " px (largest interior dark component spans " + std::to_string(largest_extent) + " px)");
  const auto hull = convex_hull(best->pixels);
  if (hull.size() < 4) throw PipelineError("target not found: degenerate dark component");
  std::array<Vec2, 4> quad = order_corners(hull_quad(hull));
  for (int i = 0; i < opts.refine_iterations; ++i) quad = refine_quad(image, quad);
  quad = order_corners(quad);
  std::array<PixelCoord, 4> corners;
  for (int k = 0; k < 4; ++k) corners[k] = pix(quad[k]);
  try {
    return finish(image, target, corners);
  } catch (const GeometryError& e) {
    throw PipelineError(std::string("target not found: ") + e.what());
  }
}

TargetDetection oracle_target(const ImageF& image, const scene::FiducialTarget& target,
                              const std::array<PixelCoord, 4>& corners) {
  return finish(image, target, corners);
}

std::array<PixelCoord, 4> project_target_corners(const scene::Scene& scene, std::size_t target,
                                                 const geometry::Viewpoint& viewpoint) {
  const auto texel = scene.targets().at(target).border_corners();
  const geometry::Pose world_to_cam = viewpoint.pose.inverse();
  std::array<PixelCoord, 4> out;
  for (int k = 0; k < 4; ++k)
    out[k] = geometry::project(world_to_cam.apply(scene.target_point(target, texel[k])), viewpoint.intrinsics);
  return out;
}

MatchResult match_features(const ImageF& reference, const std::vector<PixelCoord>& features, const ImageF& crop,
                           const MatchOptions& opts) {
  if (opts.search_radius < 1 || opts.template_radius < 1) throw ConfigError("match radii must be >= 1");
  if (!(opts.confidence_threshold >= 0.0 && opts.confidence_threshold <= 1.0))
    throw ConfigError("confidence threshold must lie in [0, 1]");
  const int tr = opts.template_radius, sr = opts.search_radius;
  const int side = 2 * tr + 1;
  const int npx = side * side;
  MatchResult out;
  out.attempted = features.size();
  std::vector<double> tmpl(static_cast<std::size_t>(npx));
  std::vector<double> scores(static_cast<std::size_t>((2 * sr + 1) * (2 * sr + 1)));
  for (const auto& f : features) {
    const int bx = static_cast<int>(std::floor(f.u)), by = static_cast<int>(std::floor(f.v));
    if (bx - tr < 0 || by - tr < 0 || bx + tr >= reference.width() || by + tr >= reference.height()) continue;
    double tmean = 0.0;
    for (int dy = -tr, k = 0; dy <= tr; ++dy)
      for (int dx = -tr; dx <= tr; ++dx, ++k) tmean += tmpl[static_cast<std::size_t>(k)] = reference(bx + dx, by + dy);
    tmean /= npx;
    double tvar = 0.0;
    for (auto& t : tmpl) {
      t -= tmean;
      tvar += t * t;
    }
    if (!(tvar > 1e-12)) continue;
    auto score_at = [&](int ox, int oy) -> double& {
      return scores[static_cast<std::size_t>((oy + sr) * (2 * sr + 1) + (ox + sr))];
    };
    int best_x = 0, best_y = 0;
    double best = -2.0;
    for (int oy = -sr; oy <= sr; ++oy) {
      for (int ox = -sr; ox <= sr; ++ox) {
        double& s = score_at(ox, oy);
        s = -1.0;
        const int cx = bx + ox, cy = by + oy;
        if (cx - tr < 0 || cy - tr < 0 || cx + tr >= crop.width() || cy + tr >= crop.height()) continue;
        double wmean = 0.0;
        for (int dy = -tr; dy <= tr; ++dy)
          for (int dx = -tr; dx <= tr; ++dx) wmean += crop(cx + dx, cy + dy);
        wmean /= npx;
        double num = 0.0, wvar = 0.0;
        for (int dy = -tr, k = 0; dy <= tr; ++dy) {
          for (int dx = -tr; dx <= tr; ++dx, ++k) {
            const double wv = crop(cx + dx, cy + dy) - wmean;
            num += tmpl[static_cast<std::size_t>(k)] * wv;
            wvar += wv * wv;
          }
        }
        s = wvar > 1e-12 ? num / std::sqrt(tvar * wvar) : 0.0;
        if (s > best) {
          best = s;
          best_x = ox;
          best_y = oy;
        }
      }
    }
    auto refine = [](double l, double c, double r) {
      const double den = l - 2.0 * c + r;
      if (!(den < 0.0)) return 0.0;
      return std::clamp(0.5 * (l - r) / den, -0.5, 0.5);
    };
    double sub_x = 0.0, sub_y = 0.0;
    if (std::abs(best_x) < sr) sub_x = refine(score_at(best_x - 1, best_y), best, score_at(best_x + 1, best_y));
    if (std::abs(best_y) < sr) sub_y = refine(score_at(best_x, best_y - 1), best, score_at(best_x, best_y + 1));
    const double confidence = std::clamp(best, 0.0, 1.0);
    if (confidence < opts.confidence_threshold) continue;
    out.matches.push_back({f, {f.u + best_x + sub_x, f.v + best_y + sub_y}, confidence});
  }
  out.sufficient = out.matches.size() >= opts.min_matches;
  return out;
}

namespace {

Eigen::Matrix3d normalizer(const std::vector<Vec2>& pts) {
  Vec2 c = Vec2::Zero();
  for (const auto& p : pts) c += p;
  c /= static_cast<double>(pts.size());
  double d = 0.0;
  for (const auto& p : pts) d += (p - c).norm();
  d /= static_cast<double>(pts.size());
  const double s = d > 0.0 ? std::sqrt(2.0) / d : 1.0;
  Eigen::Matrix3d t;
  t << s, 0, -s * c.x(), 0, s, -s * c.y(), 0, 0, 1;
  return t;
}

std::optional<Eigen::Matrix3d> dlt(const std::vector<Vec2>& from, const std::vector<Vec2>& to) {
  const Eigen::Matrix3d tf = normalizer(from), tt = normalizer(to);
  const auto n = static_cast<Eigen::Index>(from.size());
  Eigen::MatrixXd a(std::max<Eigen::Index>(2 * n, 9), 9);
  a.setZero();
  for (Eigen::Index i = 0; i < n; ++i) {
    const Eigen::Vector3d p = tf * Eigen::Vector3d(from[static_cast<std::size_t>(i)].x(), from[static_cast<std::size_t>(i)].y(), 1.0);
    const Eigen::Vector3d q = tt * Eigen::Vector3d(to[static_cast<std::size_t>(i)].x(), to[static_cast<std::size_t>(i)].y(), 1.0);
    const double x = p.x(), y = p.y(), u = q.x(), v = q.y();
    a.row(2 * i) << -x, -y, -1, 0, 0, 0, u * x, u * y, u;
    a.row(2 * i + 1) << 0, 0, 0, -x, -y, -1, v * x, v * y, v;
  }
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(a, Eigen::ComputeFullV);
  const Eigen::VectorXd h = svd.matrixV().col(8);
  Eigen::Matrix3d hn;
  hn << h(0), h(1), h(2), h(3), h(4), h(5), h(6), h(7), h(8);
  const Eigen::Matrix3d m = tt.inverse() * hn * tf;
  if (!m.allFinite() || std::abs(m(2, 2)) < 1e-12) return std::nullopt;
  if (std::abs((m / m(2, 2)).determinant()) < 1e-12) return std::nullopt;
  return m;
}

bool collinear(const Vec2& a, const Vec2& b, const Vec2& c) {
  const Vec2 ab = b - a, ac = c - a;
  return std::abs(cross(ab, ac)) <= 1e-6 * ab.norm() * ac.norm() + 1e-12;
}

bool degenerate(const std::array<Vec2, 4>& p) {
  return collinear(p[0], p[1], p[2]) || collinear(p[0], p[1], p[3]) || collinear(p[0], p[2], p[3]) ||
         collinear(p[1], p[2], p[3]);
}

double residual(const Eigen::Matrix3d& h, const Correspondence& c) {
  const Eigen::Vector3d q = h * Eigen::Vector3d(c.reference.u, c.reference.v, 1.0);
  if (std::abs(q.z()) < 1e-15) return std::numeric_limits<double>::infinity();
  return std::hypot(q.x() / q.z() - c.observed.u, q.y() / q.z() - c.observed.v);
}

}  // namespace

Homography fit_homography_dlt(const std::vector<Correspondence>& matches) {
  if (matches.size() < 4) throw PipelineError("homography fit needs at least 4 matches");
  std::vector<Vec2> from, to;
  for (const auto& m : matches) {
    from.push_back(vec(m.reference));
    to.push_back(vec(m.observed));
  }
  auto h = dlt(from, to);
  if (!h) throw PipelineError("homography fit is degenerate");
  return Homography(*h);
}

HomographyFit fit_homography_ransac(const std::vector<Correspondence>& matches, const RansacParams& params) {
  const std::size_t n = matches.size();
  if (n < 4) throw PipelineError("RANSAC needs at least 4 matches, got " + std::to_string(n));
  if (!(params.inlier_threshold > 0.0) || params.max_iterations < 1 || !(params.confidence > 0.0 && params.confidence < 1.0))
    throw ConfigError("invalid RANSAC parameters");

  Rng rng(params.seed);
  std::optional<Eigen::Matrix3d> best;
  std::size_t best_inliers = 0;
  double best_cost = std::numeric_limits<double>::infinity();
  double needed = params.max_iterations;
  int it = 0;
  const double thr = params.inlier_threshold;
  for (; it < params.max_iterations && it < needed; ++it) {
    std::array<std::size_t, 4> idx{};
    for (int k = 0; k < 4; ++k) {
      bool fresh;
      do {
        idx[k] = static_cast<std::size_t>(rng.below(n));
        fresh = std::find(idx.begin(), idx.begin() + k, idx[k]) == idx.begin() + k;
      } while (!fresh);
    }
    std::array<Vec2, 4> a, b;
    for (int k = 0; k < 4; ++k) {
      a[k] = vec(matches[idx[k]].reference);
      b[k] = vec(matches[idx[k]].observed);
    }
    if (degenerate(a) || degenerate(b)) continue;
    auto h = dlt({a.begin(), a.end()}, {b.begin(), b.end()});
    if (!h) continue;
    std::size_t inl = 0;
    double cost = 0.0;
    for (const auto& m : matches) {
      const double r = residual(*h, m);
      if (r <= thr) {
        ++inl;
        cost += r * r;
      } else {
        cost += thr * thr;
      }
    }
    if (inl > best_inliers || (inl == best_inliers && cost < best_cost)) {
      best = h;
      best_inliers = inl;
      best_cost = cost;
      const double w = static_cast<double>(inl) / static_cast<double>(n);
      const double miss = 1.0 - std::pow(w, 4);
      needed = miss <= 0.0 ? 1.0 : std::ceil(std::log(1.0 - params.confidence) / std::log(miss));
    }
  }
  if (!best || best_inliers < 4) throw PipelineError("RANSAC found no non-degenerate hypothesis");

  HomographyFit fit;
  fit.iterations = it;
  Eigen::Matrix3d h = *best;
  for (int refit = 0; refit < 2; ++refit) {
    std::vector<Vec2> from, to;
    for (const auto& m : matches)
      if (residual(h, m) <= thr) {
        from.push_back(vec(m.reference));
        to.push_back(vec(m.observed));
      }
    if (from.size() < 4) break;
    if (auto r = dlt(from, to)) h = *r;
  }
  fit.homography = Homography(h);
  fit.inliers.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double r = residual(fit.homography.matrix(), matches[i]);
    fit.inliers[i] = r <= thr;
    fit.inlier_count += fit.inliers[i] ? 1 : 0;
    if (!params.inliers_only || fit.inliers[i]) fit.residuals.push_back(r);
  }
  return fit;
}

FrameWarping evaluate_frame(const FrameInput& frame, const scene::FiducialTarget& target, const ImageF& reference,
                            const WarpingParams& params) {
  FrameWarping out;
  out.frame_index = frame.frame_index;
  try {
    if (!frame.image) throw ConfigError("frame has no image");
    TargetDetection det;
    if (params.detection == DetectionMode::Oracle) {
      if (!frame.oracle_corners) throw ConfigError("oracle detection needs projected corners");
      det = oracle_target(*frame.image, target, *frame.oracle_corners);
    } else {
      det = detect_target(*frame.image, target, params.detect);
    }
    MatchResult m = match_features(reference, target.features(), det.crop, params.match);
    out.matches = m.matches.size();
    out.sufficient = m.sufficient;
    if (!m.sufficient) {
      out.failure = "insufficient matches: " + std::to_string(m.matches.size()) + " < " +
                    std::to_string(params.match.min_matches);
      return out;
    }
    Rng rng(mix_seed(params.seed, static_cast<std::uint64_t>(frame.frame_index)));
    for (auto& c : m.matches) {
      c.observed = det.reference_to_image.apply(c.observed);
      if (params.localization_noise_px > 0.0) {
        c.observed.u += params.localization_noise_px * rng.normal();
        c.observed.v += params.localization_noise_px * rng.normal();
      }
    }
    RansacParams rp = params.ransac;
    rp.seed = mix_seed(params.ransac.seed, static_cast<std::uint64_t>(frame.frame_index));
    HomographyFit fit = fit_homography_ransac(m.matches, rp);
    out.residuals = std::move(fit.residuals);
    out.mean = out.residuals.empty() ? 0.0 : stats::mean(out.residuals);
  } catch (const PipelineError& e) {
    out.sufficient = false;
    out.failure = e.what();
  } catch (const GeometryError& e) {
    out.sufficient = false;
    out.failure = e.what();
  }
  return out;
}

WarpingReport summarize_warping(std::vector<FrameWarping> frames) {
  WarpingReport r;
  r.frames = std::move(frames);
  std::vector<double> means, pooled;
  double matches = 0.0;
  for (const auto& f : r.frames) {
    if (!f.sufficient || !f.failure.empty() || f.residuals.empty()) continue;
    means.push_back(f.mean);
    pooled.insert(pooled.end(), f.residuals.begin(), f.residuals.end());
    matches += static_cast<double>(f.matches);
  }
  if (means.empty()) throw PipelineError("warping error: every frame is insufficient");
  r.frames_used = means.size();
  r.mean = stats::mean(means);
  r.mean_std = stats::sample_sd(means);
  r.median = stats::median(pooled);
  r.p90 = stats::quantile(pooled, 0.9);
  r.matches_per_frame = matches / static_cast<double>(means.size());
  return r;
}

WarpingReport warping_error(const std::vector<FrameInput>& clip, const scene::FiducialTarget& target,
                            const ImageF& reference, const WarpingParams& params) {
  if (clip.empty()) throw ConfigError("warping error needs at least one frame");
  std::vector<FrameWarping> frames;
  frames.reserve(clip.size());
  for (const auto& f : clip) frames.push_back(evaluate_frame(f, target, reference, params));
  return summarize_warping(std::move(frames));
}

}  // namespace vstbench::metrics
