#include "vstbench/report.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>

namespace vstbench::report {

namespace {

std::string num(double v, int digits = 6) {
  if (std::isnan(v)) return "";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

Json jnum(double v) { return std::isfinite(v) ? Json(v) : Json(nullptr); }

std::string mode_name(passthrough::Mode m) { return passthrough::to_string(m); }
std::string side_name(geometry::Side s) { return std::string(geometry::to_string(s)); }

Json cell_json(const bench::CellStats& c) {
  return Json{{"mean", c.mean},         {"sd_scene", c.sd_scene}, {"sd_frame", c.sd_frame},
              {"sd_pixel", c.sd_pixel}, {"scenes", c.scenes},     {"frames", c.frames},
              {"pixels", c.pixels}};
}

const char* branch_name(study::Branch b) { return b == study::Branch::Parametric ? "parametric" : "nonparametric"; }

Json test_json(const study::TestResult& t) {
  return Json{{"test", t.name},           {"statistic_name", t.statistic_name}, {"statistic", jnum(t.statistic)},
              {"dof1", jnum(t.dof1)},     {"dof2", jnum(t.dof2)},               {"p", jnum(t.p)},
              {"p_adjusted", jnum(t.p_adjusted)}, {"p_exact", jnum(t.p_exact)}, {"p_normal", jnum(t.p_normal)},
              {"effect", jnum(t.effect)}, {"n", t.n},                           {"degenerate", t.degenerate},
              {"significant", t.significant}, {"note", t.note}};
}

Json summary_json(const study::Summary& s) {
  return Json{{"mean", s.mean}, {"sd", s.sd}, {"median", s.median}, {"iqr", s.iqr}, {"n", s.n}};
}

Json variables_json(const std::vector<study::VariableSummary>& rows) {
  Json out = Json::array();
  for (const auto& v : rows) {
    Json row{{"variable", v.variable}};
    for (auto c : study::kConditions)
      row[study::to_string(c)] = summary_json(v.by_condition[static_cast<std::size_t>(c)]);
    out.push_back(row);
  }
  return out;
}

Json symptom_cell_json(const study::SymptomCell& c) {
  return Json{{"mean", c.mean}, {"sd", c.sd}, {"percent", c.percent}};
}

std::string variables_csv(const std::vector<study::VariableSummary>& rows) {
  std::ostringstream out;
  out << "variable,condition,mean,sd,median,iqr,n\n";
  for (const auto& v : rows)
    for (auto c : study::kConditions) {
      const auto& s = v.by_condition[static_cast<std::size_t>(c)];
      out << v.variable << "," << study::to_string(c) << "," << num(s.mean, 4) << "," << num(s.sd, 4) << ","
          << num(s.median, 4) << "," << num(s.iqr, 4) << "," << s.n << "\n";
    }
  return out.str();
}

std::string p_text(double p) {
  if (std::isnan(p)) return "n/a";
  if (p < 0.001) return "<0.001";
  return num(p, 3);
}

void diff_rec(const Json& a, const Json& b, const std::string& path, const DiffOptions& o,
              std::vector<std::string>& out) {
  const std::string where = path.empty() ? "/" : path;
  if (a.is_number() && b.is_number()) {
    const double x = a.get<double>(), y = b.get<double>();
    const double tol = o.abs_tol + o.rel_tol * std::max(std::abs(x), std::abs(y));
    if (std::abs(x - y) > tol) out.push_back(where + ": expected " + a.dump() + ", got " + b.dump());
    return;
  }
  if (a.type() != b.type()) {
    out.push_back(where + ": expected " + a.dump() + ", got " + b.dump());
    return;
  }
  if (a.is_object()) {
    for (auto it = a.begin(); it != a.end(); ++it) {
      if (!b.contains(it.key())) {
        out.push_back(path + "/" + it.key() + ": missing");
        continue;
      }
      diff_rec(it.value(), b.at(it.key()), path + "/" + it.key(), o, out);
    }
    for (auto it = b.begin(); it != b.end(); ++it)
      if (!a.contains(it.key())) out.push_back(path + "/" + it.key() + ": unexpected");
    return;
  }
  if (a.is_array()) {
    if (a.size() != b.size()) {
      out.push_back(where + ": expected " + std::to_string(a.size()) + " elements, got " + std::to_string(b.size()));
      return;
    }
    for (std::size_t i = 0; i < a.size(); ++i) diff_rec(a[i], b[i], path + "/" + std::to_string(i), o, out);
    return;
  }
  if (a != b) out.push_back(where + ": expected " + a.dump() + ", got " + b.dump());
}

}  // namespace

Json error_stats_json(const stats::ErrorStats& s) {
  return Json{{"mean", s.mean}, {"std", s.stddev}, {"median", s.median}, {"p90", s.p90}, {"count", s.count}};
}

Json warping_json(const metrics::WarpingReport& r, bool with_frames) {
  Json j{{"mean", r.mean},
         {"std", r.mean_std},
         {"median", r.median},
         {"p90", r.p90},
         {"frames_used", r.frames_used},
         {"frames_total", r.frames.size()},
         {"matches_per_frame", r.matches_per_frame}};
  if (with_frames) {
    Json frames = Json::array();
    for (const auto& f : r.frames)
      frames.push_back(Json{{"frame", f.frame_index},
                            {"matches", f.matches},
                            {"sufficient", f.sufficient},
                            {"mean", f.mean},
                            {"failure", f.failure}});
    j["frames"] = frames;
  }
  return j;
}

Json benchmark_json(const bench::BenchmarkConfig& config, const bench::BenchmarkResult& result) {
  Json table = Json::array();
  for (const auto& row : result.table) {
    table.push_back(Json{{"mode", mode_name(row.mode)},
                         {"spatial_error_px", {{"left", cell_json(row.spatial[0])}, {"right", cell_json(row.spatial[1])}}},
                         {"depth_error_m", {{"left", cell_json(row.depth[0])}, {"right", cell_json(row.depth[1])}}}});
  }
  Json ranges = Json::array();
  for (const auto& r : result.ranges) {
    Json mae = Json::array();
    for (double v : r.by_range.mae_mm) mae.push_back(jnum(v));
    ranges.push_back(Json{{"mode", mode_name(r.mode)},
                          {"eye", side_name(r.eye)},
                          {"edges_mm", r.by_range.edges_mm},
                          {"mae_mm", mae},
                          {"counts", r.by_range.counts}});
  }
  Json warping = Json::array();
  for (const auto& w : result.warping)
    warping.push_back(Json{{"mode", mode_name(w.mode)}, {"warping_error_px", warping_json(w.report, true)}});
  // where the report lands is not part of the experiment
  Json cfg = io::config_to_json(config);
  cfg.erase("output_dir");
  return Json{{"config", cfg},
              {"table1", table},
              {"depth_error_by_range", ranges},
              {"table2", warping}};
}

std::string table1_csv(const bench::BenchmarkResult& result) {
  std::ostringstream out;
  out << "mode,metric,eye,mean,sd_scene,sd_frame,sd_pixel,scenes,frames,pixels\n";
  for (const auto& row : result.table)
    for (int m = 0; m < 2; ++m)
      for (std::size_t e = 0; e < 2; ++e) {
        const auto& c = m == 0 ? row.spatial[e] : row.depth[e];
        out << mode_name(row.mode) << "," << (m == 0 ? "spatial_error_px" : "depth_error_m") << ","
            << (e == 0 ? "left" : "right") << "," << num(c.mean) << "," << num(c.sd_scene) << ","
            << num(c.sd_frame) << "," << num(c.sd_pixel) << "," << c.scenes << "," << c.frames << "," << c.pixels
            << "\n";
      }
  return out.str();
}

std::string table1_text(const bench::BenchmarkResult& result) {
  std::ostringstream out;
  char line[256];
  std::snprintf(line, sizeof line, "%-16s %-22s %-22s %-22s %-22s\n", "mode", "spatial left (px)",
                "spatial right (px)", "depth left (m)", "depth right (m)");
  out << line;
  for (const auto& row : result.table) {
    auto cell = [](const bench::CellStats& c) { return num(c.mean, 3) + " +- " + num(c.sd_pixel, 3); };
    std::snprintf(line, sizeof line, "%-16s %-22s %-22s %-22s %-22s\n", mode_name(row.mode).c_str(),
                  cell(row.spatial[0]).c_str(), cell(row.spatial[1]).c_str(), cell(row.depth[0]).c_str(),
                  cell(row.depth[1]).c_str());
    out << line;
  }
  out << "(+- is the pixel-level standard deviation; scene- and frame-level spreads are in the CSV)\n";
  return out.str();
}

std::string by_range_csv(const bench::BenchmarkResult& result) {
  std::ostringstream out;
  out << "mode,eye,bin_start_mm,bin_end_mm,bin_center_mm,mae_mm,count\n";
  for (const auto& r : result.ranges)
    for (std::size_t i = 0; i < r.by_range.counts.size(); ++i)
      out << mode_name(r.mode) << "," << side_name(r.eye) << "," << num(r.by_range.edges_mm[i], 1) << ","
          << num(r.by_range.edges_mm[i + 1], 1) << "," << num(r.by_range.center(i), 1) << ","
          << num(r.by_range.mae_mm[i], 3) << "," << r.by_range.counts[i] << "\n";
  return out.str();
}

std::string frames_csv(const bench::BenchmarkResult& result) {
  std::ostringstream out;
  out << "scene,frame,mode,eye,spatial_mean_px,spatial_sd_px,spatial_pixels,depth_mae_m,depth_sd_m,depth_pixels\n";
  for (const auto& f : result.frames)
    out << f.scene << "," << f.frame << "," << mode_name(f.mode) << "," << side_name(f.eye) << ","
        << num(f.spatial_mean) << "," << num(f.spatial_sd) << "," << f.spatial_pixels << "," << num(f.depth_mae)
        << "," << num(f.depth_sd) << "," << f.depth_pixels << "\n";
  return out.str();
}

std::string table2_csv(const bench::BenchmarkResult& result) {
  std::ostringstream out;
  out << "mode,mean_px,std_px,median_px,p90_px,frames_used,matches_per_frame\n";
  for (const auto& w : result.warping)
    out << mode_name(w.mode) << "," << num(w.report.mean) << "," << num(w.report.mean_std) << ","
        << num(w.report.median) << "," << num(w.report.p90) << "," << w.report.frames_used << ","
        << num(w.report.matches_per_frame, 2) << "\n";
  return out.str();
}

std::string table2_text(const bench::BenchmarkResult& result) {
  std::ostringstream out;
  char line[160];
  std::snprintf(line, sizeof line, "%-16s %-18s %-10s %-10s\n", "mode", "mean (px)", "median", "p90");
  out << line;
  for (const auto& w : result.warping) {
    const std::string mean = num(w.report.mean, 2) + " +- " + num(w.report.mean_std, 2);
    std::snprintf(line, sizeof line, "%-16s %-18s %-10s %-10s\n", mode_name(w.mode).c_str(), mean.c_str(),
                  num(w.report.median, 2).c_str(), num(w.report.p90, 2).c_str());
    out << line;
  }
  return out.str();
}

Json study_json(const study::StudyReport& r, const study::StudyConfig& config) {
  Json symptoms = Json::array();
  for (const auto& s : r.symptoms) {
    Json row{{"symptom", s.symptom}};
    for (auto c : study::kConditions)
      row[study::to_string(c)] = symptom_cell_json(s.by_condition[static_cast<std::size_t>(c)]);
    row["DP_and_GAP_intersection"] = symptom_cell_json(s.intersection);
    row["DP_and_GAP_mean_of_means"] = symptom_cell_json(s.mean_of_means);
    row["groups"] = Json{{"N", s.groups[0]}, {"O", s.groups[1]}, {"D", s.groups[2]}};
    symptoms.push_back(row);
  }
  Json tests = Json::array();
  for (const auto& t : r.tests) {
    Json pairs = Json::array();
    for (const auto& p : t.pairwise)
      pairs.push_back(Json{{"a", study::to_string(p.a)},
                           {"b", study::to_string(p.b)},
                           {"direction", p.direction},
                           {"result", test_json(p.result)}});
    tests.push_back(Json{{"family", t.family},
                         {"variable", t.variable},
                         {"branch", branch_name(t.branch)},
                         {"omnibus", test_json(t.omnibus)},
                         {"pairwise", pairs}});
  }
  return Json{{"config",
               {{"total_rule", config.total_rule == study::TotalRule::RawSum ? "raw_sum" : "subscale_sum"},
                {"alpha", config.alpha},
                {"exact_max_n", config.exact_max_n},
                {"parametric", config.parametric}}},
              {"participants", r.participants},
              {"excluded", r.excluded},
              {"warnings", r.warnings},
              {"ssq_delta", variables_json(r.ssq)},
              {"symptoms", symptoms},
              {"discomfort", variables_json(r.discomfort)},
              {"performance", variables_json(r.performance)},
              {"tests", tests}};
}

std::string ssq_csv(const study::StudyReport& r) { return variables_csv(r.ssq); }
std::string discomfort_csv(const study::StudyReport& r) { return variables_csv(r.discomfort); }
std::string performance_csv(const study::StudyReport& r) { return variables_csv(r.performance); }

std::string symptoms_csv(const study::StudyReport& r) {
  std::ostringstream out;
  out << "symptom";
  for (const char* c : {"NV", "DP", "GAP", "DP_and_GAP_intersection", "DP_and_GAP_mean_of_means"})
    out << "," << c << "_mean," << c << "_sd," << c << "_percent";
  out << ",N,O,D\n";
  auto cell = [&](const study::SymptomCell& c) {
    out << "," << num(c.mean, 4) << "," << num(c.sd, 4) << "," << num(c.percent, 2);
  };
  for (const auto& s : r.symptoms) {
    out << "\"" << s.symptom << "\"";
    for (const auto& c : s.by_condition) cell(c);
    cell(s.intersection);
    cell(s.mean_of_means);
    for (bool g : s.groups) out << "," << (g ? "x" : "");
    out << "\n";
  }
  return out.str();
}

std::string tests_csv(const study::StudyReport& r) {
  std::ostringstream out;
  out << "family,variable,branch,comparison,test,statistic_name,statistic,dof1,dof2,p,p_adjusted,p_exact,p_normal,"
         "effect,n,degenerate,significant\n";
  auto row = [&](const study::VariableTests& t, const std::string& cmp, const study::TestResult& x) {
    out << t.family << ",\"" << t.variable << "\"," << branch_name(t.branch) << "," << cmp << "," << x.name << ","
        << x.statistic_name << "," << num(x.statistic) << "," << num(x.dof1, 0) << "," << num(x.dof2, 0) << ","
        << num(x.p, 8) << "," << num(x.p_adjusted, 8) << "," << num(x.p_exact, 8) << "," << num(x.p_normal, 8)
        << "," << num(x.effect, 4) << "," << x.n << "," << (x.degenerate ? 1 : 0) << "," << (x.significant ? 1 : 0)
        << "\n";
  };
  for (const auto& t : r.tests) {
    row(t, "omnibus", t.omnibus);
    for (const auto& p : t.pairwise) row(t, p.direction, p.result);
  }
  return out.str();
}

std::string tests_text(const study::StudyReport& r) {
  std::ostringstream out;
  for (const auto& t : r.tests) {
    if (t.family == "symptom") continue;
    const auto& o = t.omnibus;
    out << t.family << " / " << t.variable << ": ";
    if (o.statistic_name == "F")
      out << "F(" << num(o.dof1, 0) << ", " << num(o.dof2, 0) << ") = " << num(o.statistic, 2)
          << ", eta2 = " << num(o.effect, 3);
    else
      out << "chi2 = " << num(o.statistic, 2);
    out << ", p " << p_text(o.p) << (o.significant ? " *" : "") << "; ";
    for (std::size_t i = 0; i < t.pairwise.size(); ++i) {
      const auto& p = t.pairwise[i];
      out << (i ? ", " : "") << p.direction << " (p_adj " << p_text(p.result.p_adjusted) << ")"
          << (p.result.significant ? " *" : "");
    }
    out << "\n";
  }
  return out.str();
}

std::vector<std::string> diff(const Json& expected, const Json& actual, const DiffOptions& opts) {
  std::vector<std::string> out;
  diff_rec(expected, actual, "", opts, out);
  return out;
}

}  // namespace vstbench::report
