#include "vstbench/study.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <iomanip>
#include <sstream>

#include "vstbench/error.hpp"
#include "vstbench/random.hpp"
#include "vstbench/stats.hpp"

namespace vstbench::study {

namespace {

std::size_t index_of(Condition c) { return static_cast<std::size_t>(c); }

std::string trim(std::string s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  s = s.substr(b, e - b + 1);
  if (s.size() >= 2 && s.front() == '"' && s.back() == '"') s = s.substr(1, s.size() - 2);
  return s;
}

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream ss(line);
  while (std::getline(ss, cur, ',')) out.push_back(trim(cur));
  if (!line.empty() && line.back() == ',') out.push_back("");
  return out;
}

bool parse_int(const std::string& s, int& out) {
  const auto* end = s.data() + s.size();
  auto [p, ec] = std::from_chars(s.data(), end, out);
  return ec == std::errc() && p == end;
}

bool parse_double(const std::string& s, double& out) {
  if (s.empty()) return false;
  try {
    std::size_t used = 0;
    out = std::stod(s, &used);
    return used == s.size() && std::isfinite(out);
  } catch (const std::exception&) {
    return false;
  }
}

std::string fmt(double v) {
  std::ostringstream ss;
  ss << std::fixed << std::setprecision(2) << v;
  return ss.str();
}

int clamp_int(double v, int lo, int hi) { return std::clamp(static_cast<int>(std::lround(v)), lo, hi); }

}  // namespace

std::string to_string(Condition c) {
  switch (c) {
    case Condition::NV: return "NV";
    case Condition::DP: return "DP";
    case Condition::GAP: return "GAP";
  }
  return "?";
}

Condition parse_condition(const std::string& s) {
  if (s == "NV") return Condition::NV;
  if (s == "DP") return Condition::DP;
  if (s == "GAP") return Condition::GAP;
  throw ConfigError("unknown condition '" + s + "' (expected NV, DP or GAP)");
}

void ConditionRecord::validate() const {
  if (participant.empty()) throw ConfigError("participant id is empty");
  try {
    validate_response(pre);
    validate_response(post);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  for (int d : discomfort)
    if (d < 0 || d > 10) throw ConfigError("discomfort score " + std::to_string(d) + " outside 0..10");
  for (double p : performance)
    if (!(p >= 0) || !std::isfinite(p)) throw ConfigError("performance values must be finite and >= 0");
}

std::vector<std::string> csv_columns() {
  std::vector<std::string> c = {"participant", "condition"};
  for (int i = 1; i <= kSsqItems; ++i) c.push_back("pre_" + std::to_string(i));
  for (int i = 1; i <= kSsqItems; ++i) c.push_back("post_" + std::to_string(i));
  for (const char* t : kTasks) c.push_back(std::string("discomfort_") + t);
  for (const char* p : kPerformanceFields) c.push_back(p);
  return c;
}

std::vector<ConditionRecord> parse_study_csv(const std::string& text, const std::string& source) {
  const auto columns = csv_columns();
  std::vector<std::string> errors;
  std::vector<ConditionRecord> records;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  bool header_seen = false;
  std::map<std::pair<std::string, Condition>, int> seen;

  while (std::getline(in, line)) {
    ++lineno;
    if (trim(line).empty()) continue;
    const auto fields = split(line);
    const std::string where = source + ":" + std::to_string(lineno);
    if (!header_seen) {
      header_seen = true;
      if (fields != columns) {
        for (const auto& c : columns)
          if (std::find(fields.begin(), fields.end(), c) == fields.end())
            errors.push_back(where + ": missing column '" + c + "'");
        for (const auto& f : fields)
          if (std::find(columns.begin(), columns.end(), f) == columns.end())
            errors.push_back(where + ": unknown column '" + f + "'");
        if (errors.empty()) errors.push_back(where + ": columns out of order; expected the documented order");
        break;
      }
      continue;
    }
    if (fields.size() != columns.size()) {
      errors.push_back(where + ": expected " + std::to_string(columns.size()) + " fields, found " +
                       std::to_string(fields.size()));
      continue;
    }
    ConditionRecord r;
    auto err = [&](std::size_t col, const std::string& msg) {
      errors.push_back(where + ", column '" + columns[col] + "': " + msg);
    };
    r.participant = fields[0];
    if (r.participant.empty()) err(0, "participant id is empty");
    bool condition_ok = true;
    try {
      r.condition = parse_condition(fields[1]);
    } catch (const ConfigError& e) {
      err(1, e.what());
      condition_ok = false;
    }
    for (int i = 0; i < 2 * kSsqItems; ++i) {
      const std::size_t col = 2 + static_cast<std::size_t>(i);
      int v = 0;
      if (!parse_int(fields[col], v) || v < 0 || v > 3) {
        err(col, "expected an integer rating 0..3, found '" + fields[col] + "'");
        continue;
      }
      (i < kSsqItems ? r.pre[i] : r.post[i - kSsqItems]) = v;
    }
    for (std::size_t t = 0; t < 3; ++t) {
      const std::size_t col = 2 + 2 * kSsqItems + t;
      int v = 0;
      if (!parse_int(fields[col], v) || v < 0 || v > 10) {
        err(col, "expected an integer 0..10, found '" + fields[col] + "'");
        continue;
      }
      r.discomfort[t] = v;
    }
    for (std::size_t p = 0; p < kPerformanceFields.size(); ++p) {
      const std::size_t col = 5 + 2 * kSsqItems + p;
      double v = 0;
      if (!parse_double(fields[col], v) || v < 0) {
        err(col, "expected a non-negative number, found '" + fields[col] + "'");
        continue;
      }
      r.performance[p] = v;
    }
    if (condition_ok && !r.participant.empty()) {
      auto [it, inserted] = seen.emplace(std::make_pair(r.participant, r.condition), lineno);
      if (!inserted)
        errors.push_back(where + ": duplicate row for participant '" + r.participant + "' condition " +
                         to_string(r.condition) + " (first on line " + std::to_string(it->second) + ")");
    }
    records.push_back(std::move(r));
  }
  if (!header_seen) errors.push_back(source + ": empty CSV (no header)");
  else if (records.empty() && errors.empty()) errors.push_back(source + ": no data rows");
  if (!errors.empty()) {
    std::string msg = std::to_string(errors.size()) + " schema error" + (errors.size() > 1 ? "s" : "") + ":";
    for (const auto& e : errors) msg += "\n  " + e;
    throw ConfigError(msg);
  }
  return records;
}

std::string write_study_csv(const std::vector<ConditionRecord>& records) {
  std::ostringstream out;
  const auto cols = csv_columns();
  for (std::size_t i = 0; i < cols.size(); ++i) out << (i ? "," : "") << cols[i];
  out << "\n";
  for (const auto& r : records) {
    out << r.participant << "," << to_string(r.condition);
    for (int v : r.pre) out << "," << v;
    for (int v : r.post) out << "," << v;
    for (int v : r.discomfort) out << "," << v;
    for (double v : r.performance) out << "," << fmt(v);
    out << "\n";
  }
  return out.str();
}

Branch StudyConfig::branch_for(const std::string& variable) const {
  return std::find(parametric.begin(), parametric.end(), variable) != parametric.end() ? Branch::Parametric
                                                                                       : Branch::Nonparametric;
}

Summary summarize(const std::vector<double>& v) {
  Summary s;
  s.n = v.size();
  if (v.empty()) return s;
  s.mean = stats::mean(v);
  s.sd = stats::sample_sd(v);
  s.median = stats::median(v);
  s.iqr = stats::iqr(v);
  return s;
}

namespace {

using Columns = std::array<std::vector<double>, 3>;

VariableSummary summarize_columns(const std::string& name, const Columns& c) {
  VariableSummary v;
  v.variable = name;
  for (std::size_t j = 0; j < 3; ++j) v.by_condition[j] = summarize(c[j]);
  return v;
}

VariableTests run_tests(const std::string& family, const std::string& name, const Columns& c,
                        const StudyConfig& config) {
  VariableTests vt;
  vt.family = family;
  vt.variable = name;
  vt.branch = family == "symptom" ? Branch::Nonparametric : config.branch_for(name);
  Matrix m(c[0].size(), std::vector<double>(3));
  for (std::size_t i = 0; i < m.size(); ++i)
    for (std::size_t j = 0; j < 3; ++j) m[i][j] = c[j][i];

  if (vt.branch == Branch::Parametric) {
    vt.omnibus = rm_anova(m);
  } else {
    vt.omnibus = friedman_test(m);
    if (config.friedman_exact && !vt.omnibus.degenerate) {
      try {
        vt.omnibus.p_exact = friedman_exact_p(m);
      } catch (const std::length_error&) {
      }
    }
  }
  vt.omnibus.significant = !vt.omnibus.degenerate && vt.omnibus.p < config.alpha;

  const std::array<std::pair<Condition, Condition>, 3> pairs = {
      {{Condition::DP, Condition::NV}, {Condition::GAP, Condition::NV}, {Condition::DP, Condition::GAP}}};
  std::vector<double> raw;
  for (auto [a, b] : pairs) {
    PairwiseTest pt;
    pt.a = a;
    pt.b = b;
    const auto& xa = c[index_of(a)];
    const auto& xb = c[index_of(b)];
    if (vt.branch == Branch::Parametric) {
      pt.result = paired_t_test(xa, xb);
    } else {
      try {
        pt.result = wilcoxon_signed_rank(xa, xb, config.exact_max_n);
      } catch (const std::invalid_argument& e) {
        pt.result.name = "wilcoxon";
        pt.result.statistic_name = "W";
        pt.result.degenerate = true;
        pt.result.n = 0;
        pt.result.note = "degenerate pairing";
      }
    }
    const std::string op = pt.result.note == "a > b" ? " > " : (pt.result.note == "a < b" ? " < " : " = ");
    pt.direction = to_string(a) + op + to_string(b);
    raw.push_back(pt.result.degenerate && std::isnan(pt.result.p) ? kNaN : pt.result.p);
    vt.pairwise.push_back(std::move(pt));
  }
  const auto adjusted = holm_bonferroni(raw);
  for (std::size_t i = 0; i < vt.pairwise.size(); ++i) {
    auto& r = vt.pairwise[i].result;
    r.p_adjusted = adjusted[i];
    r.significant = !r.degenerate && !std::isnan(r.p_adjusted) && r.p_adjusted < config.alpha;
  }
  return vt;
}

}  // namespace

StudyReport score_study(const std::vector<ConditionRecord>& records, const StudyConfig& config) {
  std::map<std::string, std::array<const ConditionRecord*, 3>> by_participant;
  for (const auto& r : records) {
    r.validate();
    auto& slot = by_participant[r.participant][index_of(r.condition)];
    if (slot) throw ConfigError("duplicate record for participant '" + r.participant + "' condition " +
                                to_string(r.condition));
    slot = &r;
  }
  StudyReport report;
  std::vector<std::array<const ConditionRecord*, 3>> complete;
  for (const auto& [id, slots] : by_participant) {
    std::string missing;
    for (auto c : kConditions)
      if (!slots[index_of(c)]) missing += (missing.empty() ? "" : ", ") + to_string(c);
    if (missing.empty()) {
      complete.push_back(slots);
    } else {
      report.excluded.push_back(id);
      report.warnings.push_back("participant '" + id + "' excluded: missing " + missing);
    }
  }
  if (complete.size() < 2) throw ConfigError("study needs at least 2 participants with all three conditions");
  report.participants = complete.size();

  std::array<Columns, 4> ssq;  // N, O, D, TS
  std::array<Columns, kSsqItems> items;
  std::array<Columns, 4> disc;
  std::array<Columns, 5> perf;
  for (const auto& slots : complete) {
    for (std::size_t j = 0; j < 3; ++j) {
      const auto& r = *slots[j];
      const auto d = ssq_delta(ssq_score(r.pre, config.total_rule), ssq_score(r.post, config.total_rule));
      ssq[0][j].push_back(d.nausea);
      ssq[1][j].push_back(d.oculomotor);
      ssq[2][j].push_back(d.disorientation);
      ssq[3][j].push_back(d.total);
      for (int i = 0; i < kSsqItems; ++i) items[i][j].push_back(r.post[i] - r.pre[i]);
      double sum = 0;
      for (std::size_t t = 0; t < 3; ++t) {
        disc[t][j].push_back(r.discomfort[t]);
        sum += r.discomfort[t];
      }
      disc[3][j].push_back(sum / 3.0);
      for (std::size_t p = 0; p < 5; ++p) perf[p][j].push_back(r.performance[p]);
    }
  }

  const std::array<const char*, 4> ssq_names = {"nausea", "oculomotor", "disorientation", "total"};
  const std::array<const char*, 4> disc_names = {"typing", "navigation", "interaction", "average"};
  for (std::size_t s = 0; s < 4; ++s) report.ssq.push_back(summarize_columns(ssq_names[s], ssq[s]));
  for (std::size_t t = 0; t < 4; ++t) report.discomfort.push_back(summarize_columns(disc_names[t], disc[t]));
  for (std::size_t p = 0; p < 5; ++p) report.performance.push_back(summarize_columns(kPerformanceFields[p], perf[p]));

  const double n = static_cast<double>(complete.size());
  for (int i = 0; i < kSsqItems; ++i) {
    SymptomRow row;
    row.symptom = std::string(kSsqItemNames[i]);
    row.groups = kSsqGroups[i];
    for (std::size_t j = 0; j < 3; ++j) {
      const auto& v = items[i][j];
      const auto positive = std::count_if(v.begin(), v.end(), [](double x) { return x > 0; });
      row.by_condition[j] = {stats::mean(v), stats::sample_sd(v), 100.0 * static_cast<double>(positive) / n};
    }
    const auto& dp = items[i][index_of(Condition::DP)];
    const auto& gap = items[i][index_of(Condition::GAP)];
    std::vector<double> avg;
    std::size_t both = 0;
    for (std::size_t k = 0; k < dp.size(); ++k) {
      avg.push_back(0.5 * (dp[k] + gap[k]));
      if (dp[k] > 0 && gap[k] > 0) ++both;
    }
    row.intersection = {stats::mean(avg), stats::sample_sd(avg), 100.0 * static_cast<double>(both) / n};
    const auto& cd = row.by_condition[index_of(Condition::DP)];
    const auto& cg = row.by_condition[index_of(Condition::GAP)];
    row.mean_of_means = {0.5 * (cd.mean + cg.mean), 0.5 * (cd.sd + cg.sd), 0.5 * (cd.percent + cg.percent)};
    report.symptoms.push_back(row);
  }

  for (std::size_t s = 0; s < 4; ++s) report.tests.push_back(run_tests("ssq", ssq_names[s], ssq[s], config));
  for (std::size_t t = 0; t < 4; ++t) report.tests.push_back(run_tests("discomfort", disc_names[t], disc[t], config));
  for (std::size_t p = 0; p < 5; ++p)
    report.tests.push_back(run_tests("performance", kPerformanceFields[p], perf[p], config));
  for (int i = 0; i < kSsqItems; ++i)
    report.tests.push_back(run_tests("symptom", std::string(kSsqItemNames[i]), items[i], config));
  return report;
}

std::vector<ConditionRecord> synth_cohort(const CohortSpec& spec) {
  if (spec.participants < 2) throw ConfigError("cohort needs at least 2 participants");
  // Relative symptom prevalence under VST, highest for sweating and eyestrain.
  static constexpr std::array<double, kSsqItems> prevalence = {0.9, 0.55, 0.6, 0.8, 0.55, 0.1, 1.0, 0.7,
                                                               0.5, 0.45, 0.65, 0.6, 0.4, 0.25, 0.3, 0.15};
  // Per-condition symptom intensity (NV, DP, GAP).
  static constexpr std::array<double, 3> intensity = {0.01, 0.38, 0.21};
  static constexpr std::array<std::array<double, 3>, 3> discomfort_mean = {
      {{0.6, 0.8, 0.5}, {3.2, 4.0, 3.8}, {2.6, 3.2, 3.0}}};
  static constexpr std::array<std::array<double, 5>, 3> perf_mean = {
      {{60.8, 1.75, 120.1, 1.25, 5.97}, {44.1, 3.3, 137.8, 3.75, 4.65}, {46.2, 3.0, 136.2, 2.1, 4.57}}};
  static constexpr std::array<double, 5> perf_sd = {16.0, 1.6, 15.0, 2.5, 1.3};

  std::vector<ConditionRecord> out;
  for (int p = 0; p < spec.participants; ++p) {
    Rng rng(mix_seed(spec.seed, static_cast<std::uint64_t>(p)));
    char id[16];
    std::snprintf(id, sizeof id, "P%02d", p + 1);
    const double susceptibility = std::exp(0.6 * rng.normal());
    const double discomfort_bias = rng.normal();
    std::array<double, 5> perf_bias;
    for (auto& b : perf_bias) b = rng.normal();
    const bool incomplete = spec.include_incomplete && p == spec.participants - 1;
    for (auto c : kConditions) {
      if (incomplete && c == Condition::GAP) continue;
      const std::size_t j = index_of(c);
      ConditionRecord r;
      r.participant = id;
      r.condition = c;
      for (int i = 0; i < kSsqItems; ++i) {
        r.pre[i] = rng.uniform() < 0.08 ? 1 : 0;
        const double prob = std::min(0.95, intensity[j] * susceptibility * prevalence[i]);
        int inc = 0;
        for (int draw = 0; draw < 2; ++draw) inc += rng.uniform() < prob ? 1 : 0;
        if (c == Condition::NV && r.pre[i] > 0 && rng.uniform() < 0.5) inc -= 1;
        r.post[i] = std::clamp(r.pre[i] + inc, 0, 3);
      }
      for (std::size_t t = 0; t < 3; ++t) {
        const double spread = c == Condition::NV ? 0.6 : 1.8;
        const double v = discomfort_mean[j][t] + spread * discomfort_bias + 0.9 * rng.normal();
        r.discomfort[t] = clamp_int(c == Condition::NV ? std::abs(v) : v, 0, 10);
      }
      for (std::size_t k = 0; k < 5; ++k) {
        const double v = perf_mean[j][k] + perf_sd[k] * (0.8 * perf_bias[k] + 0.6 * rng.normal());
        r.performance[k] = std::round(std::max(0.0, v) * 100.0) / 100.0;
      }
      out.push_back(r);
    }
  }
  return out;
}

}  // namespace vstbench::study
