#include "vstbench/hypothesis.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <stdexcept>

#include "vstbench/special.hpp"

namespace vstbench::study {

namespace {

void check_matrix(const Matrix& data, const char* who) {
  if (data.size() < 2) throw std::invalid_argument(std::string(who) + ": need at least 2 participants");
  const std::size_t k = data.front().size();
  if (k < 2) throw std::invalid_argument(std::string(who) + ": need at least 2 conditions");
  for (const auto& row : data) {
    if (row.size() != k) throw std::invalid_argument(std::string(who) + ": rows differ in length");
    for (double v : row)
      if (!std::isfinite(v)) throw std::invalid_argument(std::string(who) + ": missing or non-finite cell");
  }
}

void check_pairs(std::span<const double> a, std::span<const double> b, const char* who) {
  if (a.size() != b.size()) throw std::invalid_argument(std::string(who) + ": paired samples differ in length");
  for (std::size_t i = 0; i < a.size(); ++i)
    if (!std::isfinite(a[i]) || !std::isfinite(b[i]))
      throw std::invalid_argument(std::string(who) + ": missing or non-finite value");
}

// Sum of t^3 - t over tie groups of a sample.
double tie_term(std::span<const double> v) {
  std::vector<double> s(v.begin(), v.end());
  std::sort(s.begin(), s.end());
  double sum = 0.0;
  for (std::size_t i = 0; i < s.size();) {
    std::size_t j = i;
    while (j < s.size() && s[j] == s[i]) ++j;
    const double t = static_cast<double>(j - i);
    sum += t * t * t - t;
    i = j;
  }
  return sum;
}

std::vector<std::vector<int>> doubled_row_ranks(const Matrix& data) {
  std::vector<std::vector<int>> out;
  for (const auto& row : data) {
    const auto r = rank_average(row);
    std::vector<int> d;
    for (double x : r) d.push_back(static_cast<int>(std::lround(2.0 * x)));
    out.push_back(std::move(d));
  }
  return out;
}

}  // namespace

std::vector<double> rank_average(std::span<const double> v) {
  std::vector<std::size_t> idx(v.size());
  std::iota(idx.begin(), idx.end(), 0);
  std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return v[a] < v[b]; });
  std::vector<double> ranks(v.size());
  for (std::size_t i = 0; i < idx.size();) {
    std::size_t j = i;
    while (j < idx.size() && v[idx[j]] == v[idx[i]]) ++j;
    const double r = 0.5 * static_cast<double>(i + 1 + j);
    for (std::size_t m = i; m < j; ++m) ranks[idx[m]] = r;
    i = j;
  }
  return ranks;
}

TestResult friedman_test(const Matrix& data) {
  check_matrix(data, "friedman");
  const double n = static_cast<double>(data.size());
  const std::size_t kk = data.front().size();
  const double k = static_cast<double>(kk);
  std::vector<double> rank_sum(kk, 0.0);
  double ties = 0.0;
  for (const auto& row : data) {
    const auto r = rank_average(row);
    for (std::size_t j = 0; j < kk; ++j) rank_sum[j] += r[j];
    ties += tie_term(row);
  }
  double ssr = 0.0;
  for (double r : rank_sum) ssr += r * r;
  TestResult t;
  t.name = "friedman";
  t.statistic_name = "chi2";
  t.dof1 = k - 1.0;
  t.n = data.size();
  const double correction = 1.0 - ties / (n * (k * k * k - k));
  if (correction <= 1e-12) {
    t.statistic = 0.0;
    t.p = 1.0;
    t.degenerate = true;
    t.note = "all observations tied within every participant";
    return t;
  }
  const double chi2 = (12.0 / (n * k * (k + 1.0)) * ssr - 3.0 * n * (k + 1.0)) / correction;
  t.statistic = std::max(0.0, chi2);
  t.p = special::chi2_sf(t.statistic, t.dof1);
  return t;
}

double friedman_exact_p(const Matrix& data, std::size_t max_states) {
  check_matrix(data, "friedman_exact_p");
  const auto rows = doubled_row_ranks(data);
  const std::size_t k = rows.front().size();
  auto sum_sq = [](const std::vector<int>& sums) {
    long long s = 0;
    for (int v : sums) s += static_cast<long long>(v) * v;
    return s;
  };
  std::vector<int> observed(k, 0);
  for (const auto& r : rows)
    for (std::size_t j = 0; j < k; ++j) observed[j] += r[j];

  std::map<std::vector<int>, double> states{{std::vector<int>(k, 0), 1.0}};
  for (const auto& r : rows) {
    std::vector<int> perm = r;
    std::sort(perm.begin(), perm.end());
    std::vector<std::vector<int>> perms;
    do perms.push_back(perm);
    while (std::next_permutation(perm.begin(), perm.end()));
    const double w = 1.0 / static_cast<double>(perms.size());
    std::map<std::vector<int>, double> next;
    for (const auto& [sums, prob] : states) {
      for (const auto& p : perms) {
        std::vector<int> s = sums;
        for (std::size_t j = 0; j < k; ++j) s[j] += p[j];
        next[s] += prob * w;
      }
    }
    if (next.size() > max_states) throw std::length_error("friedman_exact_p: state space too large");
    states = std::move(next);
  }
  const long long obs = sum_sq(observed);
  double p = 0.0;
  for (const auto& [sums, prob] : states)
    if (sum_sq(sums) >= obs) p += prob;
  return std::min(1.0, p);
}

double wilcoxon_exact_p(std::span<const double> abs_ranks, double w) {
  std::vector<int> r2;
  int total = 0;
  for (double r : abs_ranks) {
    r2.push_back(static_cast<int>(std::lround(2.0 * r)));
    total += r2.back();
  }
  std::vector<double> counts(static_cast<std::size_t>(total) + 1, 0.0);
  counts[0] = 1.0;
  int reach = 0;
  for (int r : r2) {
    for (int s = reach; s >= 0; --s)
      if (counts[s] != 0.0) counts[s + r] += counts[s];
    reach += r;
  }
  const int w2 = static_cast<int>(std::lround(2.0 * w));
  const int t2 = std::min(w2, total - w2);
  double below = 0.0;
  for (int s = 0; s <= t2; ++s) below += counts[s];
  return std::min(1.0, 2.0 * below / std::ldexp(1.0, static_cast<int>(r2.size())));
}

TestResult wilcoxon_signed_rank(std::span<const double> a, std::span<const double> b, int exact_max_n) {
  check_pairs(a, b, "wilcoxon");
  std::vector<double> diff, mag;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = a[i] - b[i];
    if (d != 0.0) {
      diff.push_back(d);
      mag.push_back(std::abs(d));
    }
  }
  if (diff.empty()) throw std::invalid_argument("wilcoxon: degenerate pairing (all differences are zero)");
  const auto ranks = rank_average(mag);
  double w_plus = 0.0, w_minus = 0.0;
  for (std::size_t i = 0; i < diff.size(); ++i) (diff[i] > 0 ? w_plus : w_minus) += ranks[i];

  TestResult t;
  t.name = "wilcoxon";
  t.statistic_name = "W";
  t.statistic = std::min(w_plus, w_minus);
  t.n = diff.size();
  const double n = static_cast<double>(diff.size());
  const double mean = n * (n + 1.0) / 4.0;
  const double var = n * (n + 1.0) * (2.0 * n + 1.0) / 24.0 - tie_term(mag) / 48.0;
  if (var > 0) {
    const double z = std::max(0.0, std::abs(t.statistic - mean) - 0.5) / std::sqrt(var);
    t.p_normal = std::min(1.0, std::erfc(z / std::sqrt(2.0)));
  } else {
    t.p_normal = 1.0;
  }
  if (static_cast<int>(diff.size()) <= exact_max_n) t.p_exact = wilcoxon_exact_p(ranks, t.statistic);
  t.p = std::isnan(t.p_exact) ? t.p_normal : t.p_exact;
  t.note = w_plus > w_minus ? "a > b" : (w_plus < w_minus ? "a < b" : "a = b");
  return t;
}

std::vector<double> holm_bonferroni(std::span<const double> p) {
  std::vector<std::size_t> idx;
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (std::isnan(p[i])) continue;
    if (p[i] < 0 || p[i] > 1) throw std::invalid_argument("holm_bonferroni: p-values must lie in [0, 1]");
    idx.push_back(i);
  }
  std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return p[a] < p[b]; });
  std::vector<double> out(p.begin(), p.end());
  const double m = static_cast<double>(idx.size());
  double running = 0.0;
  for (std::size_t j = 0; j < idx.size(); ++j) {
    running = std::max(running, std::min(1.0, (m - static_cast<double>(j)) * p[idx[j]]));
    out[idx[j]] = running;
  }
  return out;
}

TestResult paired_t_test(std::span<const double> a, std::span<const double> b) {
  check_pairs(a, b, "paired_t");
  if (a.size() < 2) throw std::invalid_argument("paired_t: need at least 2 pairs");
  const double n = static_cast<double>(a.size());
  double mean = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) mean += a[i] - b[i];
  mean /= n;
  double ss = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) ss += std::pow(a[i] - b[i] - mean, 2);
  const double sd = std::sqrt(ss / (n - 1.0));
  TestResult t;
  t.name = "paired_t";
  t.statistic_name = "t";
  t.dof1 = n - 1.0;
  t.n = a.size();
  if (sd == 0.0) {
    t.degenerate = true;
    if (mean == 0.0) {
      t.statistic = 0.0;
      t.p = 1.0;
      t.note = "all differences are zero";
    } else {
      t.statistic = std::copysign(std::numeric_limits<double>::infinity(), mean);
      t.p = 0.0;
      t.note = "constant non-zero difference";
    }
    return t;
  }
  t.statistic = mean / (sd / std::sqrt(n));
  t.p = special::t_two_sided(t.statistic, t.dof1);
  t.note = mean > 0 ? "a > b" : "a < b";
  return t;
}

TestResult rm_anova(const Matrix& data) {
  check_matrix(data, "rm_anova");
  const std::size_t nn = data.size(), kk = data.front().size();
  const double n = static_cast<double>(nn), k = static_cast<double>(kk);
  double grand = 0.0;
  std::vector<double> col(kk, 0.0), row(nn, 0.0);
  for (std::size_t i = 0; i < nn; ++i)
    for (std::size_t j = 0; j < kk; ++j) {
      grand += data[i][j];
      col[j] += data[i][j];
      row[i] += data[i][j];
    }
  grand /= n * k;
  double ss_total = 0.0, ss_cond = 0.0, ss_subj = 0.0;
  for (std::size_t i = 0; i < nn; ++i)
    for (std::size_t j = 0; j < kk; ++j) ss_total += std::pow(data[i][j] - grand, 2);
  for (double c : col) ss_cond += n * std::pow(c / n - grand, 2);
  for (double r : row) ss_subj += k * std::pow(r / k - grand, 2);
  const double ss_err = std::max(0.0, ss_total - ss_cond - ss_subj);

  TestResult t;
  t.name = "rm_anova";
  t.statistic_name = "F";
  t.dof1 = k - 1.0;
  t.dof2 = (k - 1.0) * (n - 1.0);
  t.n = nn;
  const double scale = std::max(1.0, ss_total);
  if (ss_err <= 1e-12 * scale) {
    t.degenerate = true;
    if (ss_cond <= 1e-12 * scale) {
      t.statistic = 0.0;
      t.p = 1.0;
      t.effect = 0.0;
      t.note = "no variation between conditions";
    } else {
      t.statistic = std::numeric_limits<double>::infinity();
      t.p = 0.0;
      t.effect = 1.0;
      t.note = "zero residual variance";
    }
    return t;
  }
  t.statistic = (ss_cond / t.dof1) / (ss_err / t.dof2);
  t.p = special::f_sf(t.statistic, t.dof1, t.dof2);
  t.effect = ss_cond / (ss_cond + ss_err);
  return t;
}

}  // namespace vstbench::study
