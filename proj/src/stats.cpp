#include "vstbench/stats.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace vstbench::stats {

double mean(std::span<const double> v) {
  if (v.empty()) throw std::invalid_argument("mean of empty sample");
  double s = 0.0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

double sample_sd(std::span<const double> v) {
  if (v.size() < 2) return 0.0;
  const double m = mean(v);
  double ss = 0.0;
  for (double x : v) ss += (x - m) * (x - m);
  return std::sqrt(ss / static_cast<double>(v.size() - 1));
}

namespace {

double sorted_quantile(const std::vector<double>& s, double q) {
  const double h = (static_cast<double>(s.size()) - 1.0) * q;
  const auto lo = static_cast<std::size_t>(std::floor(h));
  const auto hi = std::min(lo + 1, s.size() - 1);
  return s[lo] + (h - static_cast<double>(lo)) * (s[hi] - s[lo]);
}

}  // namespace

double quantile(std::span<const double> v, double q) {
  if (v.empty()) throw std::invalid_argument("quantile of empty sample");
  if (!(q >= 0.0 && q <= 1.0)) throw std::invalid_argument("quantile level outside [0, 1]");
  std::vector<double> s(v.begin(), v.end());
  std::sort(s.begin(), s.end());
  return sorted_quantile(s, q);
}

double median(std::span<const double> v) { return quantile(v, 0.5); }

double iqr(std::span<const double> v) { return quantile(v, 0.75) - quantile(v, 0.25); }

ErrorStats summarize(std::span<const double> v) {
  if (v.empty()) throw std::invalid_argument("statistics of empty sample");
  std::vector<double> s(v.begin(), v.end());
  std::sort(s.begin(), s.end());
  ErrorStats out;
  out.count = s.size();
  out.mean = mean(v);
  out.stddev = sample_sd(v);
  out.median = sorted_quantile(s, 0.5);
  out.p90 = sorted_quantile(s, 0.9);
  return out;
}

}  // namespace vstbench::stats
