#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace vstbench::stats {

struct ErrorStats {
  double mean = 0.0;
  double stddev = 0.0;  // sample (n - 1) standard deviation; 0 when count == 1
  double median = 0.0;
  double p90 = 0.0;
  std::size_t count = 0;
};

double mean(std::span<const double> v);
double sample_sd(std::span<const double> v);

// Linear interpolation between order statistics (h = (n - 1) q). The median
// of an even-sized sample is the mean of the two middle values.
double quantile(std::span<const double> v, double q);
double median(std::span<const double> v);
double iqr(std::span<const double> v);

// Throws std::invalid_argument on an empty sample.
ErrorStats summarize(std::span<const double> v);

}  // namespace vstbench::stats
