#pragma once

#include <string>
#include <vector>

#include "vstbench/bench.hpp"
#include "vstbench/io.hpp"
#include "vstbench/study.hpp"

namespace vstbench::report {

using io::Json;

Json error_stats_json(const stats::ErrorStats& s);
Json warping_json(const metrics::WarpingReport& r, bool with_frames);

Json benchmark_json(const bench::BenchmarkConfig& config, const bench::BenchmarkResult& result);
// Rows are modes; mean and the three spread levels for each metric column.
std::string table1_csv(const bench::BenchmarkResult& result);
std::string table1_text(const bench::BenchmarkResult& result);
// Per mode and eye: bin edges, center, MAE and count.
std::string by_range_csv(const bench::BenchmarkResult& result);
std::string frames_csv(const bench::BenchmarkResult& result);
std::string table2_csv(const bench::BenchmarkResult& result);
std::string table2_text(const bench::BenchmarkResult& result);

Json study_json(const study::StudyReport& r, const study::StudyConfig& config);
std::string ssq_csv(const study::StudyReport& r);
std::string symptoms_csv(const study::StudyReport& r);
std::string discomfort_csv(const study::StudyReport& r);
std::string performance_csv(const study::StudyReport& r);
std::string tests_csv(const study::StudyReport& r);
std::string tests_text(const study::StudyReport& r);

struct DiffOptions {
  double abs_tol = 1e-9;
  double rel_tol = 1e-9;
};

// Structural and numeric differences between two JSON documents, one line
// per difference with its JSON pointer.
std::vector<std::string> diff(const Json& expected, const Json& actual, const DiffOptions& opts = {});

}  // namespace vstbench::report
