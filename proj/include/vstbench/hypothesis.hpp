#pragma once

#include <cstdint>
#include <limits>
#include <span>
#include <string>
#include <vector>

namespace vstbench::study {

inline constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

struct TestResult {
  std::string name;
  std::string statistic_name;  // "chi2", "W", "t" or "F"
  double statistic = kNaN;
  double dof1 = kNaN;
  double dof2 = kNaN;
  double p = kNaN;
  double p_adjusted = kNaN;  // set when the test belongs to a family
  double p_exact = kNaN;     // Wilcoxon and Friedman, when computed
  double p_normal = kNaN;    // Wilcoxon normal approximation
  double effect = kNaN;      // partial eta squared for ANOVA
  std::size_t n = 0;         // participants, or non-zero pairs for Wilcoxon
  bool degenerate = false;
  bool significant = false;
  std::string note;
};

// Rows are participants, columns are conditions.
using Matrix = std::vector<std::vector<double>>;

// Mean ranks within a sample; ties share their average rank.
std::vector<double> rank_average(std::span<const double> v);

// Chi-square statistic with tie correction; p from the chi-square
// distribution with k - 1 degrees of freedom.
TestResult friedman_test(const Matrix& data);

// Exact permutation p-value of the Friedman statistic: each row's ranks are
// equally likely in every arrangement. Throws std::length_error when the
// state space exceeds `max_states`.
double friedman_exact_p(const Matrix& data, std::size_t max_states = 4'000'000);

// Zero differences are dropped; W = min(W+, W-). The exact p is the
// conditional distribution over sign flips given the observed ranks and is
// computed for up to `exact_max_n` non-zero pairs; the normal approximation
// uses tie and continuity corrections and is always reported. `p` is the
// exact value when available. Throws std::invalid_argument when every
// difference is zero ("degenerate pairing").
TestResult wilcoxon_signed_rank(std::span<const double> a, std::span<const double> b, int exact_max_n = 25);

// Two-sided exact p for the signed-rank statistic from doubled ranks
// (integers, so tied half-ranks are exact).
double wilcoxon_exact_p(std::span<const double> abs_ranks, double w);

// Holm step-down adjustment; NaN entries are left as NaN and excluded from
// the family size.
std::vector<double> holm_bonferroni(std::span<const double> p);

TestResult paired_t_test(std::span<const double> a, std::span<const double> b);

// One-way repeated-measures ANOVA.
TestResult rm_anova(const Matrix& data);

}  // namespace vstbench::study
