#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "vstbench/hypothesis.hpp"
#include "vstbench/ssq.hpp"

namespace vstbench::study {

enum class Condition { NV, DP, GAP };
inline constexpr std::array<Condition, 3> kConditions = {Condition::NV, Condition::DP, Condition::GAP};

std::string to_string(Condition c);
Condition parse_condition(const std::string& s);

inline constexpr std::array<const char*, 3> kTasks = {"typing", "navigation", "interaction"};
inline constexpr std::array<const char*, 5> kPerformanceFields = {"cpm", "typing_er", "navigation_time_s",
                                                                  "navigation_er", "ppm"};

struct ConditionRecord {
  std::string participant;
  Condition condition = Condition::NV;
  SSQResponse pre{};
  SSQResponse post{};
  std::array<int, 3> discomfort{};     // typing, navigation, interaction; 0..10
  std::array<double, 5> performance{};  // kPerformanceFields order; all >= 0

  void validate() const;
};

// Header: participant, condition, pre_1..pre_16, post_1..post_16,
// discomfort_typing, discomfort_navigation, discomfort_interaction, cpm,
// typing_er, navigation_time_s, navigation_er, ppm.
std::vector<std::string> csv_columns();

// Every schema violation is collected, then reported in one ConfigError
// with line and column context.
std::vector<ConditionRecord> parse_study_csv(const std::string& text, const std::string& source = "<csv>");
std::string write_study_csv(const std::vector<ConditionRecord>& records);

enum class Branch { Nonparametric, Parametric };

struct StudyConfig {
  TotalRule total_rule = TotalRule::RawSum;
  double alpha = 0.05;
  int exact_max_n = 25;
  bool friedman_exact = true;
  // Dependent variables analysed with RM-ANOVA and paired t-tests; the rest
  // use Friedman and Wilcoxon.
  std::vector<std::string> parametric = {"navigation_time_s", "ppm"};

  Branch branch_for(const std::string& variable) const;
};

struct Summary {
  double mean = 0.0, sd = 0.0, median = 0.0, iqr = 0.0;
  std::size_t n = 0;
};

struct VariableSummary {
  std::string variable;
  std::array<Summary, 3> by_condition;  // NV, DP, GAP
};

struct SymptomCell {
  double mean = 0.0, sd = 0.0, percent = 0.0;
};

struct SymptomRow {
  std::string symptom;
  std::array<SymptomCell, 3> by_condition;
  // Two readings of a combined DP/GAP column: participants with a positive
  // delta under both conditions (mean and SD over each participant's
  // average DP/GAP delta), and the plain average of the DP and GAP cells.
  SymptomCell intersection;
  SymptomCell mean_of_means;
  std::array<bool, 3> groups{};
};

struct PairwiseTest {
  Condition a = Condition::DP;
  Condition b = Condition::NV;
  TestResult result;
  std::string direction;  // e.g. "DP > NV"
};

struct VariableTests {
  std::string family;  // ssq, discomfort, performance, symptom
  std::string variable;
  Branch branch = Branch::Nonparametric;
  TestResult omnibus;
  std::vector<PairwiseTest> pairwise;  // one Holm family
};

struct StudyReport {
  std::size_t participants = 0;
  std::vector<std::string> excluded;
  std::vector<std::string> warnings;
  std::vector<VariableSummary> ssq;          // deltas of N, O, D, TS
  std::vector<SymptomRow> symptoms;          // item deltas
  std::vector<VariableSummary> discomfort;   // typing, navigation, interaction, average
  std::vector<VariableSummary> performance;  // kPerformanceFields
  std::vector<VariableTests> tests;
};

// Participants lacking any condition are excluded with a warning. Throws
// ConfigError on duplicate rows or when no complete participant remains.
StudyReport score_study(const std::vector<ConditionRecord>& records, const StudyConfig& config = {});

Summary summarize(const std::vector<double>& v);

struct CohortSpec {
  int participants = 25;
  // The last participant misses the GAP session.
  bool include_incomplete = true;
  std::uint64_t seed = 2024;
};

// Synthetic cohort with known ordering of effects: deltas under GAP exceed
// NV and deltas under DP exceed GAP, on sickness and discomfort.
std::vector<ConditionRecord> synth_cohort(const CohortSpec& spec = {});

}  // namespace vstbench::study
