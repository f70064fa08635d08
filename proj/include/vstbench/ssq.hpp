#pragma once

#include <array>
#include <string_view>

namespace vstbench::study {

inline constexpr int kSsqItems = 16;

// Canonical item order of the questionnaire.
inline constexpr std::array<std::string_view, kSsqItems> kSsqItemNames = {
    "General discomfort",      "Fatigue",          "Headache",          "Eyestrain",
    "Difficulty focusing",     "Increased salivation", "Sweating",      "Nausea",
    "Difficulty concentrating", "Fullness of the head", "Blurred vision", "Dizziness (eyes open)",
    "Dizziness (eyes closed)", "Vertigo",          "Stomach awareness", "Burping"};

enum class Subscale { Nausea, Oculomotor, Disorientation };

// Item membership per subscale (N, O, D); items may count toward several.
inline constexpr std::array<std::array<bool, 3>, kSsqItems> kSsqGroups = {{
    {true, true, false},   // General discomfort
    {false, true, false},  // Fatigue
    {false, true, false},  // Headache
    {false, true, false},  // Eyestrain
    {false, true, true},   // Difficulty focusing
    {true, false, false},  // Increased salivation
    {true, false, false},  // Sweating
    {true, false, true},   // Nausea
    {true, true, false},   // Difficulty concentrating
    {false, false, true},  // Fullness of the head
    {false, true, true},   // Blurred vision
    {false, false, true},  // Dizziness (eyes open)
    {false, false, true},  // Dizziness (eyes closed)
    {false, false, true},  // Vertigo
    {true, false, false},  // Stomach awareness
    {true, false, false},  // Burping
}};

inline constexpr double kNauseaWeight = 9.54;
inline constexpr double kOculomotorWeight = 7.58;
inline constexpr double kDisorientationWeight = 13.92;
inline constexpr double kTotalWeight = 3.74;

// RawSum: 3.74 x the sum of all 16 ratings. SubscaleSum: 3.74 x the sum of
// the three unweighted group sums, so shared items count more than once.
enum class TotalRule { RawSum, SubscaleSum };

using SSQResponse = std::array<int, kSsqItems>;

struct SSQScores {
  double nausea = 0.0;
  double oculomotor = 0.0;
  double disorientation = 0.0;
  double total = 0.0;

  bool operator==(const SSQScores&) const = default;
};

// Throws std::invalid_argument for a rating outside 0..3.
void validate_response(const SSQResponse& r);
SSQScores ssq_score(const SSQResponse& r, TotalRule rule = TotalRule::RawSum);
SSQScores ssq_delta(const SSQScores& pre, const SSQScores& post);

}  // namespace vstbench::study
