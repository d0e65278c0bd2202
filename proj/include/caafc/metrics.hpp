#pragma once

#include <array>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "caafc/schemas.hpp"

namespace caafc {

struct ClassStats {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  int support = 0;
  bool zero_division = false;  // some denominator was empty
};

struct ClassificationReport {
  std::vector<std::string> classes;  // caller-given order
  std::map<std::string, ClassStats> per_class;
  double accuracy = 0.0;
  double macro_precision = 0.0, macro_recall = 0.0, macro_f1 = 0.0;
  double weighted_precision = 0.0, weighted_recall = 0.0, weighted_f1 = 0.0;
  int total = 0;
  bool zero_division_warning = false;
};

// One-vs-rest precision/recall/F1 per class; zero divisions score 0 and set
// the warning flag. Throws LengthMismatch on unequal lists, EmptyInput on
// empty ones, InvariantViolation on a label outside `classes`.
ClassificationReport classification_report(
    const std::vector<std::string>& gold,
    const std::vector<std::string>& predicted,
    const std::vector<std::string>& classes);

Json report_to_json(const ClassificationReport& report);

// Aligned plain-text table: one row per class plus accuracy / macro avg /
// weighted avg, three decimals.
std::string format_report(const ClassificationReport& report);

// Cohen's κ between two equal-length label lists. The all-agreeing
// single-class case returns 1.0 by convention.
double cohens_kappa(const std::vector<std::string>& a,
                    const std::vector<std::string>& b);

// Krippendorff's α, nominal metric, over a raters×items table with missing
// ratings allowed (nullopt). Throws InsufficientData when fewer than two
// raters are given or no item carries two ratings.
double krippendorff_alpha(
    const std::vector<std::vector<std::optional<std::string>>>& ratings);

// Product-moment correlation. Throws LengthMismatch, InsufficientData
// (fewer than two points) or DegenerateVariance (a constant input).
double pearson(const std::vector<double>& x, const std::vector<double>& y);

// Density histogram over rubric totals 0..7.
struct ScoreHistogram {
  std::array<int, 8> counts{};
  std::array<double, 8> density{};
  int total = 0;
};

// Throws InsufficientData on an empty list, InvariantViolation on a total
// outside 0..7.
ScoreHistogram score_histogram(const std::vector<int>& totals);

// "bin,density" CSV, one row per bin, densities with six decimals.
std::string histogram_csv(const ScoreHistogram& histogram);

}  // namespace caafc
