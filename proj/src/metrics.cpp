#include "caafc/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <set>

#include "caafc/errors.hpp"

namespace caafc {

ClassificationReport classification_report(
    const std::vector<std::string>& gold,
    const std::vector<std::string>& predicted,
    const std::vector<std::string>& classes) {
  if (gold.size() != predicted.size())
    throw LengthMismatch("gold has " + std::to_string(gold.size()) +
                         " labels, predicted has " +
                         std::to_string(predicted.size()));
  if (gold.empty()) throw EmptyInput("classification_report on empty lists");

  std::set<std::string> known(classes.begin(), classes.end());
  for (const auto& label : gold)
    if (!known.count(label))
      throw InvariantViolation("gold label outside class list: '" + label +
                               "'");
  for (const auto& label : predicted)
    if (!known.count(label))
      throw InvariantViolation("predicted label outside class list: '" +
                               label + "'");

  ClassificationReport report;
  report.classes = classes;
  report.total = static_cast<int>(gold.size());

  int correct = 0;
  for (size_t i = 0; i < gold.size(); ++i)
    if (gold[i] == predicted[i]) ++correct;
  report.accuracy = static_cast<double>(correct) / report.total;

  for (const auto& cls : classes) {
    int tp = 0, fp = 0, fn = 0, support = 0;
    for (size_t i = 0; i < gold.size(); ++i) {
      bool is_gold = gold[i] == cls;
      bool is_pred = predicted[i] == cls;
      if (is_gold) ++support;
      if (is_gold && is_pred) ++tp;
      if (!is_gold && is_pred) ++fp;
      if (is_gold && !is_pred) ++fn;
    }
    ClassStats stats;
    stats.support = support;
    if (tp + fp > 0)
      stats.precision = static_cast<double>(tp) / (tp + fp);
    else
      stats.zero_division = true;
    if (tp + fn > 0)
      stats.recall = static_cast<double>(tp) / (tp + fn);
    else
      stats.zero_division = true;
    if (stats.precision + stats.recall > 0)
      stats.f1 = 2 * stats.precision * stats.recall /
                 (stats.precision + stats.recall);
    else
      stats.zero_division = true;
    report.zero_division_warning |= stats.zero_division;
    report.per_class[cls] = stats;
  }

  double weight_sum = 0;
  for (const auto& cls : classes) {
    const auto& stats = report.per_class[cls];
    report.macro_precision += stats.precision;
    report.macro_recall += stats.recall;
    report.macro_f1 += stats.f1;
    report.weighted_precision += stats.support * stats.precision;
    report.weighted_recall += stats.support * stats.recall;
    report.weighted_f1 += stats.support * stats.f1;
    weight_sum += stats.support;
  }
  const double k = static_cast<double>(classes.size());
  report.macro_precision /= k;
  report.macro_recall /= k;
  report.macro_f1 /= k;
  report.weighted_precision /= weight_sum;
  report.weighted_recall /= weight_sum;
  report.weighted_f1 /= weight_sum;
  return report;
}

Json report_to_json(const ClassificationReport& report) {
  Json per_class = Json::object();
  for (const auto& cls : report.classes) {
    const auto& stats = report.per_class.at(cls);
    per_class[cls] = Json{{"precision", stats.precision},
                          {"recall", stats.recall},
                          {"f1", stats.f1},
                          {"support", stats.support},
                          {"zero_division", stats.zero_division}};
  }
  return Json{
      {"classes", report.classes},
      {"per_class", std::move(per_class)},
      {"accuracy", report.accuracy},
      {"macro_avg", Json{{"precision", report.macro_precision},
                         {"recall", report.macro_recall},
                         {"f1", report.macro_f1}}},
      {"weighted_avg", Json{{"precision", report.weighted_precision},
                            {"recall", report.weighted_recall},
                            {"f1", report.weighted_f1}}},
      {"total", report.total},
      {"zero_division_warning", report.zero_division_warning}};
}

namespace {

std::string fixed3(double value) {
  char buffer[32];
  std::snprintf(buffer, sizeof(buffer), "%.3f", value);
  return buffer;
}

}  // namespace

std::string format_report(const ClassificationReport& report) {
  size_t name_width = std::string("weighted avg").size();
  for (const auto& cls : report.classes)
    name_width = std::max(name_width, cls.size());

  auto row = [&](const std::string& name, const std::string& p,
                 const std::string& r, const std::string& f1,
                 const std::string& support) {
    std::string out(name_width - name.size(), ' ');
    out += name;
    auto cell = [](const std::string& text, size_t width) {
      return std::string(width > text.size() ? width - text.size() : 0, ' ') +
             text;
    };
    out += cell(p, 11) + cell(r, 9) + cell(f1, 10) + cell(support, 10) + "\n";
    return out;
  };

  std::string out =
      row("", "precision", "recall", "f1-score", "support") + "\n";
  for (const auto& cls : report.classes) {
    const auto& stats = report.per_class.at(cls);
    out += row(cls, fixed3(stats.precision), fixed3(stats.recall),
               fixed3(stats.f1), std::to_string(stats.support));
  }
  out += "\n";
  out += row("accuracy", "", "", fixed3(report.accuracy),
             std::to_string(report.total));
  out += row("macro avg", fixed3(report.macro_precision),
             fixed3(report.macro_recall), fixed3(report.macro_f1),
             std::to_string(report.total));
  out += row("weighted avg", fixed3(report.weighted_precision),
             fixed3(report.weighted_recall), fixed3(report.weighted_f1),
             std::to_string(report.total));
  return out;
}

double cohens_kappa(const std::vector<std::string>& a,
                    const std::vector<std::string>& b) {
  if (a.size() != b.size())
    throw LengthMismatch("kappa lists differ: " + std::to_string(a.size()) +
                         " vs " + std::to_string(b.size()));
  if (a.empty()) throw EmptyInput("cohens_kappa on empty lists");

  const double n = static_cast<double>(a.size());
  std::map<std::string, int> count_a, count_b;
  int agree = 0;
  for (size_t i = 0; i < a.size(); ++i) {
    ++count_a[a[i]];
    ++count_b[b[i]];
    if (a[i] == b[i]) ++agree;
  }
  double p_o = agree / n;
  double p_e = 0;
  for (const auto& [label, ca] : count_a) {
    auto it = count_b.find(label);
    if (it != count_b.end()) p_e += (ca / n) * (it->second / n);
  }
  if (1.0 - p_e < 1e-12) return 1.0;  // both raters constant on one label
  return (p_o - p_e) / (1.0 - p_e);
}

double krippendorff_alpha(
    const std::vector<std::vector<std::optional<std::string>>>& ratings) {
  if (ratings.size() < 2)
    throw InsufficientData("krippendorff_alpha needs at least two raters");
  size_t items = 0;
  for (const auto& rater : ratings) items = std::max(items, rater.size());

  // Coincidence matrix over pairable values.
  std::map<std::string, std::map<std::string, double>> coincidence;
  std::map<std::string, double> marginal;
  double n = 0;
  bool any_pairable = false;
  for (size_t item = 0; item < items; ++item) {
    std::vector<std::string> values;
    for (const auto& rater : ratings)
      if (item < rater.size() && rater[item]) values.push_back(*rater[item]);
    if (values.size() < 2) continue;  // unpairable item carries no information
    any_pairable = true;
    const double m = static_cast<double>(values.size());
    for (size_t i = 0; i < values.size(); ++i)
      for (size_t j = 0; j < values.size(); ++j) {
        if (i == j) continue;
        coincidence[values[i]][values[j]] += 1.0 / (m - 1);
      }
  }
  if (!any_pairable)
    throw InsufficientData("no item carries two or more ratings");
  for (const auto& [value, row] : coincidence)
    for (const auto& [other, weight] : row) {
      marginal[value] += weight;
      (void)other;
    }
  for (const auto& [value, weight] : marginal) {
    n += weight;
    (void)value;
  }

  double observed_disagreement = 0;  // Σ off-diagonal coincidences
  for (const auto& [value, row] : coincidence)
    for (const auto& [other, weight] : row)
      if (value != other) observed_disagreement += weight;
  double expected_disagreement = 0;  // Σ_{c≠k} n_c n_k / (n−1)
  for (const auto& [c, nc] : marginal)
    for (const auto& [k, nk] : marginal)
      if (c != k) expected_disagreement += nc * nk;
  expected_disagreement /= (n - 1.0);

  if (observed_disagreement == 0) return 1.0;  // includes single-category data
  if (expected_disagreement <= 0)
    throw InsufficientData("degenerate category distribution");
  return 1.0 - observed_disagreement / expected_disagreement;
}

double pearson(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size())
    throw LengthMismatch("pearson lists differ: " + std::to_string(x.size()) +
                         " vs " + std::to_string(y.size()));
  if (x.size() < 2) throw InsufficientData("pearson needs at least two points");
  const double n = static_cast<double>(x.size());
  double mean_x = 0, mean_y = 0;
  for (size_t i = 0; i < x.size(); ++i) {
    mean_x += x[i];
    mean_y += y[i];
  }
  mean_x /= n;
  mean_y /= n;
  double sxx = 0, syy = 0, sxy = 0;
  for (size_t i = 0; i < x.size(); ++i) {
    const double dx = x[i] - mean_x;
    const double dy = y[i] - mean_y;
    sxx += dx * dx;
    syy += dy * dy;
    sxy += dx * dy;
  }
  if (sxx == 0 || syy == 0)
    throw DegenerateVariance("pearson input has zero variance");
  return sxy / std::sqrt(sxx * syy);
}

ScoreHistogram score_histogram(const std::vector<int>& totals) {
  if (totals.empty())
    throw InsufficientData("score_histogram on an empty list");
  ScoreHistogram histogram;
  for (int total : totals) {
    if (total < 0 || total > 7)
      throw InvariantViolation("rubric total out of range: " +
                               std::to_string(total));
    ++histogram.counts[total];
  }
  histogram.total = static_cast<int>(totals.size());
  for (size_t bin = 0; bin < histogram.counts.size(); ++bin)
    histogram.density[bin] =
        static_cast<double>(histogram.counts[bin]) / histogram.total;
  return histogram;
}

std::string histogram_csv(const ScoreHistogram& histogram) {
  std::string out = "bin,density\n";
  for (size_t bin = 0; bin < histogram.density.size(); ++bin) {
    char buffer[48];
    std::snprintf(buffer, sizeof(buffer), "%zu,%.6f\n", bin,
                  histogram.density[bin]);
    out += buffer;
  }
  return out;
}

}  // namespace caafc
