#include <algorithm>
#include <cmath>

#include "splitguard/errors.hpp"
#include "splitguard/evalsim.hpp"

namespace splitguard {

namespace {

std::size_t label_index(std::span<const std::string> classes, const std::string& label) {
  auto it = std::find(classes.begin(), classes.end(), label);
  if (it == classes.end()) throw Error(Errc::class_mismatch, "label '" + label + "' is not one of the classes");
  return static_cast<std::size_t>(it - classes.begin());
}

}  // namespace

MetricSet compute_metrics(std::span<const std::string> predictions, std::span<const std::string> truths,
                          std::span<const std::string> classes) {
  if (predictions.size() != truths.size()) {
    throw Error(Errc::length_mismatch, "predictions and truths differ in length");
  }
  if (truths.empty()) throw Error(Errc::empty_input, "no predictions to score");
  if (classes.empty()) throw Error(Errc::empty_input, "no classes to score against");

  const std::size_t n = classes.size();
  // confusion[t * n + p]
  std::vector<std::size_t> confusion(n * n, 0);
  for (std::size_t i = 0; i < truths.size(); ++i) {
    ++confusion[label_index(classes, truths[i]) * n + label_index(classes, predictions[i])];
  }

  std::size_t correct = 0;
  double sum_p = 0.0, sum_r = 0.0, sum_f = 0.0;
  for (std::size_t c = 0; c < n; ++c) {
    std::size_t tp = confusion[c * n + c];
    std::size_t predicted = 0, actual = 0;
    for (std::size_t o = 0; o < n; ++o) {
      predicted += confusion[o * n + c];
      actual += confusion[c * n + o];
    }
    correct += tp;
    double p = predicted ? static_cast<double>(tp) / static_cast<double>(predicted) : 0.0;
    double r = actual ? static_cast<double>(tp) / static_cast<double>(actual) : 0.0;
    sum_p += p;
    sum_r += r;
    sum_f += (p + r) > 0.0 ? 2.0 * p * r / (p + r) : 0.0;
  }

  MetricSet m;
  m.n_eval = truths.size();
  m.accuracy = static_cast<double>(correct) / static_cast<double>(truths.size());
  m.precision = sum_p / static_cast<double>(n);
  m.recall = sum_r / static_cast<double>(n);
  m.f1 = sum_f / static_cast<double>(n);
  return m;
}

MetricSummary mean_of(std::span<const MetricSet> sets) {
  MetricSummary s;
  if (sets.empty()) return s;
  for (const auto& m : sets) {
    s.accuracy += m.accuracy;
    s.precision += m.precision;
    s.recall += m.recall;
    s.f1 += m.f1;
  }
  const auto n = static_cast<double>(sets.size());
  s.accuracy /= n;
  s.precision /= n;
  s.recall /= n;
  s.f1 /= n;
  return s;
}

MetricSummary sd_of(std::span<const MetricSet> sets) {
  MetricSummary s;
  if (sets.empty()) return s;
  const auto mu = mean_of(sets);
  for (const auto& m : sets) {
    s.accuracy += (m.accuracy - mu.accuracy) * (m.accuracy - mu.accuracy);
    s.precision += (m.precision - mu.precision) * (m.precision - mu.precision);
    s.recall += (m.recall - mu.recall) * (m.recall - mu.recall);
    s.f1 += (m.f1 - mu.f1) * (m.f1 - mu.f1);
  }
  const auto n = static_cast<double>(sets.size());
  s.accuracy = std::sqrt(s.accuracy / n);
  s.precision = std::sqrt(s.precision / n);
  s.recall = std::sqrt(s.recall / n);
  s.f1 = std::sqrt(s.f1 / n);
  return s;
}

}  // namespace splitguard
