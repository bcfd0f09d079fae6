#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "splitguard/manifest.hpp"
#include "splitguard/splitter.hpp"
#include "splitguard/synth.hpp"

namespace splitguard {

// ---------------------------------------------------------------------------
// Metrics

/// Accuracy plus macro-averaged precision, recall and F1.
struct MetricSet {
  double accuracy = 0.0;
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  std::size_t n_eval = 0;

  bool operator==(const MetricSet&) const = default;
};

struct MetricSummary {
  double accuracy = 0.0;
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;

  bool operator==(const MetricSummary&) const = default;
};

inline constexpr std::string_view kAveraging = "macro";
inline constexpr std::string_view kSdKind = "population";

/// Per-class precision/recall come from the confusion matrix over `classes`;
/// a class with no predicted (or no true) instances scores 0 for that ratio,
/// and F1 is 0 when precision + recall is 0. Throws LengthMismatch, EmptyInput,
/// or ClassMismatch for labels outside `classes`.
MetricSet compute_metrics(std::span<const std::string> predictions, std::span<const std::string> truths,
                          std::span<const std::string> classes);

MetricSummary mean_of(std::span<const MetricSet> sets);
/// Population standard deviation.
MetricSummary sd_of(std::span<const MetricSet> sets);

// ---------------------------------------------------------------------------
// Oracle classifiers

enum class OracleKind { knn1, class_centroid };

std::string_view oracle_name(OracleKind kind);
/// Accepts "knn1" and "centroid"/"class_centroid".
std::optional<OracleKind> parse_oracle(std::string_view name);

/// knn1 stores every training record; class_centroid stores one mean per class.
class OracleModel {
 public:
  OracleKind kind() const noexcept { return kind_; }
  std::size_t dim() const noexcept { return dim_; }
  std::size_t size() const noexcept { return labels_.size(); }
  /// Stored labels: training labels (knn1, ordered by record id) or class labels.
  const std::vector<std::string>& labels() const noexcept { return labels_; }
  /// Stored ids: training record ids (knn1) or class labels (centroid).
  const std::vector<std::string>& ids() const noexcept { return ids_; }
  std::span<const double> point(std::size_t i) const { return {data_.data() + i * dim_, dim_}; }

  std::string predict(std::span<const double> x) const;

  friend OracleModel fit(OracleKind kind, std::span<const RecordEntry* const> train,
                         std::span<const std::string> classes);

 private:
  OracleKind kind_ = OracleKind::knn1;
  std::size_t dim_ = 0;
  std::vector<std::string> ids_;
  std::vector<std::string> labels_;
  std::vector<double> data_;
};

/// knn1 needs at least one record; class_centroid needs one per entry of
/// `classes`. Throws EmptyTrainingSet, MissingClass or DimensionMismatch
/// (records without features or of differing dimension).
OracleModel fit(OracleKind kind, std::span<const RecordEntry* const> train, std::span<const std::string> classes);

/// knn1: label of the Euclidean-nearest stored record, ties to the smaller
/// record_id. centroid: label of the nearest class mean, ties to class order.
std::string predict(const OracleModel& model, std::span<const double> features);

// ---------------------------------------------------------------------------
// Cross-validation protocol

struct CvResult {
  SplitScheme scheme = SplitScheme::subject_wise;
  std::vector<std::string> classes;
  std::vector<MetricSet> per_fold;
  MetricSummary mean;
  MetricSummary sd;
  std::vector<OracleModel> models;
};

struct HoldoutResult {
  std::vector<MetricSet> per_model;
  MetricSummary mean;
  MetricSummary sd;
};

/// Per fold: fit on train (validation records are excluded from fitting and
/// from evaluation), evaluate on test.
CvResult run_cv(const DatasetManifest& m, const SplitConfig& cfg, OracleKind kind);

/// Evaluates every retained fold model on the full hold-out manifest.
/// Throws DimensionMismatch or ClassMismatch.
HoldoutResult run_holdout(const CvResult& cv, const DatasetManifest& holdout);

struct SchemeComparison {
  std::string test_name = "oneway_anova";
  double statistic = 0.0;
  double p_value = 1.0;
  int df_between = 0;
  int df_within = 0;
};

/// One-way ANOVA F-test. Identical group means give F = 0, p = 1; zero
/// within-group variance with distinct means gives F = inf, p = 0.
/// Throws InsufficientGroups unless there are >= 2 groups of >= 2 values.
SchemeComparison oneway_anova(const std::vector<std::vector<double>>& groups);

/// ANOVA over per-fold CV accuracies grouped by scheme.
SchemeComparison compare_schemes(std::span<const CvResult> results);

struct SchemeOutcome {
  CvResult cv;
  HoldoutResult holdout;
  /// cv.mean.accuracy - holdout.mean.accuracy
  double leakage_gap = 0.0;
};

struct ExperimentReport {
  OracleKind oracle = OracleKind::knn1;
  int k = 5;
  std::uint64_t seed = 0;
  double val_fraction_of_total = 0.1;
  std::vector<SchemeOutcome> schemes;
  /// Present when at least two schemes were run.
  std::optional<SchemeComparison> comparison;
  /// Same test over the per-model hold-out accuracies.
  std::optional<SchemeComparison> holdout_comparison;
};

inline constexpr SplitScheme kAllSchemes[] = {SplitScheme::subject_wise, SplitScheme::record_wise,
                                              SplitScheme::late_wise};

/// Runs CV and hold-out evaluation for each scheme. `base.scheme` is ignored.
ExperimentReport run_experiment(const DatasetManifest& train, const DatasetManifest& holdout, const SplitConfig& base,
                                OracleKind kind, std::span<const SplitScheme> schemes = kAllSchemes);

struct SimulationRun {
  std::uint64_t seed = 0;
  ExperimentReport report;
};

struct Simulation {
  SynthConfig synth;
  OracleKind oracle = OracleKind::knn1;
  int k = 5;
  double val_fraction_of_total = 0.1;
  std::vector<SimulationRun> runs;
};

/// For each seed: synthesize and augment the cohort plus a hold-out cohort
/// with that seed, then run_experiment with the same seed for splitting.
ExperimentReport simulate_seed(const SynthConfig& synth, std::uint64_t seed, OracleKind kind, int k,
                               double val_fraction);
Simulation simulate(const SynthConfig& synth, std::span<const std::uint64_t> seeds, OracleKind kind, int k,
                    double val_fraction);

}  // namespace splitguard
