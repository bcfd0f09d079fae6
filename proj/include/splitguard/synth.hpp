#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "splitguard/manifest.hpp"

namespace splitguard {

/// Generative model for a synthetic longitudinal cohort.
///
/// Each record is class_mean + fingerprint + visit_index * drift + noise. Every
/// scale is the expected Euclidean norm of its component: class means are
/// orthogonal axis vectors of length class_signal_scale, and the random
/// components draw each coordinate from N(0, (scale / sqrt(feature_dim))^2).
struct SynthConfig {
  int n_classes = 3;
  std::vector<std::string> class_labels = {"CN", "MCI", "AD"};
  std::vector<int> subjects_per_class = {30, 30, 30};
  int visits_min = 3;
  int visits_max = 5;
  int feature_dim = 16;
  double class_signal_scale = 1.25;
  double fingerprint_scale = 1.75;
  double visit_drift_scale = 0.2;
  double noise_scale = 0.85;
  /// Copies per source record, original included. Classes not listed use 2.
  std::map<std::string, int> augmentation_multiplicity;
  double augment_perturb_scale = 0.1;
  std::uint64_t seed = 0;

  /// Hold-out cohort: fresh subjects with the same class means. Empty means
  /// "same as subjects_per_class".
  std::vector<int> holdout_subjects_per_class;
  /// Hold-out subjects are observed at visits shifted by this many steps.
  int holdout_visit_offset = 20;

  int multiplicity_for(std::string_view label) const;
};

/// Throws Error(invalid_config) on any out-of-range field.
void validate_synth_config(const SynthConfig& cfg);

/// A generated record with its additive decomposition kept for inspection.
struct FeatureRecord {
  RecordEntry record;
  std::vector<double> class_mean;
  std::vector<double> fingerprint;
  std::vector<double> drift;
  std::vector<double> noise;
};

enum class CohortRole { training, holdout };

std::vector<FeatureRecord> generate_feature_records(const SynthConfig& cfg, CohortRole role = CohortRole::training);

/// Pre-augmentation cohort, one record per visit, transform_tag "orig".
DatasetManifest generate_cohort(const SynthConfig& cfg);

/// Disjoint-subject cohort (subject ids use an "h" prefix instead of "s").
DatasetManifest generate_holdout_cohort(const SynthConfig& cfg);

/// Appends multiplicity-1 variants after each source record. Variant j adds a
/// fixed offset of norm augment_perturb_scale shared by every record.
/// Throws Error(already_augmented) if `m` already has lineage.
DatasetManifest augment_records(const DatasetManifest& m, const SynthConfig& cfg);

/// Offset vector applied by augmentation transform `index` (1-based).
std::vector<double> augmentation_offset(const SynthConfig& cfg, int index);

/// `key = value` lines with `#` comments, quoted strings, [a, b] arrays and
/// an optional `[augmentation_multiplicity]` table (or dotted keys).
SynthConfig parse_synth_config(std::string_view text);
SynthConfig load_synth_config(const std::filesystem::path& path);
std::string synth_config_to_text(const SynthConfig& cfg);

}  // namespace splitguard
