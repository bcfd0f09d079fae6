#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace splitguard {

/// One scan row of a longitudinal dataset.
struct RecordEntry {
  std::string record_id;
  std::string subject_id;
  std::uint32_t visit_index = 0;
  std::string class_label;
  /// Set iff this record is an augmented variant of another record.
  std::optional<std::string> source_record_id;
  std::optional<std::string> transform_tag;
  std::optional<std::vector<double>> features;

  bool is_augmented() const noexcept { return source_record_id.has_value(); }

  /// The pre-augmentation record this one descends from (itself for originals).
  const std::string& lineage_root() const noexcept {
    return source_record_id ? *source_record_id : record_id;
  }

  bool operator==(const RecordEntry&) const = default;
};

/// Validated, immutable collection of records with subject and class indexes.
///
/// Construction checks every record invariant: unique ids, lineage depth of at
/// most one, augmented records agreeing with their source on subject, visit and
/// label, and a single feature dimension. Violations throw splitguard::Error
/// with a validation code.
class DatasetManifest {
 public:
  DatasetManifest() = default;

  /// Validates and indexes `records`. `class_order`, when non-empty, must be a
  /// permutation of the labels present; otherwise classes sort lexicographically.
  static DatasetManifest build(std::vector<RecordEntry> records,
                               std::vector<std::string> class_order = {});

  const std::vector<RecordEntry>& records() const noexcept { return records_; }
  const std::vector<std::string>& classes() const noexcept { return classes_; }
  /// subject_id -> record ids in manifest order.
  const std::map<std::string, std::vector<std::string>>& subjects() const noexcept { return subjects_; }
  std::optional<std::size_t> feature_dim() const noexcept { return feature_dim_; }

  std::size_t size() const noexcept { return records_.size(); }
  bool empty() const noexcept { return records_.empty(); }

  const RecordEntry* find(std::string_view record_id) const;
  const RecordEntry& at(std::string_view record_id) const;
  bool contains(std::string_view record_id) const { return find(record_id) != nullptr; }

  /// Position of `label` in classes(); throws on unknown labels.
  std::size_t class_index(std::string_view label) const;

  /// True if any record carries a source_record_id.
  bool has_lineage() const noexcept;

  /// True if classes() is not simply the sorted label set.
  bool has_explicit_class_order() const noexcept;

  /// lineage root -> record ids (root first, then variants in manifest order).
  std::map<std::string, std::vector<std::string>> lineage_groups() const;

  bool operator==(const DatasetManifest& other) const {
    return records_ == other.records_ && classes_ == other.classes_;
  }

 private:
  std::vector<RecordEntry> records_;
  std::vector<std::string> classes_;
  std::map<std::string, std::vector<std::string>> subjects_;
  std::optional<std::size_t> feature_dim_;
  std::unordered_map<std::string, std::size_t> by_id_;
};

struct SubjectSummary {
  std::string subject_id;
  std::size_t n_records = 0;
  std::map<std::string, std::size_t> label_histogram;
  /// Most frequent label; ties go to the label earliest in manifest.classes().
  std::string majority_label;

  bool mixed_label() const noexcept { return label_histogram.size() > 1; }
};

/// One summary per subject, ordered by subject_id.
std::vector<SubjectSummary> summarize_subjects(const DatasetManifest& m);

}  // namespace splitguard
