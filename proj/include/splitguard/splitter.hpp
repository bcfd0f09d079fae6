#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "splitguard/manifest.hpp"

namespace splitguard {

enum class SplitScheme { subject_wise, record_wise, late_wise };

std::string_view scheme_name(SplitScheme s);
/// Accepts "subject_wise"/"subject", "record_wise"/"record", "late_wise"/"late".
std::optional<SplitScheme> parse_scheme(std::string_view name);

struct SplitConfig {
  int k = 5;
  std::uint64_t seed = 0;
  double val_fraction_of_total = 0.10;
  SplitScheme scheme = SplitScheme::subject_wise;
  /// Permit a late-wise split of a manifest that has no augmentation lineage.
  bool allow_degenerate_late = false;
};

/// Throws Error(invalid_config) when k < 2 or the validation fraction is
/// outside [0, (k-1)/k).
void validate_config(const SplitConfig& cfg);

struct FoldRoles {
  std::vector<std::string> train;
  std::vector<std::string> val;
  std::vector<std::string> test;

  bool operator==(const FoldRoles&) const = default;
};

/// Assignment of every record to one of k test folds plus the per-fold
/// train/val/test roles. All id lists are kept sorted.
struct FoldPlan {
  int k = 0;
  SplitScheme scheme = SplitScheme::subject_wise;
  std::uint64_t seed = 0;
  double val_fraction_of_total = 0.0;
  std::map<std::string, int> assignment;
  std::vector<FoldRoles> roles;

  bool operator==(const FoldPlan&) const = default;
};

/// Subjects stratified by majority label, seeded-shuffled per class and dealt
/// round-robin. Validation subjects are drawn whole from the non-test folds.
FoldPlan split_subject_wise(const DatasetManifest& m, const SplitConfig& cfg);

/// Source records (with their augmented variants) stratified by label,
/// seeded-shuffled per class and dealt round-robin.
FoldPlan split_record_wise(const DatasetManifest& m, const SplitConfig& cfg);

/// Every post-augmentation record is its own unit. Units are dealt round-robin
/// in sequential order (source id, then original before variants by tag)
/// without shuffling, so siblings fall in consecutive folds.
FoldPlan split_late_wise(const DatasetManifest& m, const SplitConfig& cfg);

/// Dispatches on cfg.scheme.
FoldPlan make_plan(const DatasetManifest& m, const SplitConfig& cfg);

/// Roles of one fold; throws Error(fold_out_of_range).
const FoldRoles& derive_train_val_test(const FoldPlan& plan, int fold);

/// Key of the per-class shuffle stream: seed XOR hash(label).
std::uint64_t class_stream_key(std::uint64_t seed, std::string_view class_label);

}  // namespace splitguard
