#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "splitguard/manifest.hpp"
#include "splitguard/splitter.hpp"

namespace splitguard {

enum class FindingKind { subject_overlap, lineage_overlap, cross_manifest_subject, mixed_label_subject };

std::string_view finding_kind_name(FindingKind kind);

/// subject_overlap, cross_manifest_subject and mixed_label_subject carry a
/// subject_id; lineage_overlap carries the source record_id. fold is -1 for
/// findings that are not tied to a fold.
struct LeakFinding {
  FindingKind kind = FindingKind::subject_overlap;
  int fold = -1;
  std::optional<std::string> subject_id;
  std::optional<std::string> record_id;
  std::string detail;

  bool operator==(const LeakFinding&) const = default;
};

/// Per fold x class counts of the scheme's units (subjects, lineage groups or
/// records) and of the test records they hold, both keyed by the unit's class.
/// A class is flagged when its unit counts differ by more than one across
/// folds, or its record counts spread wider than `threshold`: the widest
/// spread any unit-balanced plan could produce from these unit sizes.
struct BalanceTable {
  SplitScheme scheme = SplitScheme::subject_wise;
  std::vector<std::string> classes;
  std::vector<std::vector<std::size_t>> records;  // [fold][class]
  std::vector<std::vector<std::size_t>> units;    // [fold][class]
  std::vector<std::size_t> threshold;             // per class, in records
  std::vector<std::string> flagged;

  bool operator==(const BalanceTable&) const = default;
};

enum class Verdict { clean, leaky };

struct AuditReport {
  std::vector<LeakFinding> findings;
  BalanceTable balance;
  Verdict verdict = Verdict::clean;
  std::size_t n_subject_overlap = 0;
  std::size_t n_lineage_overlap = 0;
};

/// Throws Error(plan_manifest_mismatch) unless the plan assigns exactly the
/// manifest's records and every fold's roles partition them with test equal to
/// the fold's assigned records.
void check_plan_covers(const DatasetManifest& m, const FoldPlan& plan);

/// Single-fold checks. Leakage is measured across the test boundary: test
/// against train plus val.
std::vector<LeakFinding> audit_fold_subject_overlap(const DatasetManifest& m, int fold, const FoldRoles& roles);
std::vector<LeakFinding> audit_fold_lineage_overlap(const DatasetManifest& m, int fold, const FoldRoles& roles);

std::vector<LeakFinding> audit_subject_overlap(const DatasetManifest& m, const FoldPlan& plan);
std::vector<LeakFinding> audit_lineage_overlap(const DatasetManifest& m, const FoldPlan& plan);
BalanceTable audit_balance(const DatasetManifest& m, const FoldPlan& plan);
std::vector<LeakFinding> audit_cross_manifest(const DatasetManifest& train_m, const DatasetManifest& holdout_m);
/// Warnings for subjects whose records carry more than one label.
std::vector<LeakFinding> audit_mixed_labels(const DatasetManifest& m);

/// Runs every audit. Cross-manifest findings are added when `holdout` is given;
/// they and mixed-label warnings do not affect the verdict.
AuditReport audit_plan(const DatasetManifest& m, const FoldPlan& plan, const DatasetManifest* holdout = nullptr);

std::string audit_to_json(const AuditReport& report);
std::string audit_to_text(const AuditReport& report, bool color);

}  // namespace splitguard
