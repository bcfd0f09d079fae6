#pragma once

#include <cstdint>
#include <filesystem>
#include <random>
#include <set>
#include <string>
#include <tuple>
#include <vector>

#include "splitguard/auditor.hpp"
#include "splitguard/manifest.hpp"
#include "splitguard/splitter.hpp"

namespace sgtest {

using splitguard::DatasetManifest;
using splitguard::FoldPlan;
using splitguard::RecordEntry;

RecordEntry rec(std::string id, std::string subject, std::uint32_t visit, std::string label);
RecordEntry variant(const RecordEntry& source, std::string tag);

/// 111-subject reference cohort: CN 41 subjects / 150
/// scans, MCI 45 / 150, AD 25 / 50, augmented x2, x2 and x6 to 300 per class.
DatasetManifest reference_sources();
DatasetManifest reference_cohort();

struct RandomManifestShape {
  int k = 2;
  int n_classes = 2;
  int min_subjects = 0;  // per class, added to k
  int max_subjects = 6;
  int max_visits = 4;
  int max_multiplicity = 4;
  double converter_rate = 0.1;
};

/// A manifest on which every scheme's preconditions hold for `shape.k`:
/// each class has at least k majority-label subjects. Some classes are
/// augmented, a few subjects change label across visits.
DatasetManifest random_manifest(std::mt19937_64& gen, const RandomManifestShape& shape);

/// Random fold assignment and random val carve-out; ignores every scheme rule.
FoldPlan random_plan(std::mt19937_64& gen, const DatasetManifest& m, int k);

/// (kind, fold, identifier) triples.
using FindingKey = std::tuple<std::string, int, std::string>;
std::set<FindingKey> finding_keys(const std::vector<splitguard::LeakFinding>& findings);

/// Exhaustive pairwise scan of every test record against every train/val
/// record of the same fold.
std::set<FindingKey> brute_force_leaks(const DatasetManifest& m, const FoldPlan& plan);

struct BruteMetrics {
  double accuracy, precision, recall, f1;
  std::vector<double> per_class_f1;
};

/// Confusion-matrix metrics computed by direct counting.
BruteMetrics brute_force_metrics(const std::vector<std::string>& pred, const std::vector<std::string>& truth,
                                 const std::vector<std::string>& classes);

/// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
 public:
  TempDir();
  ~TempDir();
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;
  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

 private:
  std::filesystem::path path_;
};

std::string slurp(const std::filesystem::path& p);

/// Source tree locations baked in at configure time.
std::filesystem::path source_dir();
std::filesystem::path golden_dir();

}  // namespace sgtest
