#include "splitguard/manifest.hpp"

#include <algorithm>
#include <set>

#include "splitguard/errors.hpp"

namespace splitguard {

std::string_view errc_name(Errc code) {
  switch (code) {
    case Errc::io_error: return "IoError";
    case Errc::parse_error: return "ParseError";
    case Errc::duplicate_record_id: return "DuplicateRecordId";
    case Errc::dangling_source: return "DanglingSourceRecord";
    case Errc::lineage_too_deep: return "LineageTooDeep";
    case Errc::feature_dim_mismatch: return "FeatureDimMismatch";
    case Errc::lineage_disagreement: return "LineageDisagreement";
    case Errc::invalid_record: return "InvalidRecord";
    case Errc::invalid_config: return "InvalidConfig";
    case Errc::insufficient_subjects: return "InsufficientSubjects";
    case Errc::insufficient_records: return "InsufficientRecords";
    case Errc::degenerate_late_split: return "DegenerateLateSplit";
    case Errc::fold_out_of_range: return "FoldOutOfRange";
    case Errc::plan_manifest_mismatch: return "PlanManifestMismatch";
    case Errc::already_augmented: return "AlreadyAugmented";
    case Errc::empty_training_set: return "EmptyTrainingSet";
    case Errc::missing_class: return "MissingClass";
    case Errc::dimension_mismatch: return "DimensionMismatch";
    case Errc::class_mismatch: return "ClassMismatch";
    case Errc::length_mismatch: return "LengthMismatch";
    case Errc::empty_input: return "EmptyInput";
    case Errc::insufficient_groups: return "InsufficientGroups";
  }
  return "Unknown";
}

bool is_validation_error(Errc code) {
  switch (code) {
    case Errc::duplicate_record_id:
    case Errc::dangling_source:
    case Errc::lineage_too_deep:
    case Errc::feature_dim_mismatch:
    case Errc::lineage_disagreement:
    case Errc::invalid_record:
      return true;
    default:
      return false;
  }
}

DatasetManifest DatasetManifest::build(std::vector<RecordEntry> records,
                                       std::vector<std::string> class_order) {
  DatasetManifest m;
  m.records_ = std::move(records);

  for (std::size_t i = 0; i < m.records_.size(); ++i) {
    const auto& r = m.records_[i];
    if (r.record_id.empty()) throw Error(Errc::invalid_record, "record " + std::to_string(i) + " has an empty record_id");
    if (r.subject_id.empty()) throw Error(Errc::invalid_record, "record '" + r.record_id + "' has an empty subject_id");
    if (r.class_label.empty()) throw Error(Errc::invalid_record, "record '" + r.record_id + "' has an empty class_label");
    if (!m.by_id_.emplace(r.record_id, i).second) {
      throw Error(Errc::duplicate_record_id, "duplicate record_id '" + r.record_id + "'");
    }
  }

  for (const auto& r : m.records_) {
    if (!r.source_record_id) continue;
    const RecordEntry* src = m.find(*r.source_record_id);
    if (src == nullptr) {
      throw Error(Errc::dangling_source,
                  "record '" + r.record_id + "' references missing source '" + *r.source_record_id + "'");
    }
    if (src->source_record_id) {
      throw Error(Errc::lineage_too_deep,
                  "record '" + r.record_id + "' is derived from augmented record '" + src->record_id + "'");
    }
    if (src->subject_id != r.subject_id || src->visit_index != r.visit_index ||
        src->class_label != r.class_label) {
      throw Error(Errc::lineage_disagreement,
                  "record '" + r.record_id + "' disagrees with its source '" + src->record_id +
                      "' on subject, visit or label");
    }
  }

  for (const auto& r : m.records_) {
    if (!r.features) continue;
    if (r.features->empty()) {
      throw Error(Errc::feature_dim_mismatch, "record '" + r.record_id + "' has an empty feature vector");
    }
    if (!m.feature_dim_) {
      m.feature_dim_ = r.features->size();
    } else if (*m.feature_dim_ != r.features->size()) {
      throw Error(Errc::feature_dim_mismatch, "record '" + r.record_id + "' has " +
                                                  std::to_string(r.features->size()) + " features, expected " +
                                                  std::to_string(*m.feature_dim_));
    }
  }

  std::set<std::string> labels;
  for (const auto& r : m.records_) labels.insert(r.class_label);
  if (class_order.empty()) {
    m.classes_.assign(labels.begin(), labels.end());
  } else {
    std::set<std::string> listed(class_order.begin(), class_order.end());
    if (listed.size() != class_order.size() || listed != labels) {
      throw Error(Errc::invalid_record, "explicit class order does not match the labels present in records");
    }
    m.classes_ = std::move(class_order);
  }

  for (const auto& r : m.records_) m.subjects_[r.subject_id].push_back(r.record_id);
  return m;
}

const RecordEntry* DatasetManifest::find(std::string_view record_id) const {
  auto it = by_id_.find(std::string(record_id));
  return it == by_id_.end() ? nullptr : &records_[it->second];
}

const RecordEntry& DatasetManifest::at(std::string_view record_id) const {
  const RecordEntry* r = find(record_id);
  if (r == nullptr) throw Error(Errc::plan_manifest_mismatch, "unknown record_id '" + std::string(record_id) + "'");
  return *r;
}

std::size_t DatasetManifest::class_index(std::string_view label) const {
  auto it = std::find(classes_.begin(), classes_.end(), label);
  if (it == classes_.end()) throw Error(Errc::class_mismatch, "unknown class label '" + std::string(label) + "'");
  return static_cast<std::size_t>(it - classes_.begin());
}

bool DatasetManifest::has_lineage() const noexcept {
  return std::any_of(records_.begin(), records_.end(), [](const RecordEntry& r) { return r.is_augmented(); });
}

bool DatasetManifest::has_explicit_class_order() const noexcept {
  return !std::is_sorted(classes_.begin(), classes_.end());
}

std::map<std::string, std::vector<std::string>> DatasetManifest::lineage_groups() const {
  std::map<std::string, std::vector<std::string>> groups;
  for (const auto& r : records_) {
    if (!r.is_augmented()) groups[r.record_id].push_back(r.record_id);
  }
  for (const auto& r : records_) {
    if (r.is_augmented()) groups[*r.source_record_id].push_back(r.record_id);
  }
  return groups;
}

std::vector<SubjectSummary> summarize_subjects(const DatasetManifest& m) {
  std::vector<SubjectSummary> out;
  out.reserve(m.subjects().size());
  for (const auto& [subject, ids] : m.subjects()) {
    SubjectSummary s;
    s.subject_id = subject;
    s.n_records = ids.size();
    for (const auto& id : ids) ++s.label_histogram[m.at(id).class_label];
    std::size_t best = 0;
    for (const auto& label : m.classes()) {
      auto it = s.label_histogram.find(label);
      if (it != s.label_histogram.end() && it->second > best) {
        best = it->second;
        s.majority_label = label;
      }
    }
    out.push_back(std::move(s));
  }
  return out;
}

}  // namespace splitguard
