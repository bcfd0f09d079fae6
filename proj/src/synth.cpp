#include "splitguard/synth.hpp"

#include <cmath>
#include <cstdio>
#include <set>

#include "splitguard/errors.hpp"
#include "splitguard/rng.hpp"

namespace splitguard {

namespace {

void invalid(const std::string& what) { throw Error(Errc::invalid_config, what); }

std::vector<double> normal_vector(CounterRng& rng, int dim, double sd) {
  std::vector<double> v(static_cast<std::size_t>(dim));
  for (auto& x : v) x = sd * rng.normal();
  return v;
}

std::string padded(int value, int width) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%0*d", width, value);
  return buf;
}

}  // namespace

int SynthConfig::multiplicity_for(std::string_view label) const {
  auto it = augmentation_multiplicity.find(std::string(label));
  return it == augmentation_multiplicity.end() ? 2 : it->second;
}

void validate_synth_config(const SynthConfig& cfg) {
  if (cfg.n_classes < 2) invalid("n_classes must be at least 2");
  if (cfg.class_labels.size() != static_cast<std::size_t>(cfg.n_classes)) {
    invalid("class_labels must list n_classes labels");
  }
  std::set<std::string> labels;
  for (const auto& l : cfg.class_labels) {
    if (l.empty() || l.find_first_of(",\"\n") != std::string::npos) invalid("class labels must be non-empty plain text");
    if (!labels.insert(l).second) invalid("duplicate class label '" + l + "'");
  }
  if (cfg.subjects_per_class.size() != static_cast<std::size_t>(cfg.n_classes)) {
    invalid("subjects_per_class must have n_classes entries");
  }
  for (int n : cfg.subjects_per_class) {
    if (n < 1) invalid("subjects_per_class entries must be positive");
  }
  if (!cfg.holdout_subjects_per_class.empty()) {
    if (cfg.holdout_subjects_per_class.size() != static_cast<std::size_t>(cfg.n_classes)) {
      invalid("holdout_subjects_per_class must have n_classes entries");
    }
    for (int n : cfg.holdout_subjects_per_class) {
      if (n < 1) invalid("holdout_subjects_per_class entries must be positive");
    }
  }
  if (cfg.visits_min < 1 || cfg.visits_max < cfg.visits_min) invalid("visits_per_subject must satisfy 1 <= min <= max");
  if (cfg.holdout_visit_offset < 0) invalid("holdout_visit_offset must be non-negative");
  if (cfg.feature_dim < cfg.n_classes) invalid("feature_dim must be at least n_classes for orthogonal class means");
  for (double s : {cfg.class_signal_scale, cfg.fingerprint_scale, cfg.visit_drift_scale, cfg.noise_scale,
                   cfg.augment_perturb_scale}) {
    if (!std::isfinite(s) || s < 0.0) invalid("scales must be finite and non-negative");
  }
  for (const auto& [label, mult] : cfg.augmentation_multiplicity) {
    if (!labels.contains(label)) invalid("augmentation_multiplicity names unknown class '" + label + "'");
    if (mult < 1) invalid("augmentation multiplicity must be at least 1");
  }
}

std::vector<FeatureRecord> generate_feature_records(const SynthConfig& cfg, CohortRole role) {
  validate_synth_config(cfg);
  const int dim = cfg.feature_dim;
  const double unit = 1.0 / std::sqrt(static_cast<double>(dim));
  const bool holdout = role == CohortRole::holdout;
  const auto& counts =
      holdout && !cfg.holdout_subjects_per_class.empty() ? cfg.holdout_subjects_per_class : cfg.subjects_per_class;
  const std::uint32_t visit_base = holdout ? static_cast<std::uint32_t>(cfg.holdout_visit_offset) : 0;

  std::vector<FeatureRecord> out;
  for (int c = 0; c < cfg.n_classes; ++c) {
    const auto& label = cfg.class_labels[static_cast<std::size_t>(c)];
    std::vector<double> mean(static_cast<std::size_t>(dim), 0.0);
    mean[static_cast<std::size_t>(c % dim)] = cfg.class_signal_scale;

    for (int s = 0; s < counts[static_cast<std::size_t>(c)]; ++s) {
      CounterRng rng(derive_key(cfg.seed, {fnv1a64("subject"), fnv1a64(label), static_cast<std::uint64_t>(s),
                                           static_cast<std::uint64_t>(holdout)}));
      const std::string subject = label + (holdout ? "-h" : "-s") + padded(s + 1, 3);
      const auto n_visits =
          cfg.visits_min + static_cast<int>(rng.below(static_cast<std::uint64_t>(cfg.visits_max - cfg.visits_min + 1)));
      auto fingerprint = normal_vector(rng, dim, cfg.fingerprint_scale * unit);
      auto drift = normal_vector(rng, dim, cfg.visit_drift_scale * unit);

      for (int v = 0; v < n_visits; ++v) {
        FeatureRecord fr;
        fr.class_mean = mean;
        fr.fingerprint = fingerprint;
        fr.drift = drift;
        fr.noise = normal_vector(rng, dim, cfg.noise_scale * unit);
        auto& r = fr.record;
        r.visit_index = visit_base + static_cast<std::uint32_t>(v);
        r.subject_id = subject;
        r.record_id = subject + "-v" + padded(static_cast<int>(r.visit_index), 2);
        r.class_label = label;
        r.transform_tag = "orig";
        std::vector<double> x(static_cast<std::size_t>(dim));
        const double t = static_cast<double>(r.visit_index);
        for (std::size_t i = 0; i < x.size(); ++i) {
          x[i] = fr.class_mean[i] + fr.fingerprint[i] + t * fr.drift[i] + fr.noise[i];
        }
        r.features = std::move(x);
        out.push_back(std::move(fr));
      }
    }
  }
  return out;
}

namespace {

DatasetManifest to_manifest(std::vector<FeatureRecord> records) {
  std::vector<RecordEntry> entries;
  entries.reserve(records.size());
  for (auto& fr : records) entries.push_back(std::move(fr.record));
  return DatasetManifest::build(std::move(entries));
}

}  // namespace

DatasetManifest generate_cohort(const SynthConfig& cfg) { return to_manifest(generate_feature_records(cfg)); }

DatasetManifest generate_holdout_cohort(const SynthConfig& cfg) {
  return to_manifest(generate_feature_records(cfg, CohortRole::holdout));
}

std::vector<double> augmentation_offset(const SynthConfig& cfg, int index) {
  CounterRng rng(derive_key(cfg.seed, {fnv1a64("augment"), static_cast<std::uint64_t>(index)}));
  std::vector<double> v(static_cast<std::size_t>(cfg.feature_dim));
  double norm = 0.0;
  while (norm == 0.0) {
    for (auto& x : v) x = rng.normal();
    norm = 0.0;
    for (double x : v) norm += x * x;
    norm = std::sqrt(norm);
  }
  for (auto& x : v) x = x / norm * cfg.augment_perturb_scale;
  return v;
}

DatasetManifest augment_records(const DatasetManifest& m, const SynthConfig& cfg) {
  validate_synth_config(cfg);
  if (m.has_lineage()) throw Error(Errc::already_augmented, "manifest already contains augmented records");

  int max_mult = 1;
  for (const auto& label : m.classes()) max_mult = std::max(max_mult, cfg.multiplicity_for(label));
  std::vector<std::vector<double>> offsets(static_cast<std::size_t>(max_mult));
  if (m.feature_dim() && static_cast<int>(*m.feature_dim()) != cfg.feature_dim) {
    throw Error(Errc::invalid_config, "manifest feature dimension differs from feature_dim");
  }
  for (int j = 1; j < max_mult; ++j) offsets[static_cast<std::size_t>(j)] = augmentation_offset(cfg, j);

  std::vector<RecordEntry> out;
  for (const auto& src : m.records()) {
    out.push_back(src);
    const int mult = cfg.multiplicity_for(src.class_label);
    for (int j = 1; j < mult; ++j) {
      RecordEntry v = src;
      v.record_id = src.record_id + "-aug" + std::to_string(j);
      v.source_record_id = src.record_id;
      v.transform_tag = "aug" + std::to_string(j);
      if (src.features) {
        const auto& off = offsets[static_cast<std::size_t>(j)];
        for (std::size_t i = 0; i < v.features->size(); ++i) (*v.features)[i] = (*src.features)[i] + off[i];
      }
      out.push_back(std::move(v));
    }
  }
  return DatasetManifest::build(std::move(out), m.has_explicit_class_order() ? m.classes() : std::vector<std::string>{});
}

}  // namespace splitguard
