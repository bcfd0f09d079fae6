#include <algorithm>
#include <limits>
#include <numeric>

#include "splitguard/errors.hpp"
#include "splitguard/evalsim.hpp"

namespace splitguard {

std::string_view oracle_name(OracleKind kind) { return kind == OracleKind::knn1 ? "knn1" : "class_centroid"; }

std::optional<OracleKind> parse_oracle(std::string_view name) {
  if (name == "knn1" || name == "knn") return OracleKind::knn1;
  if (name == "centroid" || name == "class_centroid") return OracleKind::class_centroid;
  return std::nullopt;
}

OracleModel fit(OracleKind kind, std::span<const RecordEntry* const> train, std::span<const std::string> classes) {
  if (train.empty()) throw Error(Errc::empty_training_set, "no training records");
  std::size_t dim = 0;
  for (const RecordEntry* r : train) {
    if (!r->features) throw Error(Errc::dimension_mismatch, "training record '" + r->record_id + "' has no features");
    if (dim == 0) dim = r->features->size();
    if (r->features->size() != dim) throw Error(Errc::dimension_mismatch, "training features differ in dimension");
  }

  OracleModel model;
  model.kind_ = kind;
  model.dim_ = dim;

  if (kind == OracleKind::knn1) {
    std::vector<const RecordEntry*> sorted(train.begin(), train.end());
    std::sort(sorted.begin(), sorted.end(),
              [](const RecordEntry* a, const RecordEntry* b) { return a->record_id < b->record_id; });
    model.data_.reserve(sorted.size() * dim);
    for (const RecordEntry* r : sorted) {
      model.ids_.push_back(r->record_id);
      model.labels_.push_back(r->class_label);
      model.data_.insert(model.data_.end(), r->features->begin(), r->features->end());
    }
    return model;
  }

  for (const auto& label : classes) {
    std::vector<double> sum(dim, 0.0);
    std::size_t n = 0;
    for (const RecordEntry* r : train) {
      if (r->class_label != label) continue;
      for (std::size_t i = 0; i < dim; ++i) sum[i] += (*r->features)[i];
      ++n;
    }
    if (n == 0) throw Error(Errc::missing_class, "no training records for class '" + label + "'");
    for (auto& x : sum) x /= static_cast<double>(n);
    model.ids_.push_back(label);
    model.labels_.push_back(label);
    model.data_.insert(model.data_.end(), sum.begin(), sum.end());
  }
  return model;
}

std::string OracleModel::predict(std::span<const double> x) const {
  if (x.size() != dim_) {
    throw Error(Errc::dimension_mismatch, "query has " + std::to_string(x.size()) + " features, model expects " +
                                              std::to_string(dim_));
  }
  // Stored points are in tie-break order, so the first strict minimum wins.
  std::size_t best = 0;
  double best_d = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < labels_.size(); ++i) {
    const double* p = data_.data() + i * dim_;
    double d = 0.0;
    for (std::size_t j = 0; j < dim_; ++j) {
      const double diff = x[j] - p[j];
      d += diff * diff;
    }
    if (d < best_d) {
      best_d = d;
      best = i;
    }
  }
  return labels_[best];
}

std::string predict(const OracleModel& model, std::span<const double> features) { return model.predict(features); }

}  // namespace splitguard
