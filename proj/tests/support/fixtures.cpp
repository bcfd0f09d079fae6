#include "fixtures.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>

namespace sgtest {

namespace fs = std::filesystem;

RecordEntry rec(std::string id, std::string subject, std::uint32_t visit, std::string label) {
  RecordEntry r;
  r.record_id = std::move(id);
  r.subject_id = std::move(subject);
  r.visit_index = visit;
  r.class_label = std::move(label);
  return r;
}

RecordEntry variant(const RecordEntry& source, std::string tag) {
  RecordEntry v = source;
  v.record_id = source.record_id + "-" + tag;
  v.source_record_id = source.record_id;
  v.transform_tag = std::move(tag);
  return v;
}

namespace {

void add_subjects(std::vector<RecordEntry>& out, const std::string& label, int n, int visits, int& next) {
  for (int s = 0; s < n; ++s, ++next) {
    char sid[32];
    std::snprintf(sid, sizeof sid, "%s-%03d", label.c_str(), next);
    for (int v = 0; v < visits; ++v) {
      out.push_back(rec(std::string(sid) + "-v" + std::to_string(v), sid, static_cast<std::uint32_t>(v), label));
    }
  }
}

}  // namespace

DatasetManifest reference_sources() {
  std::vector<RecordEntry> r;
  int cn = 0, mci = 0, ad = 0;
  add_subjects(r, "CN", 27, 4, cn);
  add_subjects(r, "CN", 14, 3, cn);
  add_subjects(r, "MCI", 15, 4, mci);
  add_subjects(r, "MCI", 30, 3, mci);
  add_subjects(r, "AD", 25, 2, ad);
  for (auto& x : r) x.transform_tag = "orig";
  return DatasetManifest::build(std::move(r));
}

DatasetManifest reference_cohort() {
  const std::map<std::string, int> mult{{"AD", 6}, {"CN", 2}, {"MCI", 2}};
  std::vector<RecordEntry> out;
  const auto sources = reference_sources();
  for (const auto& src : sources.records()) {
    out.push_back(src);
    for (int j = 1; j < mult.at(src.class_label); ++j) out.push_back(variant(src, "aug" + std::to_string(j)));
  }
  return DatasetManifest::build(std::move(out));
}

namespace {

DatasetManifest random_manifest_once(std::mt19937_64& gen, const RandomManifestShape& shape) {
  static const std::vector<std::string> pool{"AD", "CN", "MCI", "EMCI", "LMCI"};
  auto uni = [&](int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(gen); };

  std::vector<std::string> labels = pool;
  std::shuffle(labels.begin(), labels.end(), gen);
  labels.resize(static_cast<std::size_t>(shape.n_classes));

  std::map<std::string, int> mult;
  for (const auto& l : labels) mult[l] = uni(1, shape.max_multiplicity);
  if (shape.max_multiplicity >= 2) mult[labels[0]] = std::max(mult[labels[0]], 2);

  std::vector<RecordEntry> sources;
  int sid = 0;
  for (std::size_t c = 0; c < labels.size(); ++c) {
    const int n = shape.k + uni(shape.min_subjects, shape.max_subjects);
    for (int s = 0; s < n; ++s, ++sid) {
      const std::string subject = "p" + std::to_string(sid);
      const int visits = uni(1, shape.max_visits);
      const bool converts =
          visits >= 3 && std::bernoulli_distribution(shape.converter_rate)(gen) && labels.size() > 1;
      for (int v = 0; v < visits; ++v) {
        std::string label = labels[c];
        if (converts && v == visits - 1) label = labels[(c + 1) % labels.size()];
        auto r = rec(subject + "_v" + std::to_string(v), subject, static_cast<std::uint32_t>(v), label);
        r.transform_tag = "orig";
        sources.push_back(std::move(r));
      }
    }
  }

  std::vector<RecordEntry> all;
  for (const auto& s : sources) {
    all.push_back(s);
    for (int j = 1; j < mult[s.class_label]; ++j) all.push_back(variant(s, "aug" + std::to_string(j)));
  }
  std::shuffle(all.begin(), all.end(), gen);
  return DatasetManifest::build(std::move(all));
}

}  // namespace

DatasetManifest random_manifest(std::mt19937_64& gen, const RandomManifestShape& shape) {
  // Variants count toward the majority label, so a converter can change class.
  for (;;) {
    auto m = random_manifest_once(gen, shape);
    std::map<std::string, int> per_class;
    for (const auto& s : splitguard::summarize_subjects(m)) ++per_class[s.majority_label];
    bool ok = per_class.size() == m.classes().size();
    for (const auto& [c, n] : per_class) ok = ok && n >= shape.k;
    if (ok) return m;
  }
}

FoldPlan random_plan(std::mt19937_64& gen, const DatasetManifest& m, int k) {
  FoldPlan plan;
  plan.k = k;
  plan.scheme = splitguard::SplitScheme::record_wise;
  plan.roles.resize(static_cast<std::size_t>(k));
  std::uniform_int_distribution<int> fold(0, k - 1);
  for (const auto& r : m.records()) plan.assignment[r.record_id] = fold(gen);
  std::bernoulli_distribution to_val(0.15);
  for (int f = 0; f < k; ++f) {
    auto& roles = plan.roles[static_cast<std::size_t>(f)];
    for (const auto& [id, g] : plan.assignment) {
      if (g == f) {
        roles.test.push_back(id);
      } else if (to_val(gen)) {
        roles.val.push_back(id);
      } else {
        roles.train.push_back(id);
      }
    }
  }
  return plan;
}

std::set<FindingKey> finding_keys(const std::vector<splitguard::LeakFinding>& findings) {
  std::set<FindingKey> out;
  for (const auto& f : findings) {
    const std::string id = f.subject_id ? *f.subject_id : f.record_id.value_or("");
    out.emplace(std::string(splitguard::finding_kind_name(f.kind)), f.fold, id);
  }
  return out;
}

std::set<FindingKey> brute_force_leaks(const DatasetManifest& m, const FoldPlan& plan) {
  std::map<std::string, const RecordEntry*> by_id;
  for (const auto& r : m.records()) by_id[r.record_id] = &r;
  auto root = [](const RecordEntry& r) { return r.source_record_id ? *r.source_record_id : r.record_id; };

  std::set<FindingKey> out;
  for (int f = 0; f < plan.k; ++f) {
    const auto& roles = plan.roles[static_cast<std::size_t>(f)];
    std::vector<std::string> protected_ids = roles.train;
    protected_ids.insert(protected_ids.end(), roles.val.begin(), roles.val.end());
    for (const auto& a_id : roles.test) {
      const RecordEntry& a = *by_id.at(a_id);
      for (const auto& b_id : protected_ids) {
        const RecordEntry& b = *by_id.at(b_id);
        if (a.subject_id == b.subject_id) out.emplace("subject_overlap", f, a.subject_id);
        if (root(a) == root(b)) out.emplace("lineage_overlap", f, root(a));
      }
    }
  }
  return out;
}

BruteMetrics brute_force_metrics(const std::vector<std::string>& pred, const std::vector<std::string>& truth,
                                 const std::vector<std::string>& classes) {
  BruteMetrics out{0, 0, 0, 0, {}};
  const std::size_t n = truth.size();
  std::size_t correct = 0;
  for (std::size_t i = 0; i < n; ++i) correct += pred[i] == truth[i] ? 1 : 0;
  out.accuracy = static_cast<double>(correct) / static_cast<double>(n);
  for (const auto& c : classes) {
    double tp = 0, npred = 0, ntrue = 0;
    for (std::size_t i = 0; i < n; ++i) {
      if (pred[i] == c) npred += 1;
      if (truth[i] == c) ntrue += 1;
      if (pred[i] == c && truth[i] == c) tp += 1;
    }
    const double p = npred > 0 ? tp / npred : 0.0;
    const double r = ntrue > 0 ? tp / ntrue : 0.0;
    const double f = p + r > 0 ? 2 * p * r / (p + r) : 0.0;
    out.precision += p;
    out.recall += r;
    out.f1 += f;
    out.per_class_f1.push_back(f);
  }
  const double nc = static_cast<double>(classes.size());
  out.precision /= nc;
  out.recall /= nc;
  out.f1 /= nc;
  return out;
}

TempDir::TempDir() {
  static int counter = 0;
  std::random_device rd;
  for (;;) {
    path_ = fs::temp_directory_path() /
            ("splitguard-test-" + std::to_string(rd()) + "-" + std::to_string(counter++));
    if (fs::create_directory(path_)) break;
  }
}

TempDir::~TempDir() {
  std::error_code ec;
  fs::remove_all(path_, ec);
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + p.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

fs::path source_dir() { return SPLITGUARD_SOURCE_DIR; }
fs::path golden_dir() { return source_dir() / "tests" / "golden"; }

}  // namespace sgtest
