#include "splitguard/auditor.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <sstream>

#include <json.hpp>

#include "splitguard/errors.hpp"
#include "splitguard/plan_io.hpp"

namespace splitguard {

namespace {

void mismatch(const std::string& what) { throw Error(Errc::plan_manifest_mismatch, what); }

template <typename KeyFn>
std::map<std::string, std::size_t> count_by(const DatasetManifest& m, const std::vector<std::string>& ids, KeyFn key) {
  std::map<std::string, std::size_t> out;
  for (const auto& id : ids) ++out[key(m.at(id))];
  return out;
}

std::map<std::string, std::size_t> count_protected(const DatasetManifest& m, const FoldRoles& roles, auto key) {
  auto out = count_by(m, roles.train, key);
  for (const auto& [k, n] : count_by(m, roles.val, key)) out[k] += n;
  return out;
}

}  // namespace

std::string_view finding_kind_name(FindingKind kind) {
  switch (kind) {
    case FindingKind::subject_overlap: return "subject_overlap";
    case FindingKind::lineage_overlap: return "lineage_overlap";
    case FindingKind::cross_manifest_subject: return "cross_manifest_subject";
    case FindingKind::mixed_label_subject: return "mixed_label_subject";
  }
  return "unknown";
}

void check_plan_covers(const DatasetManifest& m, const FoldPlan& plan) {
  if (plan.k < 1 || plan.roles.size() != static_cast<std::size_t>(plan.k)) mismatch("plan roles do not match k");
  for (const auto& [id, fold] : plan.assignment) {
    if (!m.contains(id)) mismatch("plan references unknown record_id '" + id + "'");
    if (fold < 0 || fold >= plan.k) mismatch("record '" + id + "' is assigned outside [0, k)");
  }
  for (const auto& r : m.records()) {
    if (!plan.assignment.contains(r.record_id)) mismatch("record '" + r.record_id + "' is not assigned by the plan");
  }
  for (int f = 0; f < plan.k; ++f) {
    const auto& roles = plan.roles[static_cast<std::size_t>(f)];
    std::set<std::string> seen;
    for (const auto* list : {&roles.train, &roles.val, &roles.test}) {
      for (const auto& id : *list) {
        if (!m.contains(id)) mismatch("fold " + std::to_string(f) + " references unknown record_id '" + id + "'");
        if (!seen.insert(id).second) mismatch("record '" + id + "' has two roles in fold " + std::to_string(f));
      }
    }
    if (seen.size() != m.size()) mismatch("fold " + std::to_string(f) + " roles do not cover every record");
    for (const auto& id : roles.test) {
      if (plan.assignment.at(id) != f) mismatch("test set of fold " + std::to_string(f) + " disagrees with assignment");
    }
    std::size_t assigned = 0;
    for (const auto& [id, fold] : plan.assignment) assigned += fold == f;
    if (assigned != roles.test.size()) mismatch("test set of fold " + std::to_string(f) + " disagrees with assignment");
  }
}

std::vector<LeakFinding> audit_fold_subject_overlap(const DatasetManifest& m, int fold, const FoldRoles& roles) {
  auto subject = [](const RecordEntry& r) { return r.subject_id; };
  auto test = count_by(m, roles.test, subject);
  auto seen = count_protected(m, roles, subject);
  std::vector<LeakFinding> out;
  for (const auto& [s, n_test] : test) {
    auto it = seen.find(s);
    if (it == seen.end()) continue;
    out.push_back({FindingKind::subject_overlap, fold, s, std::nullopt,
                   "subject " + s + " has " + std::to_string(n_test) + " test record(s) and " +
                       std::to_string(it->second) + " train/val record(s) in fold " + std::to_string(fold)});
  }
  return out;
}

std::vector<LeakFinding> audit_fold_lineage_overlap(const DatasetManifest& m, int fold, const FoldRoles& roles) {
  auto root = [](const RecordEntry& r) { return r.lineage_root(); };
  auto test = count_by(m, roles.test, root);
  auto seen = count_protected(m, roles, root);
  std::vector<LeakFinding> out;
  for (const auto& [src, n_test] : test) {
    auto it = seen.find(src);
    if (it == seen.end()) continue;
    out.push_back({FindingKind::lineage_overlap, fold, std::nullopt, src,
                   "source " + src + " has " + std::to_string(n_test) + " lineage member(s) in test and " +
                       std::to_string(it->second) + " in train/val of fold " + std::to_string(fold)});
  }
  return out;
}

std::vector<LeakFinding> audit_subject_overlap(const DatasetManifest& m, const FoldPlan& plan) {
  check_plan_covers(m, plan);
  std::vector<LeakFinding> out;
  for (int f = 0; f < plan.k; ++f) {
    auto part = audit_fold_subject_overlap(m, f, plan.roles[static_cast<std::size_t>(f)]);
    out.insert(out.end(), part.begin(), part.end());
  }
  return out;
}

std::vector<LeakFinding> audit_lineage_overlap(const DatasetManifest& m, const FoldPlan& plan) {
  check_plan_covers(m, plan);
  std::vector<LeakFinding> out;
  for (int f = 0; f < plan.k; ++f) {
    auto part = audit_fold_lineage_overlap(m, f, plan.roles[static_cast<std::size_t>(f)]);
    out.insert(out.end(), part.begin(), part.end());
  }
  return out;
}

BalanceTable audit_balance(const DatasetManifest& m, const FoldPlan& plan) {
  check_plan_covers(m, plan);
  const std::size_t n_classes = m.classes().size();
  const auto k = static_cast<std::size_t>(plan.k);

  BalanceTable t;
  t.scheme = plan.scheme;
  t.classes = m.classes();
  t.records.assign(k, std::vector<std::size_t>(n_classes, 0));
  t.units.assign(k, std::vector<std::size_t>(n_classes, 0));
  t.threshold.assign(n_classes, 0);

  std::map<std::string, std::string> majority;
  for (const auto& s : summarize_subjects(m)) majority[s.subject_id] = s.majority_label;

  struct Unit {
    std::size_t cls = 0;
    std::size_t size = 0;
  };
  std::map<std::string, Unit> units;
  for (const auto& [id, fold] : plan.assignment) {
    const auto& r = m.at(id);
    std::string key;
    std::size_t c = 0;
    switch (plan.scheme) {
      case SplitScheme::subject_wise:
        key = r.subject_id;
        c = m.class_index(majority.at(r.subject_id));
        break;
      case SplitScheme::record_wise:
        key = r.lineage_root();
        c = m.class_index(m.at(key).class_label);
        break;
      case SplitScheme::late_wise:
        key = r.record_id;
        c = m.class_index(r.class_label);
        break;
    }
    const auto f = static_cast<std::size_t>(fold);
    ++t.records[f][c];
    auto [it, fresh] = units.try_emplace(key, Unit{c, 0});
    if (fresh) ++t.units[f][c];
    ++it->second.size;
  }

  // The widest record spread a plan with per-fold unit counts within one of
  // each other can reach: the ceil(n/k) largest units against the floor(n/k)
  // smallest.
  std::vector<std::vector<std::size_t>> sizes(n_classes);
  for (const auto& [key, u] : units) sizes[u.cls].push_back(u.size);
  for (std::size_t c = 0; c < n_classes; ++c) {
    auto& v = sizes[c];
    std::sort(v.begin(), v.end());
    const std::size_t lo_n = v.size() / k;
    const std::size_t hi_n = (v.size() + k - 1) / k;
    std::size_t top = 0, bottom = 0;
    for (std::size_t i = 0; i < hi_n; ++i) top += v[v.size() - 1 - i];
    for (std::size_t i = 0; i < lo_n; ++i) bottom += v[i];
    t.threshold[c] = top - bottom;
  }

  auto spread = [&](const std::vector<std::vector<std::size_t>>& table, std::size_t c) {
    std::size_t lo = SIZE_MAX, hi = 0;
    for (std::size_t f = 0; f < k; ++f) {
      lo = std::min(lo, table[f][c]);
      hi = std::max(hi, table[f][c]);
    }
    return hi - lo;
  };
  for (std::size_t c = 0; c < n_classes; ++c) {
    if (spread(t.units, c) > 1 || spread(t.records, c) > t.threshold[c]) t.flagged.push_back(m.classes()[c]);
  }
  return t;
}

std::vector<LeakFinding> audit_cross_manifest(const DatasetManifest& train_m, const DatasetManifest& holdout_m) {
  std::vector<LeakFinding> out;
  for (const auto& [s, ids] : train_m.subjects()) {
    auto it = holdout_m.subjects().find(s);
    if (it == holdout_m.subjects().end()) continue;
    out.push_back({FindingKind::cross_manifest_subject, -1, s, std::nullopt,
                   "subject " + s + " appears in both manifests (" + std::to_string(ids.size()) + " and " +
                       std::to_string(it->second.size()) + " records)"});
  }
  return out;
}

std::vector<LeakFinding> audit_mixed_labels(const DatasetManifest& m) {
  std::vector<LeakFinding> out;
  for (const auto& s : summarize_subjects(m)) {
    if (!s.mixed_label()) continue;
    std::string labels;
    for (const auto& [label, n] : s.label_histogram) {
      labels += (labels.empty() ? "" : ", ") + label + ":" + std::to_string(n);
    }
    out.push_back({FindingKind::mixed_label_subject, -1, s.subject_id, std::nullopt,
                   "subject " + s.subject_id + " has mixed labels {" + labels + "}; stratified as " +
                       s.majority_label});
  }
  return out;
}

AuditReport audit_plan(const DatasetManifest& m, const FoldPlan& plan, const DatasetManifest* holdout) {
  AuditReport report;
  auto subjects = audit_subject_overlap(m, plan);
  auto lineage = audit_lineage_overlap(m, plan);
  report.n_subject_overlap = subjects.size();
  report.n_lineage_overlap = lineage.size();
  report.verdict = subjects.empty() && lineage.empty() ? Verdict::clean : Verdict::leaky;
  report.balance = audit_balance(m, plan);
  report.findings = std::move(subjects);
  report.findings.insert(report.findings.end(), lineage.begin(), lineage.end());
  auto mixed = audit_mixed_labels(m);
  report.findings.insert(report.findings.end(), mixed.begin(), mixed.end());
  if (holdout != nullptr) {
    auto cross = audit_cross_manifest(m, *holdout);
    report.findings.insert(report.findings.end(), cross.begin(), cross.end());
  }
  return report;
}

std::string audit_to_json(const AuditReport& report) {
  using nlohmann::json;
  json findings = json::array();
  for (const auto& f : report.findings) {
    json j = {{"kind", finding_kind_name(f.kind)}, {"fold", f.fold}, {"detail", f.detail}};
    if (f.subject_id) j["subject_id"] = *f.subject_id;
    if (f.record_id) j["record_id"] = *f.record_id;
    findings.push_back(std::move(j));
  }
  const auto& b = report.balance;
  json folds = json::array();
  for (std::size_t f = 0; f < b.records.size(); ++f) {
    json records = json::object(), units = json::object();
    for (std::size_t c = 0; c < b.classes.size(); ++c) {
      records[b.classes[c]] = b.records[f][c];
      units[b.classes[c]] = b.units[f][c];
    }
    folds.push_back({{"fold", f}, {"records", records}, {"units", units}});
  }
  json thresholds = json::object();
  for (std::size_t c = 0; c < b.classes.size(); ++c) thresholds[b.classes[c]] = b.threshold[c];
  json doc = {{"schema_version", kSchemaVersion},
              {"verdict", report.verdict == Verdict::clean ? "clean" : "leaky"},
              {"counts", {{"n_subject_overlap", report.n_subject_overlap}, {"n_lineage_overlap", report.n_lineage_overlap}}},
              {"balance",
               {{"scheme", scheme_name(b.scheme)},
                {"classes", b.classes},
                {"folds", folds},
                {"thresholds", thresholds},
                {"flagged", b.flagged}}},
              {"findings", findings}};
  return doc.dump(2) + "\n";
}

std::string audit_to_text(const AuditReport& report, bool color) {
  const char* on = "";
  const char* off = color ? "\x1b[0m" : "";
  if (color) on = report.verdict == Verdict::clean ? "\x1b[32m" : "\x1b[31m";
  std::ostringstream os;
  os << "verdict: " << on << (report.verdict == Verdict::clean ? "CLEAN" : "LEAKY") << off << '\n';
  os << "subject overlaps: " << report.n_subject_overlap << "  lineage overlaps: " << report.n_lineage_overlap
     << '\n';

  const auto& b = report.balance;
  os << "\nbalance (" << scheme_name(b.scheme) << ", test records / units per fold)\n";
  os << "fold";
  for (const auto& c : b.classes) os << '\t' << c;
  os << '\n';
  for (std::size_t f = 0; f < b.records.size(); ++f) {
    os << f;
    for (std::size_t c = 0; c < b.classes.size(); ++c) os << '\t' << b.records[f][c] << '/' << b.units[f][c];
    os << '\n';
  }
  if (!b.flagged.empty()) {
    os << "unbalanced classes:";
    for (const auto& c : b.flagged) os << ' ' << c;
    os << '\n';
  }
  if (!report.findings.empty()) {
    os << "\nfindings\n";
    for (const auto& f : report.findings) {
      os << "  [" << finding_kind_name(f.kind) << "] ";
      if (f.fold >= 0) os << "fold " << f.fold << ": ";
      os << f.detail << '\n';
    }
  }
  return os.str();
}

}  // namespace splitguard
