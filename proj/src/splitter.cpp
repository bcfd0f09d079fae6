#include "splitguard/splitter.hpp"

#include <algorithm>
#include <cmath>

#include "splitguard/errors.hpp"
#include "splitguard/rng.hpp"

namespace splitguard {

namespace {

// Smallest group of records that must share a fold.
struct Unit {
  std::string key;
  std::size_t class_idx = 0;
  std::vector<std::string> records;
};

using UnitsByClass = std::vector<std::vector<Unit>>;

std::uint64_t validation_key(std::uint64_t seed, std::string_view label, int fold) {
  return derive_key(class_stream_key(seed, label), {fnv1a64("validation"), static_cast<std::uint64_t>(fold)});
}

std::size_t validation_target(const SplitConfig& cfg, std::size_t n_records) {
  return static_cast<std::size_t>(std::floor(cfg.val_fraction_of_total * static_cast<double>(n_records) + 1e-9));
}

void require_scheme(const SplitConfig& cfg, SplitScheme expected) {
  validate_config(cfg);
  if (cfg.scheme != expected) {
    throw Error(Errc::invalid_config, "config scheme is " + std::string(scheme_name(cfg.scheme)) + ", expected " +
                                          std::string(scheme_name(expected)));
  }
}

UnitsByClass subject_units(const DatasetManifest& m) {
  UnitsByClass units(m.classes().size());
  for (const auto& s : summarize_subjects(m)) {
    auto c = m.class_index(s.majority_label);
    units[c].push_back({s.subject_id, c, m.subjects().at(s.subject_id)});
  }
  return units;
}

UnitsByClass lineage_units(const DatasetManifest& m) {
  UnitsByClass units(m.classes().size());
  for (auto& [root, ids] : m.lineage_groups()) {
    auto c = m.class_index(m.at(root).class_label);
    units[c].push_back({root, c, ids});
  }
  return units;
}

// Per-class seeded shuffle of units already in canonical (sorted) order.
void shuffle_per_class(UnitsByClass& units, const DatasetManifest& m, std::uint64_t seed) {
  for (std::size_t c = 0; c < units.size(); ++c) {
    CounterRng rng(class_stream_key(seed, m.classes()[c]));
    shuffle(units[c], rng);
  }
}

// Largest-remainder apportionment of `target` across classes by record share.
std::vector<std::size_t> class_quotas(const DatasetManifest& m, std::size_t target) {
  std::vector<std::size_t> n_class(m.classes().size(), 0);
  for (const auto& r : m.records()) ++n_class[m.class_index(r.class_label)];
  const std::size_t n = m.size();
  std::vector<std::size_t> quota(n_class.size());
  std::vector<std::size_t> rem(n_class.size());
  std::size_t assigned = 0;
  for (std::size_t c = 0; c < n_class.size(); ++c) {
    quota[c] = target * n_class[c] / n;
    rem[c] = target * n_class[c] % n;
    assigned += quota[c];
  }
  std::vector<std::size_t> order(n_class.size());
  for (std::size_t c = 0; c < order.size(); ++c) order[c] = c;
  std::stable_sort(order.begin(), order.end(), [&](auto a, auto b) { return rem[a] > rem[b]; });
  for (std::size_t i = 0; assigned < target; ++i, ++assigned) ++quota[order[i % order.size()]];
  return quota;
}

// Adds whole units until `target` records are reached, skipping any unit that
// would push the total past twice the target.
void fill_validation(const std::vector<const Unit*>& candidates, std::size_t target, std::vector<std::string>& val) {
  if (target == 0) return;
  std::size_t count = 0;
  for (const Unit* u : candidates) {
    if (count >= target) break;
    if (count + u->records.size() > 2 * target) continue;
    val.insert(val.end(), u->records.begin(), u->records.end());
    count += u->records.size();
  }
}

struct Dealt {
  UnitsByClass units;
  std::vector<std::vector<int>> fold;  // parallel to units
};

Dealt deal_round_robin(UnitsByClass units, int k) {
  Dealt d;
  d.fold.resize(units.size());
  for (std::size_t c = 0; c < units.size(); ++c) {
    d.fold[c].resize(units[c].size());
    for (std::size_t i = 0; i < units[c].size(); ++i) d.fold[c][i] = static_cast<int>(i % static_cast<std::size_t>(k));
  }
  d.units = std::move(units);
  return d;
}

enum class ValidationMode { global_interleaved, per_class_quota };

FoldPlan assemble(const DatasetManifest& m, const SplitConfig& cfg, const Dealt& dealt, ValidationMode mode) {
  FoldPlan plan;
  plan.k = cfg.k;
  plan.scheme = cfg.scheme;
  plan.seed = cfg.seed;
  plan.val_fraction_of_total = cfg.val_fraction_of_total;
  plan.roles.resize(static_cast<std::size_t>(cfg.k));

  for (std::size_t c = 0; c < dealt.units.size(); ++c) {
    for (std::size_t i = 0; i < dealt.units[c].size(); ++i) {
      for (const auto& id : dealt.units[c][i].records) plan.assignment[id] = dealt.fold[c][i];
    }
  }

  const std::size_t target = validation_target(cfg, m.size());
  const auto quotas = mode == ValidationMode::per_class_quota ? class_quotas(m, target) : std::vector<std::size_t>{};

  for (int f = 0; f < cfg.k; ++f) {
    auto& roles = plan.roles[static_cast<std::size_t>(f)];

    std::vector<std::vector<const Unit*>> pool(dealt.units.size());
    for (std::size_t c = 0; c < dealt.units.size(); ++c) {
      // Canonical order first so the shuffle depends only on the pool contents.
      for (std::size_t i = 0; i < dealt.units[c].size(); ++i) {
        if (dealt.fold[c][i] != f) pool[c].push_back(&dealt.units[c][i]);
      }
      std::sort(pool[c].begin(), pool[c].end(), [](const Unit* a, const Unit* b) { return a->key < b->key; });
      CounterRng rng(validation_key(cfg.seed, m.classes()[c], f));
      shuffle(pool[c], rng);
    }

    if (mode == ValidationMode::global_interleaved) {
      std::vector<const Unit*> interleaved;
      for (std::size_t round = 0;; ++round) {
        bool any = false;
        for (const auto& p : pool) {
          if (round < p.size()) {
            interleaved.push_back(p[round]);
            any = true;
          }
        }
        if (!any) break;
      }
      fill_validation(interleaved, target, roles.val);
    } else {
      for (std::size_t c = 0; c < pool.size(); ++c) fill_validation(pool[c], quotas[c], roles.val);
    }
    std::sort(roles.val.begin(), roles.val.end());

    for (const auto& [id, fold] : plan.assignment) {
      if (fold == f) {
        roles.test.push_back(id);
      } else if (!std::binary_search(roles.val.begin(), roles.val.end(), id)) {
        roles.train.push_back(id);
      }
    }
  }
  return plan;
}

}  // namespace

std::string_view scheme_name(SplitScheme s) {
  switch (s) {
    case SplitScheme::subject_wise: return "subject_wise";
    case SplitScheme::record_wise: return "record_wise";
    case SplitScheme::late_wise: return "late_wise";
  }
  return "unknown";
}

std::optional<SplitScheme> parse_scheme(std::string_view name) {
  if (name == "subject_wise" || name == "subject") return SplitScheme::subject_wise;
  if (name == "record_wise" || name == "record") return SplitScheme::record_wise;
  if (name == "late_wise" || name == "late") return SplitScheme::late_wise;
  return std::nullopt;
}

std::uint64_t class_stream_key(std::uint64_t seed, std::string_view class_label) {
  return seed ^ fnv1a64(class_label);
}

void validate_config(const SplitConfig& cfg) {
  if (cfg.k < 2) throw Error(Errc::invalid_config, "k must be at least 2 (got " + std::to_string(cfg.k) + ")");
  const double vf = cfg.val_fraction_of_total;
  if (!std::isfinite(vf) || vf < 0.0 || vf >= 1.0) {
    throw Error(Errc::invalid_config, "val_fraction_of_total must lie in [0, 1)");
  }
  if (vf >= static_cast<double>(cfg.k - 1) / cfg.k) {
    throw Error(Errc::invalid_config, "val_fraction_of_total must be below (k-1)/k");
  }
}

FoldPlan split_subject_wise(const DatasetManifest& m, const SplitConfig& cfg) {
  require_scheme(cfg, SplitScheme::subject_wise);
  auto units = subject_units(m);
  if (m.subjects().size() < static_cast<std::size_t>(cfg.k)) {
    throw Error(Errc::invalid_config, "k exceeds the number of subjects");
  }
  for (std::size_t c = 0; c < units.size(); ++c) {
    if (units[c].size() < static_cast<std::size_t>(cfg.k)) {
      throw Error(Errc::insufficient_subjects, "class '" + m.classes()[c] + "' has " +
                                                   std::to_string(units[c].size()) + " subjects, fewer than k=" +
                                                   std::to_string(cfg.k));
    }
  }
  shuffle_per_class(units, m, cfg.seed);
  return assemble(m, cfg, deal_round_robin(std::move(units), cfg.k), ValidationMode::global_interleaved);
}

FoldPlan split_record_wise(const DatasetManifest& m, const SplitConfig& cfg) {
  require_scheme(cfg, SplitScheme::record_wise);
  auto units = lineage_units(m);
  for (std::size_t c = 0; c < units.size(); ++c) {
    if (units[c].size() < static_cast<std::size_t>(cfg.k)) {
      throw Error(Errc::insufficient_records, "class '" + m.classes()[c] + "' has " +
                                                  std::to_string(units[c].size()) + " source records, fewer than k=" +
                                                  std::to_string(cfg.k));
    }
  }
  shuffle_per_class(units, m, cfg.seed);
  return assemble(m, cfg, deal_round_robin(std::move(units), cfg.k), ValidationMode::per_class_quota);
}

FoldPlan split_late_wise(const DatasetManifest& m, const SplitConfig& cfg) {
  require_scheme(cfg, SplitScheme::late_wise);
  if (!m.has_lineage() && !cfg.allow_degenerate_late) {
    throw Error(Errc::degenerate_late_split,
                "manifest has no augmentation lineage; a late split would equal a record split");
  }
  if (m.size() < static_cast<std::size_t>(cfg.k)) {
    throw Error(Errc::invalid_config, "k exceeds the number of records");
  }
  UnitsByClass units(m.classes().size());
  for (auto& [root, ids] : m.lineage_groups()) {
    std::vector<const RecordEntry*> members;
    for (const auto& id : ids) members.push_back(&m.at(id));
    std::stable_sort(members.begin() + 1, members.end(), [](const RecordEntry* a, const RecordEntry* b) {
      const auto& ta = a->transform_tag.value_or("");
      const auto& tb = b->transform_tag.value_or("");
      return ta != tb ? ta < tb : a->record_id < b->record_id;
    });
    auto c = m.class_index(members.front()->class_label);
    for (const RecordEntry* r : members) units[c].push_back({r->record_id, c, {r->record_id}});
  }
  return assemble(m, cfg, deal_round_robin(std::move(units), cfg.k), ValidationMode::per_class_quota);
}

FoldPlan make_plan(const DatasetManifest& m, const SplitConfig& cfg) {
  switch (cfg.scheme) {
    case SplitScheme::subject_wise: return split_subject_wise(m, cfg);
    case SplitScheme::record_wise: return split_record_wise(m, cfg);
    case SplitScheme::late_wise: return split_late_wise(m, cfg);
  }
  throw Error(Errc::invalid_config, "unknown scheme");
}

const FoldRoles& derive_train_val_test(const FoldPlan& plan, int fold) {
  if (fold < 0 || fold >= plan.k || static_cast<std::size_t>(fold) >= plan.roles.size()) {
    throw Error(Errc::fold_out_of_range,
                "fold " + std::to_string(fold) + " is outside [0, " + std::to_string(plan.k) + ")");
  }
  return plan.roles[static_cast<std::size_t>(fold)];
}

}  // namespace splitguard
