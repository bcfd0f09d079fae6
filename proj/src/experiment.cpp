#include "splitguard/errors.hpp"
#include "splitguard/evalsim.hpp"

namespace splitguard {

namespace {

std::vector<const RecordEntry*> lookup(const DatasetManifest& m, const std::vector<std::string>& ids) {
  std::vector<const RecordEntry*> out;
  out.reserve(ids.size());
  for (const auto& id : ids) out.push_back(&m.at(id));
  return out;
}

MetricSet evaluate(const OracleModel& model, std::span<const RecordEntry* const> records,
                   std::span<const std::string> classes) {
  std::vector<std::string> predicted, truth;
  predicted.reserve(records.size());
  truth.reserve(records.size());
  for (const RecordEntry* r : records) {
    if (!r->features) throw Error(Errc::dimension_mismatch, "record '" + r->record_id + "' has no features");
    predicted.push_back(model.predict(*r->features));
    truth.push_back(r->class_label);
  }
  return compute_metrics(predicted, truth, classes);
}

}  // namespace

CvResult run_cv(const DatasetManifest& m, const SplitConfig& cfg, OracleKind kind) {
  const FoldPlan plan = make_plan(m, cfg);
  CvResult result;
  result.scheme = cfg.scheme;
  result.classes = m.classes();
  for (int f = 0; f < plan.k; ++f) {
    const auto& roles = derive_train_val_test(plan, f);
    auto train = lookup(m, roles.train);
    auto test = lookup(m, roles.test);
    result.models.push_back(fit(kind, train, m.classes()));
    result.per_fold.push_back(evaluate(result.models.back(), test, m.classes()));
  }
  result.mean = mean_of(result.per_fold);
  result.sd = sd_of(result.per_fold);
  return result;
}

HoldoutResult run_holdout(const CvResult& cv, const DatasetManifest& holdout) {
  if (holdout.classes() != cv.classes) throw Error(Errc::class_mismatch, "hold-out classes differ from training classes");
  std::vector<const RecordEntry*> records;
  for (const auto& r : holdout.records()) records.push_back(&r);
  HoldoutResult result;
  for (const auto& model : cv.models) {
    if (!holdout.feature_dim() || *holdout.feature_dim() != model.dim()) {
      throw Error(Errc::dimension_mismatch, "hold-out feature dimension differs from the trained models");
    }
    result.per_model.push_back(evaluate(model, records, cv.classes));
  }
  result.mean = mean_of(result.per_model);
  result.sd = sd_of(result.per_model);
  return result;
}

ExperimentReport run_experiment(const DatasetManifest& train, const DatasetManifest& holdout, const SplitConfig& base,
                                OracleKind kind, std::span<const SplitScheme> schemes) {
  ExperimentReport report;
  report.oracle = kind;
  report.k = base.k;
  report.seed = base.seed;
  report.val_fraction_of_total = base.val_fraction_of_total;

  std::vector<CvResult> cvs;
  std::vector<std::vector<double>> holdout_acc;
  for (SplitScheme scheme : schemes) {
    SplitConfig cfg = base;
    cfg.scheme = scheme;
    SchemeOutcome outcome;
    outcome.cv = run_cv(train, cfg, kind);
    outcome.holdout = run_holdout(outcome.cv, holdout);
    outcome.leakage_gap = outcome.cv.mean.accuracy - outcome.holdout.mean.accuracy;
    std::vector<double> acc;
    for (const auto& m : outcome.holdout.per_model) acc.push_back(m.accuracy);
    holdout_acc.push_back(std::move(acc));
    report.schemes.push_back(std::move(outcome));
  }
  for (const auto& s : report.schemes) cvs.push_back(s.cv);
  if (cvs.size() >= 2 && base.k >= 2) {
    report.comparison = compare_schemes(cvs);
    report.holdout_comparison = oneway_anova(holdout_acc);
  }
  return report;
}

ExperimentReport simulate_seed(const SynthConfig& synth, std::uint64_t seed, OracleKind kind, int k,
                               double val_fraction) {
  SynthConfig cfg = synth;
  cfg.seed = seed;
  const auto cohort = augment_records(generate_cohort(cfg), cfg);
  const auto holdout = generate_holdout_cohort(cfg);
  SplitConfig split;
  split.k = k;
  split.seed = seed;
  split.val_fraction_of_total = val_fraction;
  return run_experiment(cohort, holdout, split, kind);
}

Simulation simulate(const SynthConfig& synth, std::span<const std::uint64_t> seeds, OracleKind kind, int k,
                    double val_fraction) {
  Simulation sim;
  sim.synth = synth;
  sim.oracle = kind;
  sim.k = k;
  sim.val_fraction_of_total = val_fraction;
  for (auto seed : seeds) sim.runs.push_back({seed, simulate_seed(synth, seed, kind, k, val_fraction)});
  return sim;
}

}  // namespace splitguard
