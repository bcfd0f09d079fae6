#include "splitguard/report.hpp"

#include <cmath>
#include <cstdio>
#include <map>
#include <sstream>

#include <json.hpp>

#include "splitguard/errors.hpp"
#include "splitguard/plan_io.hpp"

namespace splitguard {

using nlohmann::json;

namespace {

json metric_json(const MetricSet& m) {
  return {{"accuracy", m.accuracy}, {"precision", m.precision}, {"recall", m.recall}, {"f1", m.f1}, {"n_eval", m.n_eval}};
}

json summary_json(const MetricSummary& m) {
  return {{"accuracy", m.accuracy}, {"precision", m.precision}, {"recall", m.recall}, {"f1", m.f1}};
}

json per_fold_json(const std::vector<MetricSet>& sets) {
  json arr = json::array();
  for (const auto& m : sets) arr.push_back(metric_json(m));
  return arr;
}

json comparison_json(const SchemeComparison& c) {
  json j = {{"test_name", c.test_name},
            {"p_value", c.p_value},
            {"df_between", c.df_between},
            {"df_within", c.df_within}};
  // JSON has no infinity.
  if (std::isinf(c.statistic)) {
    j["statistic"] = "inf";
  } else {
    j["statistic"] = c.statistic;
  }
  return j;
}

json metadata_json(OracleKind oracle) {
  return {{"averaging", kAveraging},
          {"sd", kSdKind},
          {"comparison_test", "oneway_anova"},
          {"comparison_groups", "per-fold accuracy by scheme"},
          {"oracle", oracle_name(oracle)}};
}

void fill_experiment(json& j, const ExperimentReport& r) {
  json schemes = json::array();
  for (const auto& s : r.schemes) {
    schemes.push_back({{"scheme", scheme_name(s.cv.scheme)},
                       {"cv", {{"per_fold", per_fold_json(s.cv.per_fold)}, {"mean", summary_json(s.cv.mean)}, {"sd", summary_json(s.cv.sd)}}},
                       {"holdout",
                        {{"per_model", per_fold_json(s.holdout.per_model)},
                         {"mean", summary_json(s.holdout.mean)},
                         {"sd", summary_json(s.holdout.sd)}}},
                       {"leakage_gap", s.leakage_gap}});
  }
  j["schemes"] = std::move(schemes);
  if (r.comparison) j["comparison"] = comparison_json(*r.comparison);
  if (r.holdout_comparison) j["holdout_comparison"] = comparison_json(*r.holdout_comparison);
}

json synth_json(const SynthConfig& c) {
  json mult = json::object();
  for (const auto& label : c.class_labels) mult[label] = c.multiplicity_for(label);
  return {{"n_classes", c.n_classes},
          {"class_labels", c.class_labels},
          {"subjects_per_class", c.subjects_per_class},
          {"holdout_subjects_per_class",
           c.holdout_subjects_per_class.empty() ? c.subjects_per_class : c.holdout_subjects_per_class},
          {"holdout_visit_offset", c.holdout_visit_offset},
          {"visits_per_subject", {c.visits_min, c.visits_max}},
          {"feature_dim", c.feature_dim},
          {"class_signal_scale", c.class_signal_scale},
          {"fingerprint_scale", c.fingerprint_scale},
          {"visit_drift_scale", c.visit_drift_scale},
          {"noise_scale", c.noise_scale},
          {"augment_perturb_scale", c.augment_perturb_scale},
          {"augmentation_multiplicity", mult}};
}

json mean_sd_json(const std::vector<double>& xs) {
  double mu = 0.0, var = 0.0;
  for (double x : xs) mu += x;
  mu /= static_cast<double>(xs.size());
  for (double x : xs) var += (x - mu) * (x - mu);
  return {{"mean", mu}, {"sd", std::sqrt(var / static_cast<double>(xs.size()))}};
}

// ---------------------------------------------------------------------------
// Markdown

std::string display_name(const std::string& scheme) {
  if (scheme == "subject_wise") return "Subject-wise";
  if (scheme == "record_wise") return "Record-wise";
  if (scheme == "late_wise") return "Late-wise";
  return scheme;
}

std::vector<MetricSet> metric_sets(const json& arr) {
  std::vector<MetricSet> out;
  for (const auto& m : arr) {
    out.push_back({m.at("accuracy").get<double>(), m.at("precision").get<double>(), m.at("recall").get<double>(),
                   m.at("f1").get<double>(), m.at("n_eval").get<std::size_t>()});
  }
  return out;
}

std::string metric_row(const std::string& name, const std::vector<MetricSet>& sets) {
  auto mu = mean_of(sets);
  auto sd = sd_of(sets);
  return "| " + name + " | " + format_percent_pm(mu.accuracy, sd.accuracy) + " | " +
         format_percent_pm(mu.precision, sd.precision) + " | " + format_percent_pm(mu.recall, sd.recall) + " | " +
         format_percent_pm(mu.f1, sd.f1) + " |\n";
}

constexpr const char* kMetricHeader =
    "| Scheme | Acc | Prec | Rec | F1-score |\n|---|---|---|---|---|\n";

std::string fixed(double x, int digits) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, x);
  return buf;
}

std::string comparison_line(const json& c, const std::string& what) {
  std::string stat = c.at("statistic").is_string() ? c.at("statistic").get<std::string>()
                                                   : fixed(c.at("statistic").get<double>(), 4);
  return "Scheme comparison on " + what + " (" + c.at("test_name").get<std::string>() + "): F(" +
         std::to_string(c.at("df_between").get<int>()) + ", " + std::to_string(c.at("df_within").get<int>()) +
         ") = " + stat + ", p = " + fixed(c.at("p_value").get<double>(), 4) + "\n";
}

void render_experiment(std::ostringstream& os, const json& j, const std::string& h) {
  os << h << " Cross-validation\n\n" << kMetricHeader;
  for (const auto& s : j.at("schemes")) {
    os << metric_row(display_name(s.at("scheme")), metric_sets(s.at("cv").at("per_fold")));
  }
  os << '\n' << h << " Hold-out\n\n" << kMetricHeader;
  for (const auto& s : j.at("schemes")) {
    os << metric_row(display_name(s.at("scheme")), metric_sets(s.at("holdout").at("per_model")));
  }
  os << '\n' << h << " Leakage gap\n\n| Scheme | CV Acc | Hold-out Acc | Gap |\n|---|---|---|---|\n";
  for (const auto& s : j.at("schemes")) {
    os << "| " << display_name(s.at("scheme")) << " | "
       << fixed(100.0 * s.at("cv").at("mean").at("accuracy").get<double>(), 2) << " | "
       << fixed(100.0 * s.at("holdout").at("mean").at("accuracy").get<double>(), 2) << " | "
       << fixed(100.0 * s.at("leakage_gap").get<double>(), 2) << " |\n";
  }
  if (j.contains("comparison")) os << '\n' << comparison_line(j.at("comparison"), "CV accuracy");
  if (j.contains("holdout_comparison")) os << comparison_line(j.at("holdout_comparison"), "hold-out accuracy");
}

void render_simulation(std::ostringstream& os, const json& j) {
  const auto& runs = j.at("runs");
  os << "# Leakage simulation (oracle " << j.at("metadata").at("oracle").get<std::string>() << ", k="
     << j.at("k").get<int>() << ", " << runs.size() << " seeds)\n\n"
     << "Values are percentages. Accuracy tables pool every fold (CV) or fold model (hold-out) of every seed; "
        "precision, recall and F1 are macro-averaged; sd is the population sd.\n\n";

  std::map<std::string, std::pair<std::vector<MetricSet>, std::vector<MetricSet>>> pooled;
  std::vector<std::string> order;
  for (const auto& run : runs) {
    for (const auto& s : run.at("schemes")) {
      const auto name = s.at("scheme").get<std::string>();
      if (!pooled.contains(name)) order.push_back(name);
      auto cv = metric_sets(s.at("cv").at("per_fold"));
      auto ho = metric_sets(s.at("holdout").at("per_model"));
      auto& [pcv, pho] = pooled[name];
      pcv.insert(pcv.end(), cv.begin(), cv.end());
      pho.insert(pho.end(), ho.begin(), ho.end());
    }
  }
  os << "## Cross-validation, all seeds\n\n" << kMetricHeader;
  for (const auto& name : order) os << metric_row(display_name(name), pooled[name].first);
  os << "\n## Hold-out, all seeds\n\n" << kMetricHeader;
  for (const auto& name : order) os << metric_row(display_name(name), pooled[name].second);

  os << "\n## Leakage gap across seeds\n\n| Scheme | CV Acc | Hold-out Acc | Gap |\n|---|---|---|---|\n";
  for (const auto& s : j.at("summary").at("schemes")) {
    auto cell = [&](const char* key) {
      return format_percent_pm(s.at(key).at("mean").get<double>(), s.at(key).at("sd").get<double>());
    };
    os << "| " << display_name(s.at("scheme")) << " | " << cell("cv_accuracy") << " | " << cell("holdout_accuracy")
       << " | " << cell("leakage_gap") << " |\n";
  }
  if (j.at("summary").contains("comparison_p_below_0_05")) {
    os << "\nCV scheme comparison significant at p < 0.05 in " << j.at("summary").at("comparison_p_below_0_05").get<int>()
       << " of " << runs.size() << " seeds.\n";
  }
  for (const auto& run : runs) {
    os << "\n## Seed " << run.at("seed").get<std::uint64_t>() << "\n\n";
    render_experiment(os, run, "###");
  }
}

}  // namespace

std::string format_percent_pm(double mean, double sd) { return fixed(100.0 * mean, 2) + " ± " + fixed(100.0 * sd, 2); }

std::string experiment_to_json(const ExperimentReport& report) {
  json j = {{"schema_version", kSchemaVersion},
            {"kind", "experiment"},
            {"metadata", metadata_json(report.oracle)},
            {"k", report.k},
            {"seed", report.seed},
            {"val_fraction_of_total", report.val_fraction_of_total}};
  fill_experiment(j, report);
  return j.dump(2) + "\n";
}

std::string simulation_to_json(const Simulation& sim) {
  json runs = json::array();
  std::vector<std::uint64_t> seeds;
  std::map<std::string, std::vector<double>> cv_acc, ho_acc, gap;
  std::vector<std::string> order;
  int significant = 0;
  for (const auto& run : sim.runs) {
    json r = {{"seed", run.seed}};
    fill_experiment(r, run.report);
    runs.push_back(std::move(r));
    seeds.push_back(run.seed);
    for (const auto& s : run.report.schemes) {
      std::string name(scheme_name(s.cv.scheme));
      if (!cv_acc.contains(name)) order.push_back(name);
      cv_acc[name].push_back(s.cv.mean.accuracy);
      ho_acc[name].push_back(s.holdout.mean.accuracy);
      gap[name].push_back(s.leakage_gap);
    }
    if (run.report.comparison && run.report.comparison->p_value < 0.05) ++significant;
  }
  json summary_schemes = json::array();
  for (const auto& name : order) {
    summary_schemes.push_back({{"scheme", name},
                               {"cv_accuracy", mean_sd_json(cv_acc[name])},
                               {"holdout_accuracy", mean_sd_json(ho_acc[name])},
                               {"leakage_gap", mean_sd_json(gap[name])}});
  }
  json j = {{"schema_version", kSchemaVersion},
            {"kind", "simulation"},
            {"metadata", metadata_json(sim.oracle)},
            {"k", sim.k},
            {"val_fraction_of_total", sim.val_fraction_of_total},
            {"synth_config", synth_json(sim.synth)},
            {"seeds", seeds},
            {"runs", runs},
            {"summary", {{"schemes", summary_schemes}, {"comparison_p_below_0_05", significant}}}};
  return j.dump(2) + "\n";
}

std::string render_markdown(std::string_view json_text) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ParseError(0, std::string("invalid report JSON: ") + e.what());
  }
  std::ostringstream os;
  try {
    const auto kind = j.at("kind").get<std::string>();
    if (kind == "simulation") {
      render_simulation(os, j);
    } else if (kind == "experiment") {
      os << "# Leakage experiment (oracle " << j.at("metadata").at("oracle").get<std::string>() << ", k="
         << j.at("k").get<int>() << ", seed " << j.at("seed").get<std::uint64_t>() << ")\n\n"
         << "Values are percentages, mean ± sd across folds (CV) or fold models (hold-out); precision, recall and "
            "F1 are macro-averaged.\n\n";
      render_experiment(os, j, "##");
    } else {
      throw ParseError(0, "unknown report kind '" + kind + "'");
    }
  } catch (const json::exception& e) {
    throw ParseError(0, std::string("malformed report JSON: ") + e.what());
  }
  return os.str();
}

}  // namespace splitguard
