#include "commands.hpp"

#include <charconv>
#include <filesystem>
#include <ostream>

#include <CLI11.hpp>

#include "splitguard/auditor.hpp"
#include "splitguard/errors.hpp"
#include "splitguard/evalsim.hpp"
#include "splitguard/manifest_io.hpp"
#include "splitguard/plan_io.hpp"
#include "splitguard/report.hpp"
#include "splitguard/splitter.hpp"
#include "splitguard/synth.hpp"

namespace splitguard::cli {

namespace fs = std::filesystem;

namespace {

// Thrown for flag combinations that CLI11 cannot check by itself.
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

int exit_code_for(const Error& e) {
  if (e.code() == Errc::io_error || e.code() == Errc::parse_error || is_validation_error(e.code())) return kIoError;
  if (e.code() == Errc::plan_manifest_mismatch) return kMismatch;
  return kConfigError;
}

ManifestFormat resolve_format(const std::string& flag, const fs::path& path) {
  if (flag.empty()) return format_from_path(path);
  auto f = parse_format(flag);
  if (!f) throw UsageError("unknown format '" + flag + "' (expected csv or jsonl)");
  return *f;
}

DatasetManifest read_manifest_arg(const std::string& path, const std::string& format) {
  return load_manifest(path, resolve_format(format, path));
}

struct SplitArgs {
  std::string scheme;
  int k = 5;
  std::uint64_t seed = 0;
  double val_fraction = 0.10;
  std::string manifest, out, format;
  bool allow_degenerate = false;
};

int cmd_split(const SplitArgs& a, std::ostream& out) {
  auto scheme = parse_scheme(a.scheme);
  if (!scheme) throw UsageError("unknown scheme '" + a.scheme + "' (expected subject, record or late)");
  SplitConfig cfg;
  cfg.k = a.k;
  cfg.seed = a.seed;
  cfg.val_fraction_of_total = a.val_fraction;
  cfg.scheme = *scheme;
  cfg.allow_degenerate_late = a.allow_degenerate;
  validate_config(cfg);

  const auto m = read_manifest_arg(a.manifest, a.format);
  const auto plan = make_plan(m, cfg);
  save_plan(a.out, plan);

  out << scheme_name(plan.scheme) << " plan, k=" << plan.k << ", seed=" << plan.seed << ", " << m.size()
      << " records\n";
  for (int f = 0; f < plan.k; ++f) {
    const auto& r = derive_train_val_test(plan, f);
    out << "fold " << f << ": train " << r.train.size() << "  val " << r.val.size() << "  test " << r.test.size()
        << '\n';
  }
  return kOk;
}

struct AuditArgs {
  std::string manifest, plan, out, holdout, format;
};

int cmd_audit(const AuditArgs& a, std::ostream& out, Terminal term) {
  const auto m = read_manifest_arg(a.manifest, a.format);
  const auto plan = load_plan(a.plan);
  std::optional<DatasetManifest> holdout;
  if (!a.holdout.empty()) holdout = read_manifest_arg(a.holdout, a.format);
  const auto report = audit_plan(m, plan, holdout ? &*holdout : nullptr);
  if (!a.out.empty()) write_text_file(a.out, audit_to_json(report));
  out << audit_to_text(report, term.color);
  return report.verdict == Verdict::clean ? kOk : kLeaky;
}

struct SynthArgs {
  std::string config, out, holdout_out, format;
  std::optional<std::uint64_t> seed;
  bool no_augment = false;
};

fs::path default_holdout_path(const fs::path& out) {
  auto p = out;
  p.replace_filename(out.stem().string() + "_holdout" + out.extension().string());
  return p;
}

int cmd_synth(const SynthArgs& a, std::ostream& out) {
  SynthConfig cfg = a.config.empty() ? SynthConfig{} : load_synth_config(a.config);
  if (a.seed) cfg.seed = *a.seed;
  validate_synth_config(cfg);
  const auto format = resolve_format(a.format, a.out);

  auto cohort = generate_cohort(cfg);
  if (!a.no_augment) cohort = augment_records(cohort, cfg);
  const auto holdout = generate_holdout_cohort(cfg);
  const fs::path holdout_path = a.holdout_out.empty() ? default_holdout_path(a.out) : fs::path(a.holdout_out);

  save_manifest(a.out, cohort, format);
  save_manifest(holdout_path, holdout, format);
  out << "wrote " << cohort.size() << " records (" << cohort.subjects().size() << " subjects) to " << a.out << '\n'
      << "wrote " << holdout.size() << " hold-out records (" << holdout.subjects().size() << " subjects) to "
      << holdout_path.string() << '\n';
  return kOk;
}

struct SimulateArgs {
  std::string synth, seeds, oracle = "knn1", out;
  int k = 5;
  double val_fraction = 0.10;
};

int cmd_simulate(const SimulateArgs& a, std::ostream& out) {
  auto seeds = parse_seed_list(a.seeds);
  if (!seeds) throw UsageError("--seeds must be a non-empty range 'a..b', a list 'a,b,c' or a single seed");
  auto oracle = parse_oracle(a.oracle);
  if (!oracle) throw UsageError("unknown oracle '" + a.oracle + "' (expected knn1 or centroid)");
  SplitConfig probe;
  probe.k = a.k;
  probe.val_fraction_of_total = a.val_fraction;
  validate_config(probe);
  const SynthConfig cfg = a.synth.empty() ? SynthConfig{} : load_synth_config(a.synth);

  const auto sim = simulate(cfg, *seeds, *oracle, a.k, a.val_fraction);
  write_text_file(a.out, simulation_to_json(sim));

  out << "simulated " << sim.runs.size() << " seed(s) with " << oracle_name(*oracle) << ", k=" << a.k << '\n';
  for (const auto& run : sim.runs) {
    out << "seed " << run.seed << ':';
    for (const auto& s : run.report.schemes) {
      out << "  " << scheme_name(s.cv.scheme) << " cv=" << format_double(std::round(s.cv.mean.accuracy * 1e4) / 1e4)
          << " holdout=" << format_double(std::round(s.holdout.mean.accuracy * 1e4) / 1e4);
    }
    out << '\n';
  }
  return kOk;
}

struct ReportArgs {
  std::string input, out;
};

int cmd_report(const ReportArgs& a, std::ostream& out) {
  const auto md = render_markdown(read_text_file(a.input));
  if (a.out.empty()) {
    out << md;
  } else {
    write_text_file(a.out, md);
  }
  return kOk;
}

}  // namespace

std::optional<std::vector<std::uint64_t>> parse_seed_list(std::string_view text) {
  auto number = [](std::string_view s) -> std::optional<std::uint64_t> {
    std::uint64_t v = 0;
    auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (s.empty() || ec != std::errc() || p != s.data() + s.size()) return std::nullopt;
    return v;
  };
  std::vector<std::uint64_t> out;
  if (auto dots = text.find(".."); dots != std::string_view::npos) {
    auto lo = number(text.substr(0, dots));
    auto hi = number(text.substr(dots + 2));
    if (!lo || !hi || *hi < *lo || *hi - *lo >= 100000) return std::nullopt;
    for (auto s = *lo; s <= *hi; ++s) out.push_back(s);
  } else {
    std::size_t start = 0;
    while (start <= text.size()) {
      auto comma = text.find(',', start);
      auto part = text.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start);
      auto v = number(part);
      if (!v) return std::nullopt;
      out.push_back(*v);
      if (comma == std::string_view::npos) break;
      start = comma + 1;
    }
  }
  if (out.empty()) return std::nullopt;
  return out;
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err, Terminal term) {
  CLI::App app{"splitguard: plan and audit cross-validation splits for longitudinal data"};
  app.require_subcommand(1);

  SplitArgs split;
  auto* s = app.add_subcommand("split", "Write a k-fold plan for a manifest");
  s->add_option("--scheme", split.scheme, "subject | record | late")->required();
  s->add_option("--k", split.k, "Number of folds")->capture_default_str();
  s->add_option("--seed", split.seed, "Shuffle seed")->capture_default_str();
  s->add_option("--val-fraction", split.val_fraction, "Validation share of all records")->capture_default_str();
  s->add_option("-m,--manifest", split.manifest, "Input manifest (.csv or .jsonl)")->required();
  s->add_option("-o,--out", split.out, "Output plan JSON")->required();
  s->add_option("--format", split.format, "Manifest format override (csv | jsonl)");
  s->add_flag("--allow-degenerate-late", split.allow_degenerate, "Allow a late split without augmentation lineage");

  AuditArgs audit;
  auto* a = app.add_subcommand("audit", "Check a plan for leakage and balance");
  a->add_option("-m,--manifest", audit.manifest, "Manifest the plan was made from")->required();
  a->add_option("-p,--plan", audit.plan, "Plan JSON")->required();
  a->add_option("-o,--out", audit.out, "Write the report as JSON");
  a->add_option("--holdout", audit.holdout, "Hold-out manifest to check for shared subjects");
  a->add_option("--format", audit.format, "Manifest format override (csv | jsonl)");

  SynthArgs synth;
  auto* y = app.add_subcommand("synth", "Generate a synthetic cohort and a disjoint hold-out cohort");
  y->add_option("-c,--config", synth.config, "Synth config file");
  y->add_option("--seed", synth.seed, "Override the config seed");
  y->add_option("-o,--out", synth.out, "Output manifest")->required();
  y->add_option("--holdout-out", synth.holdout_out, "Hold-out manifest (default: <out>_holdout)");
  y->add_option("--format", synth.format, "csv | jsonl (default: from extension)");
  y->add_flag("--no-augment", synth.no_augment, "Skip augmentation of the training cohort");

  SimulateArgs sim;
  auto* x = app.add_subcommand("simulate", "Run the three-scheme leakage experiment over seeds");
  x->add_option("--synth", sim.synth, "Synth config file (defaults when omitted)");
  x->add_option("--seeds", sim.seeds, "Seeds: a..b, a,b,c or n")->required();
  x->add_option("--oracle", sim.oracle, "knn1 | centroid")->capture_default_str();
  x->add_option("--k", sim.k, "Number of folds")->capture_default_str();
  x->add_option("--val-fraction", sim.val_fraction, "Validation share of all records")->capture_default_str();
  x->add_option("-o,--out", sim.out, "Output report JSON")->required();

  ReportArgs report;
  auto* r = app.add_subcommand("report", "Render a report JSON as markdown tables");
  r->add_option("input", report.input, "Report JSON from simulate")->required();
  r->add_option("-o,--out", report.out, "Write markdown here instead of stdout");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return kConfigError;
  }

  try {
    if (s->parsed()) return cmd_split(split, out);
    if (a->parsed()) return cmd_audit(audit, out, term);
    if (y->parsed()) return cmd_synth(synth, out);
    if (x->parsed()) return cmd_simulate(sim, out);
    if (r->parsed()) return cmd_report(report, out);
  } catch (const UsageError& e) {
    err << "error: " << e.what() << '\n';
    return kConfigError;
  } catch (const Error& e) {
    err << "error: " << errc_name(e.code()) << ": " << e.what() << '\n';
    return exit_code_for(e);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kIoError;
  }
  return kConfigError;
}

}  // namespace splitguard::cli
