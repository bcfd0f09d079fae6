#include <charconv>
#include <map>
#include <sstream>
#include <variant>

#include "splitguard/errors.hpp"
#include "splitguard/manifest_io.hpp"
#include "splitguard/plan_io.hpp"
#include "splitguard/synth.hpp"

namespace splitguard {

namespace {

using Scalar = std::variant<long long, double, std::string>;
struct Value {
  std::vector<Scalar> items;
  bool is_array = false;
};

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

std::string_view strip_comment(std::string_view line) {
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    if (line[i] == '"') quoted = !quoted;
    if (line[i] == '#' && !quoted) return line.substr(0, i);
  }
  return line;
}

Scalar parse_scalar(std::string_view text, std::size_t row) {
  text = trim(text);
  if (text.size() >= 2 && text.front() == '"' && text.back() == '"') return std::string(text.substr(1, text.size() - 2));
  long long i = 0;
  auto [p1, e1] = std::from_chars(text.data(), text.data() + text.size(), i);
  if (!text.empty() && e1 == std::errc() && p1 == text.data() + text.size()) return i;
  double d = 0;
  auto [p2, e2] = std::from_chars(text.data(), text.data() + text.size(), d);
  if (!text.empty() && e2 == std::errc() && p2 == text.data() + text.size()) return d;
  throw ParseError(row, "cannot parse value '" + std::string(text) + "'");
}

Value parse_value(std::string_view text, std::size_t row) {
  text = trim(text);
  Value v;
  if (!text.empty() && text.front() == '[') {
    if (text.back() != ']') throw ParseError(row, "unterminated array");
    v.is_array = true;
    auto body = trim(text.substr(1, text.size() - 2));
    if (!body.empty()) {
      for (const auto& part : split_csv_line(body)) {
        // split_csv_line drops the quotes; re-quote non-numeric text.
        auto t = trim(part);
        try {
          v.items.push_back(parse_scalar(t, row));
        } catch (const ParseError&) {
          v.items.emplace_back(std::string(t));
        }
      }
    }
  } else {
    v.items.push_back(parse_scalar(text, row));
  }
  return v;
}

long long as_int(const Scalar& s, const std::string& key) {
  if (auto p = std::get_if<long long>(&s)) return *p;
  throw Error(Errc::invalid_config, "'" + key + "' must be an integer");
}

double as_double(const Scalar& s, const std::string& key) {
  if (auto p = std::get_if<long long>(&s)) return static_cast<double>(*p);
  if (auto p = std::get_if<double>(&s)) return *p;
  throw Error(Errc::invalid_config, "'" + key + "' must be a number");
}

std::string as_string(const Scalar& s, const std::string& key) {
  if (auto p = std::get_if<std::string>(&s)) return *p;
  throw Error(Errc::invalid_config, "'" + key + "' must be a string");
}

const Scalar& single(const Value& v, const std::string& key) {
  if (v.is_array || v.items.size() != 1) throw Error(Errc::invalid_config, "'" + key + "' must be a single value");
  return v.items.front();
}

std::vector<int> int_list(const Value& v, const std::string& key) {
  if (!v.is_array) throw Error(Errc::invalid_config, "'" + key + "' must be an array");
  std::vector<int> out;
  for (const auto& s : v.items) out.push_back(static_cast<int>(as_int(s, key)));
  return out;
}

std::vector<std::string> default_labels(int n) {
  if (n == 3) return {"CN", "MCI", "AD"};
  std::vector<std::string> out;
  for (int i = 0; i < n; ++i) out.push_back("C" + std::to_string(i));
  return out;
}

constexpr std::string_view kMultiplicity = "augmentation_multiplicity";

}  // namespace

SynthConfig parse_synth_config(std::string_view text) {
  std::map<std::string, Value> values;
  std::map<std::string, int> multiplicity;
  std::string section;
  std::istringstream in{std::string(text)};
  std::string line;
  std::size_t row = 0;
  while (std::getline(in, line)) {
    ++row;
    auto view = trim(strip_comment(line));
    if (view.empty()) continue;
    if (view.front() == '[') {
      if (view.back() != ']') throw ParseError(row, "malformed section header");
      section = std::string(trim(view.substr(1, view.size() - 2)));
      if (section != kMultiplicity) throw Error(Errc::invalid_config, "unknown section [" + section + "]");
      continue;
    }
    auto eq = view.find('=');
    if (eq == std::string_view::npos) throw ParseError(row, "expected 'key = value'");
    std::string key(trim(view.substr(0, eq)));
    auto value = parse_value(view.substr(eq + 1), row);
    if (key.empty()) throw ParseError(row, "empty key");
    if (key.size() >= 2 && key.front() == '"' && key.back() == '"') key = key.substr(1, key.size() - 2);

    std::string mult_label;
    if (section == kMultiplicity) {
      mult_label = key;
    } else if (key.starts_with(std::string(kMultiplicity) + ".")) {
      mult_label = key.substr(kMultiplicity.size() + 1);
    }
    if (!mult_label.empty()) {
      multiplicity[mult_label] = static_cast<int>(as_int(single(value, key), key));
      continue;
    }
    if (!values.emplace(key, std::move(value)).second) throw ParseError(row, "duplicate key '" + key + "'");
  }

  SynthConfig cfg;
  const bool explicit_n = values.contains("n_classes");
  const bool explicit_counts = values.contains("subjects_per_class");
  if (auto it = values.find("n_classes"); it != values.end()) {
    cfg.n_classes = static_cast<int>(as_int(single(it->second, it->first), it->first));
    if (cfg.n_classes < 2) throw Error(Errc::invalid_config, "n_classes must be at least 2");
    cfg.class_labels = default_labels(cfg.n_classes);
    cfg.subjects_per_class.assign(static_cast<std::size_t>(cfg.n_classes), 30);
    values.erase(it);
  }
  for (auto& [key, v] : values) {
    if (key == "class_labels") {
      if (!v.is_array) throw Error(Errc::invalid_config, "'class_labels' must be an array");
      cfg.class_labels.clear();
      for (const auto& s : v.items) cfg.class_labels.push_back(as_string(s, key));
    } else if (key == "subjects_per_class") {
      cfg.subjects_per_class = int_list(v, key);
    } else if (key == "holdout_subjects_per_class") {
      cfg.holdout_subjects_per_class = int_list(v, key);
    } else if (key == "visits_per_subject") {
      auto range = int_list(v, key);
      if (range.size() != 2) throw Error(Errc::invalid_config, "'visits_per_subject' must be [min, max]");
      cfg.visits_min = range[0];
      cfg.visits_max = range[1];
    } else if (key == "feature_dim") {
      cfg.feature_dim = static_cast<int>(as_int(single(v, key), key));
    } else if (key == "class_signal_scale") {
      cfg.class_signal_scale = as_double(single(v, key), key);
    } else if (key == "fingerprint_scale") {
      cfg.fingerprint_scale = as_double(single(v, key), key);
    } else if (key == "visit_drift_scale") {
      cfg.visit_drift_scale = as_double(single(v, key), key);
    } else if (key == "noise_scale") {
      cfg.noise_scale = as_double(single(v, key), key);
    } else if (key == "augment_perturb_scale") {
      cfg.augment_perturb_scale = as_double(single(v, key), key);
    } else if (key == "holdout_visit_offset") {
      cfg.holdout_visit_offset = static_cast<int>(as_int(single(v, key), key));
    } else if (key == "seed") {
      auto s = as_int(single(v, key), key);
      if (s < 0) throw Error(Errc::invalid_config, "'seed' must be non-negative");
      cfg.seed = static_cast<std::uint64_t>(s);
    } else {
      throw Error(Errc::invalid_config, "unknown key '" + key + "'");
    }
  }
  if (cfg.class_labels.size() != static_cast<std::size_t>(cfg.n_classes)) {
    if (explicit_n) throw Error(Errc::invalid_config, "class_labels must list n_classes labels");
    cfg.n_classes = static_cast<int>(cfg.class_labels.size());
    if (!explicit_counts) cfg.subjects_per_class.assign(cfg.class_labels.size(), 30);
  }
  cfg.augmentation_multiplicity = std::move(multiplicity);
  validate_synth_config(cfg);
  return cfg;
}

SynthConfig load_synth_config(const std::filesystem::path& path) { return parse_synth_config(read_text_file(path)); }

std::string synth_config_to_text(const SynthConfig& cfg) {
  auto list = [](const auto& xs, bool quote) {
    std::string s = "[";
    for (std::size_t i = 0; i < xs.size(); ++i) {
      if (i) s += ", ";
      if constexpr (std::is_same_v<std::decay_t<decltype(xs[0])>, std::string>) {
        s += quote ? "\"" + xs[i] + "\"" : xs[i];
      } else {
        s += std::to_string(xs[i]);
      }
    }
    return s + "]";
  };
  std::ostringstream os;
  os << "n_classes = " << cfg.n_classes << '\n'
     << "class_labels = " << list(cfg.class_labels, true) << '\n'
     << "subjects_per_class = " << list(cfg.subjects_per_class, false) << '\n'
     << "visits_per_subject = [" << cfg.visits_min << ", " << cfg.visits_max << "]\n"
     << "feature_dim = " << cfg.feature_dim << '\n'
     << "class_signal_scale = " << format_double(cfg.class_signal_scale) << '\n'
     << "fingerprint_scale = " << format_double(cfg.fingerprint_scale) << '\n'
     << "visit_drift_scale = " << format_double(cfg.visit_drift_scale) << '\n'
     << "noise_scale = " << format_double(cfg.noise_scale) << '\n'
     << "augment_perturb_scale = " << format_double(cfg.augment_perturb_scale) << '\n'
     << "seed = " << cfg.seed << '\n';
  if (!cfg.holdout_subjects_per_class.empty()) {
    os << "holdout_subjects_per_class = " << list(cfg.holdout_subjects_per_class, false) << '\n';
  }
  os << "holdout_visit_offset = " << cfg.holdout_visit_offset << '\n';
  if (!cfg.augmentation_multiplicity.empty()) {
    os << "\n[augmentation_multiplicity]\n";
    for (const auto& [label, n] : cfg.augmentation_multiplicity) os << label << " = " << n << '\n';
  }
  return os.str();
}

}  // namespace splitguard
