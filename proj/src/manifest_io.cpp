#include "splitguard/manifest_io.hpp"

#include <array>
#include <charconv>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include <json.hpp>

#include "splitguard/errors.hpp"

namespace splitguard {

namespace {

using nlohmann::json;

constexpr std::array<std::string_view, 7> kColumns = {
    "record_id", "subject_id", "visit_index", "class_label", "source_record_id", "transform_tag", "features"};
constexpr std::string_view kClassesPrefix = "# classes:";

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

std::uint32_t parse_visit(std::string_view text, std::size_t row) {
  text = trim(text);
  std::uint32_t v = 0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (text.empty() || ec != std::errc() || ptr != text.data() + text.size()) {
    throw ParseError(row, "visit_index '" + std::string(text) + "' is not a non-negative integer");
  }
  return v;
}

double parse_double(std::string_view text, std::size_t row) {
  text = trim(text);
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (text.empty() || ec != std::errc() || ptr != text.data() + text.size()) {
    throw ParseError(row, "feature value '" + std::string(text) + "' is not a number");
  }
  return v;
}

std::vector<double> parse_features(std::string_view text, std::size_t row) {
  std::vector<double> out;
  std::size_t start = 0;
  while (true) {
    auto pos = text.find(';', start);
    out.push_back(parse_double(text.substr(start, pos == std::string_view::npos ? pos : pos - start), row));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

std::vector<std::string> split_list(std::string_view text) {
  std::vector<std::string> out;
  for (const auto& part : split_csv_line(text)) {
    auto t = trim(part);
    if (!t.empty()) out.emplace_back(t);
  }
  return out;
}

DatasetManifest read_csv(std::istream& in) {
  std::string line;
  std::size_t row = 0;
  std::vector<std::string> class_order;

  bool have_header = false;
  std::array<int, kColumns.size()> col{};
  col.fill(-1);
  std::size_t n_header = 0;
  std::vector<RecordEntry> records;

  while (std::getline(in, line)) {
    ++row;
    std::string_view view = trim(line);
    if (view.empty()) continue;
    if (!have_header && view.starts_with(kClassesPrefix)) {
      class_order = split_list(view.substr(kClassesPrefix.size()));
      continue;
    }
    auto cells = split_csv_line(view);
    if (!have_header) {
      for (std::size_t c = 0; c < cells.size(); ++c) {
        for (std::size_t k = 0; k < kColumns.size(); ++k) {
          if (trim(cells[c]) == kColumns[k]) {
            if (col[k] != -1) throw ParseError(row, "duplicate column '" + std::string(kColumns[k]) + "'");
            col[k] = static_cast<int>(c);
          }
        }
      }
      for (std::size_t k = 0; k < 4; ++k) {
        if (col[k] == -1) throw ParseError(row, "missing required column '" + std::string(kColumns[k]) + "'");
      }
      n_header = cells.size();
      have_header = true;
      continue;
    }
    if (cells.size() != n_header) {
      throw ParseError(row, "expected " + std::to_string(n_header) + " cells, found " + std::to_string(cells.size()));
    }
    auto cell = [&](std::size_t k) -> std::string_view {
      return col[k] == -1 ? std::string_view{} : trim(cells[static_cast<std::size_t>(col[k])]);
    };
    RecordEntry r;
    r.record_id = cell(0);
    r.subject_id = cell(1);
    r.visit_index = parse_visit(cell(2), row);
    r.class_label = cell(3);
    if (r.record_id.empty()) throw ParseError(row, "empty record_id");
    if (r.subject_id.empty()) throw ParseError(row, "empty subject_id");
    if (r.class_label.empty()) throw ParseError(row, "empty class_label");
    if (!cell(4).empty()) r.source_record_id = std::string(cell(4));
    if (!cell(5).empty()) r.transform_tag = std::string(cell(5));
    if (!cell(6).empty()) r.features = parse_features(cell(6), row);
    records.push_back(std::move(r));
  }
  if (!have_header) throw ParseError(0, "missing CSV header");
  return DatasetManifest::build(std::move(records), std::move(class_order));
}

std::string required_string(const json& obj, const char* key, std::size_t row) {
  auto it = obj.find(key);
  if (it == obj.end()) throw ParseError(row, std::string("missing field '") + key + "'");
  if (!it->is_string()) throw ParseError(row, std::string("field '") + key + "' must be a string");
  auto s = it->get<std::string>();
  if (s.empty()) throw ParseError(row, std::string("field '") + key + "' is empty");
  return s;
}

std::optional<std::string> optional_string(const json& obj, const char* key, std::size_t row) {
  auto it = obj.find(key);
  if (it == obj.end() || it->is_null()) return std::nullopt;
  if (!it->is_string()) throw ParseError(row, std::string("field '") + key + "' must be a string");
  auto s = it->get<std::string>();
  if (s.empty()) return std::nullopt;
  return s;
}

DatasetManifest read_jsonl(std::istream& in) {
  std::string line;
  std::size_t row = 0;
  std::vector<std::string> class_order;
  std::vector<RecordEntry> records;
  while (std::getline(in, line)) {
    ++row;
    if (trim(line).empty()) continue;
    json obj;
    try {
      obj = json::parse(line);
    } catch (const json::parse_error& e) {
      throw ParseError(row, std::string("invalid JSON: ") + e.what());
    }
    if (!obj.is_object()) throw ParseError(row, "expected a JSON object");
    if (records.empty() && class_order.empty() && obj.contains("classes") && !obj.contains("record_id")) {
      const auto& cls = obj["classes"];
      if (!cls.is_array()) throw ParseError(row, "'classes' must be an array of strings");
      for (const auto& c : cls) {
        if (!c.is_string()) throw ParseError(row, "'classes' must be an array of strings");
        class_order.push_back(c.get<std::string>());
      }
      continue;
    }
    RecordEntry r;
    r.record_id = required_string(obj, "record_id", row);
    r.subject_id = required_string(obj, "subject_id", row);
    r.class_label = required_string(obj, "class_label", row);
    auto visit = obj.find("visit_index");
    if (visit == obj.end()) throw ParseError(row, "missing field 'visit_index'");
    if (!visit->is_number_unsigned() || visit->get<std::uint64_t>() > UINT32_MAX) {
      throw ParseError(row, "visit_index must be a non-negative integer");
    }
    r.visit_index = visit->get<std::uint32_t>();
    r.source_record_id = optional_string(obj, "source_record_id", row);
    r.transform_tag = optional_string(obj, "transform_tag", row);
    if (auto f = obj.find("features"); f != obj.end() && !f->is_null()) {
      if (!f->is_array()) throw ParseError(row, "features must be an array of numbers");
      std::vector<double> values;
      for (const auto& v : *f) {
        if (!v.is_number()) throw ParseError(row, "features must be an array of numbers");
        values.push_back(v.get<double>());
      }
      r.features = std::move(values);
    }
    records.push_back(std::move(r));
  }
  return DatasetManifest::build(std::move(records), std::move(class_order));
}

std::string csv_escape(std::string_view s) {
  if (s.find_first_of(",\"\n\r") == std::string_view::npos) return std::string(s);
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

void write_csv(std::ostream& out, const DatasetManifest& m) {
  if (m.has_explicit_class_order()) {
    out << kClassesPrefix << ' ';
    for (std::size_t i = 0; i < m.classes().size(); ++i) out << (i ? "," : "") << csv_escape(m.classes()[i]);
    out << '\n';
  }
  for (std::size_t k = 0; k < kColumns.size(); ++k) out << (k ? "," : "") << kColumns[k];
  out << '\n';
  for (const auto& r : m.records()) {
    out << csv_escape(r.record_id) << ',' << csv_escape(r.subject_id) << ',' << r.visit_index << ','
        << csv_escape(r.class_label) << ',' << csv_escape(r.source_record_id.value_or("")) << ','
        << csv_escape(r.transform_tag.value_or("")) << ',';
    if (r.features) {
      for (std::size_t i = 0; i < r.features->size(); ++i) out << (i ? ";" : "") << format_double((*r.features)[i]);
    }
    out << '\n';
  }
}

void write_jsonl(std::ostream& out, const DatasetManifest& m) {
  if (m.has_explicit_class_order()) out << json{{"classes", m.classes()}}.dump() << '\n';
  for (const auto& r : m.records()) {
    json obj = {{"record_id", r.record_id},
                {"subject_id", r.subject_id},
                {"visit_index", r.visit_index},
                {"class_label", r.class_label}};
    if (r.source_record_id) obj["source_record_id"] = *r.source_record_id;
    if (r.transform_tag) obj["transform_tag"] = *r.transform_tag;
    if (r.features) obj["features"] = *r.features;
    out << obj.dump() << '\n';
  }
}

}  // namespace

std::string_view format_name(ManifestFormat f) { return f == ManifestFormat::csv ? "csv" : "jsonl"; }

std::optional<ManifestFormat> parse_format(std::string_view name) {
  if (name == "csv") return ManifestFormat::csv;
  if (name == "jsonl" || name == "ndjson") return ManifestFormat::jsonl;
  return std::nullopt;
}

ManifestFormat format_from_path(const std::filesystem::path& path) {
  auto ext = path.extension().string();
  return (ext == ".jsonl" || ext == ".ndjson") ? ManifestFormat::jsonl : ManifestFormat::csv;
}

std::vector<std::string> split_csv_line(std::string_view line) {
  std::vector<std::string> cells(1);
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    char c = line[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < line.size() && line[i + 1] == '"') {
          cells.back() += '"';
          ++i;
        } else {
          quoted = false;
        }
      } else {
        cells.back() += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      cells.emplace_back();
    } else {
      cells.back() += c;
    }
  }
  return cells;
}

std::string format_double(double value) {
  std::array<char, 64> buf{};
  auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), value);
  return std::string(buf.data(), ptr);
}

DatasetManifest read_manifest(std::istream& in, ManifestFormat format) {
  return format == ManifestFormat::csv ? read_csv(in) : read_jsonl(in);
}

DatasetManifest load_manifest(const std::filesystem::path& path, ManifestFormat format) {
  std::ifstream in(path);
  if (!in) throw Error(Errc::io_error, "cannot open manifest '" + path.string() + "'");
  return read_manifest(in, format);
}

void write_manifest(std::ostream& out, const DatasetManifest& m, ManifestFormat format) {
  if (format == ManifestFormat::csv) {
    write_csv(out, m);
  } else {
    write_jsonl(out, m);
  }
}

void save_manifest(const std::filesystem::path& path, const DatasetManifest& m, ManifestFormat format) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(Errc::io_error, "cannot write manifest '" + path.string() + "'");
  write_manifest(out, m, format);
  if (!out) throw Error(Errc::io_error, "failed writing manifest '" + path.string() + "'");
}

}  // namespace splitguard
