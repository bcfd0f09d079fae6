#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "splitguard/manifest.hpp"

namespace splitguard {

enum class ManifestFormat { csv, jsonl };

std::string_view format_name(ManifestFormat f);
std::optional<ManifestFormat> parse_format(std::string_view name);
/// Guesses the format from the file extension (.jsonl/.ndjson -> jsonl, else csv).
ManifestFormat format_from_path(const std::filesystem::path& path);

/// CSV columns: record_id,subject_id,visit_index,class_label,source_record_id,
/// transform_tag,features. Empty cells mean "absent"; features are a
/// semicolon-joined list. An optional first line `# classes: A,B,C` fixes the
/// class order. JSONL uses the same field names, one object per line, with an
/// optional leading `{"classes": [...]}` line.
DatasetManifest read_manifest(std::istream& in, ManifestFormat format);
DatasetManifest load_manifest(const std::filesystem::path& path, ManifestFormat format);

void write_manifest(std::ostream& out, const DatasetManifest& m, ManifestFormat format);
void save_manifest(const std::filesystem::path& path, const DatasetManifest& m, ManifestFormat format);

/// Shortest decimal text that parses back to exactly `value`.
std::string format_double(double value);

/// Splits one CSV line, honouring double-quoted fields.
std::vector<std::string> split_csv_line(std::string_view line);

}  // namespace splitguard
