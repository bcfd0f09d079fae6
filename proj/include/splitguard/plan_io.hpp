#pragma once

#include <filesystem>
#include <string>
#include <string_view>

#include "splitguard/splitter.hpp"

namespace splitguard {

inline constexpr int kSchemaVersion = 1;

/// {schema_version, k, scheme, seed, val_fraction_of_total, assignment, roles}
/// with every id list sorted, so equal plans serialize to equal bytes.
std::string plan_to_json(const FoldPlan& plan);
FoldPlan plan_from_json(std::string_view text);

void save_plan(const std::filesystem::path& path, const FoldPlan& plan);
FoldPlan load_plan(const std::filesystem::path& path);

/// Whole-file helpers shared by the loaders.
std::string read_text_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path, std::string_view text);

}  // namespace splitguard
