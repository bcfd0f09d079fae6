#include "splitguard/plan_io.hpp"

#include <algorithm>
#include <fstream>
#include <iterator>
#include <sstream>

#include <json.hpp>

#include "splitguard/errors.hpp"

namespace splitguard {

using nlohmann::json;

std::string plan_to_json(const FoldPlan& plan) {
  json roles = json::array();
  for (std::size_t f = 0; f < plan.roles.size(); ++f) {
    auto sorted = [](std::vector<std::string> v) {
      std::sort(v.begin(), v.end());
      return v;
    };
    roles.push_back({{"fold", f},
                     {"train", sorted(plan.roles[f].train)},
                     {"val", sorted(plan.roles[f].val)},
                     {"test", sorted(plan.roles[f].test)}});
  }
  json doc = {{"schema_version", kSchemaVersion},
              {"k", plan.k},
              {"scheme", scheme_name(plan.scheme)},
              {"seed", plan.seed},
              {"val_fraction_of_total", plan.val_fraction_of_total},
              {"assignment", plan.assignment},
              {"roles", roles}};
  return doc.dump(2) + "\n";
}

namespace {

std::vector<std::string> id_list(const json& v, const char* what) {
  if (!v.is_array()) throw ParseError(0, std::string("plan field '") + what + "' must be an array");
  std::vector<std::string> out;
  for (const auto& e : v) {
    if (!e.is_string()) throw ParseError(0, std::string("plan field '") + what + "' must hold strings");
    out.push_back(e.get<std::string>());
  }
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace

FoldPlan plan_from_json(std::string_view text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ParseError(0, std::string("invalid plan JSON: ") + e.what());
  }
  try {
    FoldPlan plan;
    plan.k = doc.at("k").get<int>();
    auto scheme = parse_scheme(doc.at("scheme").get<std::string>());
    if (!scheme) throw ParseError(0, "unknown scheme in plan");
    plan.scheme = *scheme;
    plan.seed = doc.at("seed").get<std::uint64_t>();
    plan.val_fraction_of_total = doc.value("val_fraction_of_total", 0.0);
    if (plan.k < 1) throw ParseError(0, "plan k must be positive");
    for (const auto& [id, fold] : doc.at("assignment").items()) {
      int f = fold.get<int>();
      if (f < 0 || f >= plan.k) throw ParseError(0, "assignment of '" + id + "' is outside [0, k)");
      plan.assignment.emplace(id, f);
    }
    const auto& roles = doc.at("roles");
    if (!roles.is_array() || roles.size() != static_cast<std::size_t>(plan.k)) {
      throw ParseError(0, "plan must list roles for exactly k folds");
    }
    plan.roles.resize(static_cast<std::size_t>(plan.k));
    for (const auto& entry : roles) {
      int f = entry.at("fold").get<int>();
      if (f < 0 || f >= plan.k) throw ParseError(0, "roles entry has fold outside [0, k)");
      auto& r = plan.roles[static_cast<std::size_t>(f)];
      r.train = id_list(entry.at("train"), "train");
      r.val = id_list(entry.at("val"), "val");
      r.test = id_list(entry.at("test"), "test");
    }
    return plan;
  } catch (const json::exception& e) {
    throw ParseError(0, std::string("malformed plan: ") + e.what());
  }
}

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(Errc::io_error, "cannot open '" + path.string() + "'");
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void write_text_file(const std::filesystem::path& path, std::string_view text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(Errc::io_error, "cannot write '" + path.string() + "'");
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
  if (!out) throw Error(Errc::io_error, "failed writing '" + path.string() + "'");
}

void save_plan(const std::filesystem::path& path, const FoldPlan& plan) { write_text_file(path, plan_to_json(plan)); }

FoldPlan load_plan(const std::filesystem::path& path) { return plan_from_json(read_text_file(path)); }

}  // namespace splitguard
