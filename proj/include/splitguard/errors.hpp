#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <string_view>

namespace splitguard {

enum class Errc {
  // manifest
  io_error,
  parse_error,
  duplicate_record_id,
  dangling_source,
  lineage_too_deep,
  feature_dim_mismatch,
  lineage_disagreement,
  invalid_record,
  // splitter
  invalid_config,
  insufficient_subjects,
  insufficient_records,
  degenerate_late_split,
  fold_out_of_range,
  // auditor
  plan_manifest_mismatch,
  // synth
  already_augmented,
  // evalsim
  empty_training_set,
  missing_class,
  dimension_mismatch,
  class_mismatch,
  length_mismatch,
  empty_input,
  insufficient_groups,
};

std::string_view errc_name(Errc code);

class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& what) : std::runtime_error(what), code_(code) {}

  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

/// Malformed input at a known 1-based row (0 when the row is not meaningful).
class ParseError : public Error {
 public:
  ParseError(std::size_t row, const std::string& what)
      : Error(Errc::parse_error, row ? "row " + std::to_string(row) + ": " + what : what), row_(row) {}

  std::size_t row() const noexcept { return row_; }

 private:
  std::size_t row_;
};

/// True for the manifest-validation family of error codes.
bool is_validation_error(Errc code);

}  // namespace splitguard
