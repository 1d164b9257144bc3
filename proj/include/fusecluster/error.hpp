#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace fusecluster {

enum class ErrorCode {
  io,                  // file could not be opened or read
  empty_input,         // no data rows
  ragged_rows,         // rows with differing field counts
  non_numeric,         // feature field that does not parse as a finite real
  dimension_mismatch,  // operands disagree on d, n or K
  invalid_argument,    // parameter outside its documented domain
  degenerate_cluster,  // centroid with zero total membership weight
  inconclusive,        // model selection found no usable plateau
};

inline std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::io: return "io";
    case ErrorCode::empty_input: return "empty_input";
    case ErrorCode::ragged_rows: return "ragged_rows";
    case ErrorCode::non_numeric: return "non_numeric";
    case ErrorCode::dimension_mismatch: return "dimension_mismatch";
    case ErrorCode::invalid_argument: return "invalid_argument";
    case ErrorCode::degenerate_cluster: return "degenerate_cluster";
    case ErrorCode::inconclusive: return "inconclusive";
  }
  return "unknown";
}

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what) : std::runtime_error(what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

namespace detail {

inline void require(bool ok, ErrorCode code, const std::string& what) {
  if (!ok) throw Error(code, what);
}

}  // namespace detail
}  // namespace fusecluster
