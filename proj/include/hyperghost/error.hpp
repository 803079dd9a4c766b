#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace hyperghost {

/// Machine-readable failure classes. The CLI prints these verbatim.
enum class ErrorCode {
  invalid_argument,
  degenerate_state,
  not_normalized,
  dimension_mismatch,
  index_mismatch,
  invalid_config,
  parse_error,
  io_error,
  no_report,
};

constexpr std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::invalid_argument: return "invalid_argument";
    case ErrorCode::degenerate_state: return "degenerate_state";
    case ErrorCode::not_normalized: return "not_normalized";
    case ErrorCode::dimension_mismatch: return "dimension_mismatch";
    case ErrorCode::index_mismatch: return "index_mismatch";
    case ErrorCode::invalid_config: return "invalid_config";
    case ErrorCode::parse_error: return "parse_error";
    case ErrorCode::io_error: return "io_error";
    case ErrorCode::no_report: return "no_report";
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

}  // namespace hyperghost
