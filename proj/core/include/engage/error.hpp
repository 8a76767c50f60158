#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <string_view>

namespace engage {

enum class ErrorCode {
  malformed_doi,
  malformed_input,
  source_unavailable,
  auth_failure,
  partial_page,
  duplicate_key,
  io_failure,
  not_found,
  corrupt_record,
  empty_vector,
  degenerate_vector,
  insufficient_points,
  redirect_loop,
};

std::string_view to_string(ErrorCode code);

/// Base of every error raised by the toolkit. Batch operations never throw
/// per-item failures; they record them as values instead.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

#define ENGAGE_DEFINE_ERROR(Name, Code)                                  \
  class Name : public Error {                                            \
   public:                                                               \
    explicit Name(const std::string& what) : Error(ErrorCode::Code, what) {} \
  }

ENGAGE_DEFINE_ERROR(MalformedDoi, malformed_doi);
ENGAGE_DEFINE_ERROR(MalformedInput, malformed_input);
ENGAGE_DEFINE_ERROR(SourceUnavailable, source_unavailable);
ENGAGE_DEFINE_ERROR(AuthFailure, auth_failure);
ENGAGE_DEFINE_ERROR(PartialPage, partial_page);
ENGAGE_DEFINE_ERROR(DuplicateKey, duplicate_key);
ENGAGE_DEFINE_ERROR(IoFailure, io_failure);
ENGAGE_DEFINE_ERROR(NotFound, not_found);
ENGAGE_DEFINE_ERROR(EmptyVector, empty_vector);
ENGAGE_DEFINE_ERROR(DegenerateVector, degenerate_vector);
ENGAGE_DEFINE_ERROR(InsufficientPoints, insufficient_points);
ENGAGE_DEFINE_ERROR(RedirectLoop, redirect_loop);

#undef ENGAGE_DEFINE_ERROR

/// A store file has a line that does not parse. `line_no` is 1-based.
class CorruptRecord : public Error {
 public:
  CorruptRecord(const std::string& file, std::size_t line_no);

  std::size_t line_no() const noexcept { return line_no_; }

 private:
  std::size_t line_no_;
};

}  // namespace engage
