#include "engage/error.hpp"

namespace engage {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::malformed_doi: return "MalformedDoi";
    case ErrorCode::malformed_input: return "MalformedInput";
    case ErrorCode::source_unavailable: return "SourceUnavailable";
    case ErrorCode::auth_failure: return "AuthFailure";
    case ErrorCode::partial_page: return "PartialPage";
    case ErrorCode::duplicate_key: return "DuplicateKey";
    case ErrorCode::io_failure: return "IoFailure";
    case ErrorCode::not_found: return "NotFound";
    case ErrorCode::corrupt_record: return "CorruptRecord";
    case ErrorCode::empty_vector: return "EmptyVector";
    case ErrorCode::degenerate_vector: return "DegenerateVector";
    case ErrorCode::insufficient_points: return "InsufficientPoints";
    case ErrorCode::redirect_loop: return "RedirectLoop";
  }
  return "Unknown";
}

CorruptRecord::CorruptRecord(const std::string& file, std::size_t line_no)
    : Error(ErrorCode::corrupt_record,
            file + ": corrupt record at line " + std::to_string(line_no)),
      line_no_(line_no) {}

}  // namespace engage
