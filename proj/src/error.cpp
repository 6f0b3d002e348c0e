#include "vizcomp/error.hpp"

namespace vizcomp {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::KindIsNone: return "kind-is-none";
    case ErrorCode::TableMismatch: return "table-mismatch";
    case ErrorCode::UnknownPart: return "unknown-part";
    case ErrorCode::UnknownItem: return "unknown-item";
    case ErrorCode::InvalidEvent: return "invalid-event";
    case ErrorCode::NotAdmissible: return "not-admissible";
    case ErrorCode::UnmatchedItems: return "unmatched-items";
    case ErrorCode::NotPcp: return "not-pcp";
    case ErrorCode::BadAxisIndex: return "bad-axis-index";
    case ErrorCode::RegionNotActive: return "region-not-active";
    case ErrorCode::SeedUnmatched: return "seed-unmatched";
    case ErrorCode::NoSuchAxis: return "no-such-axis";
    case ErrorCode::WrongTrigger: return "wrong-trigger";
    case ErrorCode::ParseError: return "parse-error";
    case ErrorCode::OrderError: return "order-error";
    case ErrorCode::ValidationError: return "validation-error";
  }
  return "unknown";
}

}  // namespace vizcomp
