#include "slg/error.hpp"

namespace slg {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::kInvalidSchema: return "InvalidSchema";
    case ErrorCode::kInvalidSentence: return "InvalidSentence";
    case ErrorCode::kEmptyField: return "EmptyField";
    case ErrorCode::kMarkTokenNotInVocabulary: return "MarkTokenNotInVocabulary";
    case ErrorCode::kDisallowedToken: return "DisallowedToken";
    case ErrorCode::kInvalidVocabulary: return "InvalidVocabulary";
    case ErrorCode::kGoldFormatInvalid: return "GoldFormatInvalid";
    case ErrorCode::kEmptySet: return "EmptySet";
    case ErrorCode::kEmptyDataset: return "EmptyDataset";
    case ErrorCode::kRatioOutOfRange: return "RatioOutOfRange";
    case ErrorCode::kIdMismatch: return "IdMismatch";
    case ErrorCode::kInvalidPlan: return "InvalidPlan";
    case ErrorCode::kIngest: return "Ingest";
    case ErrorCode::kIo: return "Io";
  }
  return "Unknown";
}

}  // namespace slg
