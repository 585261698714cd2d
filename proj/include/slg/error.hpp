#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace slg {

enum class ErrorCode {
  kInvalidSchema,
  kInvalidSentence,
  kEmptyField,
  kMarkTokenNotInVocabulary,
  kDisallowedToken,
  kInvalidVocabulary,
  kGoldFormatInvalid,
  kEmptySet,
  kEmptyDataset,
  kRatioOutOfRange,
  kIdMismatch,
  kInvalidPlan,
  kIngest,
  kIo,
};

std::string_view to_string(ErrorCode code);

// Configuration and input errors. Parse failures of generated text are
// values (see codec.hpp), never exceptions.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace slg
