#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace bshift {

enum class ErrorCode {
  kInvalidConstants,
  kNormalizationRequired,
  kInvalidLabel,
  kIndexOutOfRange,
  kNoClosedForm,
  kDimensionMismatch,
  kParse,
  kFormat,
  kWrongRegime,
  kBracket,
  kConstraintViolation,
  kReferenceSolve,
  kMethodMismatch,
  kInvalidArgument,
  kIo,
};

std::string_view to_string(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace bshift
