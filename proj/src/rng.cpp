#include "bshift/rng.hpp"

#include <cmath>
#include <limits>

#include "bshift/error.hpp"

namespace bshift {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::kInvalidConstants: return "invalid-constants";
    case ErrorCode::kNormalizationRequired: return "normalization-required";
    case ErrorCode::kInvalidLabel: return "invalid-label";
    case ErrorCode::kIndexOutOfRange: return "index-out-of-range";
    case ErrorCode::kNoClosedForm: return "no-closed-form";
    case ErrorCode::kDimensionMismatch: return "dimension-mismatch";
    case ErrorCode::kParse: return "parse-error";
    case ErrorCode::kFormat: return "format-error";
    case ErrorCode::kWrongRegime: return "wrong-regime";
    case ErrorCode::kBracket: return "bracket-error";
    case ErrorCode::kConstraintViolation: return "constraint-violation";
    case ErrorCode::kReferenceSolve: return "reference-solve-error";
    case ErrorCode::kMethodMismatch: return "method-mismatch";
    case ErrorCode::kInvalidArgument: return "invalid-argument";
    case ErrorCode::kIo: return "io-error";
  }
  return "unknown-error";
}

namespace {

std::mt19937_64 make_engine(std::uint64_t seed, std::uint64_t stream) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(stream >> 32)};
  return std::mt19937_64(seq);
}

}  // namespace

Rng::Rng(std::uint64_t seed, std::uint64_t stream) : engine_(make_engine(seed, stream)) {}

double Rng::uniform01() {
  return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
}

std::size_t Rng::index(std::size_t n) {
  if (n == 0) throw Error(ErrorCode::kInvalidArgument, "index range must be non-empty");
  const std::uint64_t bound = static_cast<std::uint64_t>(n);
  // Largest multiple of `bound` representable; draws above it are rejected.
  const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                              std::numeric_limits<std::uint64_t>::max() % bound;
  std::uint64_t draw = engine_();
  while (draw >= limit) draw = engine_();
  return static_cast<std::size_t>(draw % bound);
}

double Rng::normal() {
  if (has_spare_) {
    has_spare_ = false;
    return spare_;
  }
  double u = 0.0, v = 0.0, s = 0.0;
  do {
    u = 2.0 * uniform01() - 1.0;
    v = 2.0 * uniform01() - 1.0;
    s = u * u + v * v;
  } while (s >= 1.0 || s == 0.0);
  const double factor = std::sqrt(-2.0 * std::log(s) / s);
  spare_ = v * factor;
  has_spare_ = true;
  return u * factor;
}

}  // namespace bshift
