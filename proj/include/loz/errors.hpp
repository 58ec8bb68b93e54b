// Shared error taxonomy. Library code throws LozError with a stable code;
// the CLI maps domain-type codes to exit 3 and budget-type codes to exit 4.
#pragma once

#include <stdexcept>
#include <string>

namespace loz {

enum class ErrCode {
  NotStrictlyDecreasing,
  ShapeMismatch,
  CapExceeded,
  InconsistentOrdering,
  LevelOutOfRange,
  PoleHit,
  CertificationFailed,
  DegenerateIdentical,
  InversionFailed,
  NotLiquid,
  TooCloseToEdge,
  OnSupport,
  DensityOutOfRange,
  BudgetExceeded,
  EntryOutOfRange,
};

const char* err_name(ErrCode code);

// True for codes that mean "the requested computation is too large", as
// opposed to "the input is invalid".
bool is_budget_error(ErrCode code);

class LozError : public std::runtime_error {
 public:
  LozError(ErrCode code, const std::string& msg, long long index = -1)
      : std::runtime_error(std::string(err_name(code)) + ": " + msg),
        code(code),
        index(index) {}

  ErrCode code;
  long long index;  // first offending position, or a size, where meaningful
};

}  // namespace loz
