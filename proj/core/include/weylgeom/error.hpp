#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace weylgeom {

enum class Errc {
  UnsupportedType,
  GroupTooLarge,
  GroupMismatch,
  NotAnIdeal,
  WrongGroupType,
  SingularInput,
  NotPositiveDefinite,
  DegenerateSegment,
  NonRegularDirection,
  TieError,
  NearSingular,
  AmbiguousRank,
  NotRegular,
  BudgetExceeded,
  StepTooLarge,
  NotAntipodalGenerators,
  InconsistentBackends,
  InvalidArgument,
};

std::string_view errc_name(Errc code) noexcept;

// Domain error raised by every module; the CLI serializes kind + message.
class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& what)
      : std::runtime_error(what), code_(code) {}

  Errc code() const noexcept { return code_; }
  std::string_view name() const noexcept { return errc_name(code_); }

 private:
  Errc code_;
};

}  // namespace weylgeom
