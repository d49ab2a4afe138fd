#include "weylgeom/error.hpp"

namespace weylgeom {

std::string_view errc_name(Errc code) noexcept {
  switch (code) {
    case Errc::UnsupportedType: return "UnsupportedType";
    case Errc::GroupTooLarge: return "GroupTooLarge";
    case Errc::GroupMismatch: return "GroupMismatch";
    case Errc::NotAnIdeal: return "NotAnIdeal";
    case Errc::WrongGroupType: return "WrongGroupType";
    case Errc::SingularInput: return "SingularInput";
    case Errc::NotPositiveDefinite: return "NotPositiveDefinite";
    case Errc::DegenerateSegment: return "DegenerateSegment";
    case Errc::NonRegularDirection: return "NonRegularDirection";
    case Errc::TieError: return "TieError";
    case Errc::NearSingular: return "NearSingular";
    case Errc::AmbiguousRank: return "AmbiguousRank";
    case Errc::NotRegular: return "NotRegular";
    case Errc::BudgetExceeded: return "BudgetExceeded";
    case Errc::StepTooLarge: return "StepTooLarge";
    case Errc::NotAntipodalGenerators: return "NotAntipodalGenerators";
    case Errc::InconsistentBackends: return "InconsistentBackends";
    case Errc::InvalidArgument: return "InvalidArgument";
  }
  return "Error";
}

}  // namespace weylgeom
