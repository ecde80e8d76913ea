#include "levscat/error.hpp"

namespace levscat {

std::string_view to_string(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::PositivityViolation: return "PositivityViolation";
    case ErrorKind::UnsupportedAngular: return "UnsupportedAngular";
    case ErrorKind::InvalidSpec: return "InvalidSpec";
    case ErrorKind::DomainError: return "DomainError";
    case ErrorKind::PoleError: return "PoleError";
    case ErrorKind::StiffnessFailure: return "StiffnessFailure";
    case ErrorKind::IllConditioned: return "IllConditioned";
    case ErrorKind::NoBracket: return "NoBracket";
    case ErrorKind::NotResonant: return "NotResonant";
    case ErrorKind::BranchError: return "BranchError";
    case ErrorKind::NoConvergence: return "NoConvergence";
    case ErrorKind::UnresolvedBranch: return "UnresolvedBranch";
    case ErrorKind::TruncationTooCoarse: return "TruncationTooCoarse";
    case ErrorKind::PoorFit: return "PoorFit";
    case ErrorKind::OddDimension: return "OddDimension";
    case ErrorKind::ScenarioError: return "ScenarioError";
  }
  return "Unknown";
}

}  // namespace levscat
