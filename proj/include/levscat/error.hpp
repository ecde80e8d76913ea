#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace levscat {

enum class ErrorKind {
  PositivityViolation,
  UnsupportedAngular,
  InvalidSpec,
  DomainError,
  PoleError,
  StiffnessFailure,
  IllConditioned,
  NoBracket,
  NotResonant,
  BranchError,
  NoConvergence,
  UnresolvedBranch,
  TruncationTooCoarse,
  PoorFit,
  OddDimension,
  ScenarioError,
};

std::string_view to_string(ErrorKind kind) noexcept;

/// Every failure raised by the toolkit carries a kind so callers (CLI, Python)
/// can map it to a stable name without parsing messages.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace levscat
