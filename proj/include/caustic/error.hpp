#pragma once

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace caustic {

enum class ErrorKind {
  // parsing and evaluation
  Syntax,
  Arity,
  UnknownIdentifier,
  UnknownFunction,
  Domain,
  // jet arithmetic
  OrderMismatch,
  BasePointMismatch,
  InsufficientOrder,
  JetDivisionByZero,
  JetSqrtNonPositive,
  // surface geometry
  RankDeficient,
  UmbilicPoint,
  NotCurvatureLine,
  // singularities
  InvalidArgument,
  NotSingular,
  RankZero,
  ParabolicPoint,
  NotCuspidalEdge,
  Kappa2Nonzero,
  HypothesisFailure,
  // tracing
  DegenerateSeed,
  StepFailure,
  // germ order
  Undecidable,
  // io
  Io,
};

inline std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::Syntax: return "Syntax";
    case ErrorKind::Arity: return "Arity";
    case ErrorKind::UnknownIdentifier: return "UnknownIdentifier";
    case ErrorKind::UnknownFunction: return "UnknownFunction";
    case ErrorKind::Domain: return "Domain";
    case ErrorKind::OrderMismatch: return "OrderMismatch";
    case ErrorKind::BasePointMismatch: return "BasePointMismatch";
    case ErrorKind::InsufficientOrder: return "InsufficientOrder";
    case ErrorKind::JetDivisionByZero: return "JetDivisionByZero";
    case ErrorKind::JetSqrtNonPositive: return "JetSqrtNonPositive";
    case ErrorKind::RankDeficient: return "RankDeficient";
    case ErrorKind::UmbilicPoint: return "UmbilicPoint";
    case ErrorKind::NotCurvatureLine: return "NotCurvatureLine";
    case ErrorKind::InvalidArgument: return "InvalidArgument";
    case ErrorKind::NotSingular: return "NotSingular";
    case ErrorKind::RankZero: return "RankZero";
    case ErrorKind::ParabolicPoint: return "ParabolicPoint";
    case ErrorKind::NotCuspidalEdge: return "NotCuspidalEdge";
    case ErrorKind::Kappa2Nonzero: return "Kappa2Nonzero";
    case ErrorKind::HypothesisFailure: return "HypothesisFailure";
    case ErrorKind::DegenerateSeed: return "DegenerateSeed";
    case ErrorKind::StepFailure: return "StepFailure";
    case ErrorKind::Undecidable: return "Undecidable";
    case ErrorKind::Io: return "Io";
  }
  return "Unknown";
}

/// Every failure raised by the library. `kind()` is stable and meant for
/// programmatic dispatch; `what()` is for humans.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message,
        std::optional<std::size_t> position = std::nullopt)
      : std::runtime_error(std::string(to_string(kind)) + ": " + message),
        kind_(kind),
        position_(position) {}

  ErrorKind kind() const noexcept { return kind_; }

  /// Character offset into the parsed text (syntax errors only).
  std::optional<std::size_t> position() const noexcept { return position_; }

 private:
  ErrorKind kind_;
  std::optional<std::size_t> position_;
};

}  // namespace caustic
