#pragma once

#include <stdexcept>
#include <string>

namespace svito {

/// Operands that cannot interact: dimension, variant or direction-grid mismatch,
/// misaligned windows, malformed set data.
class StructuralError : public std::invalid_argument {
 public:
  explicit StructuralError(const std::string& what) : std::invalid_argument(what) {}
};

/// A well-formed request the chosen representation cannot serve
/// (e.g. negative scaling on an asymmetric direction grid).
class UnsupportedOperation : public std::logic_error {
 public:
  explicit UnsupportedOperation(const std::string& what) : std::logic_error(what) {}
};

/// A numerical precondition failed at run time (nonexistent Hukuhara difference
/// where one is required, violated martingale property, ...).
class DiagnosticFailure : public std::runtime_error {
 public:
  explicit DiagnosticFailure(const std::string& what) : std::runtime_error(what) {}
};

/// Invalid user input: config fields, CLI flags, literals.
class UsageError : public std::invalid_argument {
 public:
  explicit UsageError(const std::string& what) : std::invalid_argument(what) {}
};

}  // namespace svito
