#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace rfclt {

enum class ErrorKind {
  InvalidShape,
  InvalidKernel,
  UnsupportedModel,
  InvalidDensity,
  MissingInnovation,
  InvalidPairing,
  InsufficientData,
  InvalidPlan,
  NonGenericFrequency,
  Config,
  Io,
};

std::string_view to_string(ErrorKind kind);

/// Library-wide exception; `kind()` lets callers (the CLI in particular) map
/// failures onto exit codes without parsing messages.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(message), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace rfclt
