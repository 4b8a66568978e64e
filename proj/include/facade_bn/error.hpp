#pragma once

#include <stdexcept>
#include <string>

namespace facade_bn {

enum class ErrorKind {
  SchemaMismatch,
  InvalidLevel,
  MissingValue,
  UnknownVariable,
  EmptyData,
  Io,
  MalformedModelString,
  CycleDetected,
  DuplicateArc,
  GenerationExhausted,
  DomainError,
  ZeroProbabilityEvidence,
  UnsupportedConfiguration,
  NoData,
  ConstantTrace,
  DegenerateChains,
};

const char* to_string(ErrorKind kind) noexcept;

// Input/data problems map to exit code 2, everything else to 3.
bool is_input_error(ErrorKind kind) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(std::string(to_string(kind)) + ": " + message), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace facade_bn
