#include "facade_bn/error.hpp"

namespace facade_bn {

const char* to_string(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::SchemaMismatch: return "SchemaMismatch";
    case ErrorKind::InvalidLevel: return "InvalidLevel";
    case ErrorKind::MissingValue: return "MissingValue";
    case ErrorKind::UnknownVariable: return "UnknownVariable";
    case ErrorKind::EmptyData: return "EmptyData";
    case ErrorKind::Io: return "Io";
    case ErrorKind::MalformedModelString: return "MalformedModelString";
    case ErrorKind::CycleDetected: return "CycleDetected";
    case ErrorKind::DuplicateArc: return "DuplicateArc";
    case ErrorKind::GenerationExhausted: return "GenerationExhausted";
    case ErrorKind::DomainError: return "DomainError";
    case ErrorKind::ZeroProbabilityEvidence: return "ZeroProbabilityEvidence";
    case ErrorKind::UnsupportedConfiguration: return "UnsupportedConfiguration";
    case ErrorKind::NoData: return "NoData";
    case ErrorKind::ConstantTrace: return "ConstantTrace";
    case ErrorKind::DegenerateChains: return "DegenerateChains";
  }
  return "Unknown";
}

bool is_input_error(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::SchemaMismatch:
    case ErrorKind::InvalidLevel:
    case ErrorKind::MissingValue:
    case ErrorKind::UnknownVariable:
    case ErrorKind::EmptyData:
    case ErrorKind::Io:
    case ErrorKind::MalformedModelString:
    case ErrorKind::NoData:
      return true;
    default:
      return false;
  }
}

}  // namespace facade_bn
