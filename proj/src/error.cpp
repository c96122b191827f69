#include "facered/error.hpp"

namespace facered {

std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::DimensionMismatch: return "DimensionMismatch";
    case ErrorKind::NotPsd: return "NotPsd";
    case ErrorKind::NotPd: return "NotPd";
    case ErrorKind::InvalidCertificate: return "InvalidCertificate";
    case ErrorKind::InconsistentRow: return "InconsistentRow";
    case ErrorKind::PartialNotPsd: return "PartialNotPsd";
    case ErrorKind::NotEdm: return "NotEdm";
    case ErrorKind::BadBracket: return "BadBracket";
    case ErrorKind::TooFewAnchors: return "TooFewAnchors";
    case ErrorKind::RankMismatch: return "RankMismatch";
    case ErrorKind::NotPermutation: return "NotPermutation";
    case ErrorKind::ZeroPolynomial: return "ZeroPolynomial";
    case ErrorKind::FaceTooBig: return "FaceTooBig";
    case ErrorKind::IterationLimit: return "IterationLimit";
    case ErrorKind::Parse: return "Parse";
    case ErrorKind::InvalidArgument: return "InvalidArgument";
  }
  return "Unknown";
}

}  // namespace facered
