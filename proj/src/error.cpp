#include "mpis/error.hpp"

namespace mpis {

const char* errorKindName(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::DimensionMismatch: return "DimensionMismatch";
    case ErrorKind::ValueOutOfRange: return "ValueOutOfRange";
    case ErrorKind::NonFinite: return "NonFinite";
    case ErrorKind::ZeroDimension: return "ZeroDimension";
    case ErrorKind::BadRange: return "BadRange";
    case ErrorKind::SingularIntrinsics: return "SingularIntrinsics";
    case ErrorKind::NegativeSigma: return "NegativeSigma";
    case ErrorKind::BadFactor: return "BadFactor";
    case ErrorKind::MissingTensor: return "MissingTensor";
    case ErrorKind::ShapeMismatch: return "ShapeMismatch";
    case ErrorKind::CorruptManifest: return "CorruptManifest";
    case ErrorKind::CorruptArchive: return "CorruptArchive";
    case ErrorKind::ListMismatch: return "ListMismatch";
    case ErrorKind::IoError: return "IoError";
  }
  return "Unknown";
}

}  // namespace mpis
