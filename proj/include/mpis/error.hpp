#ifndef MPIS_ERROR_HPP
#define MPIS_ERROR_HPP

#include <stdexcept>
#include <string>

namespace mpis {

enum class ErrorKind {
  DimensionMismatch,
  ValueOutOfRange,
  NonFinite,
  ZeroDimension,
  BadRange,
  SingularIntrinsics,
  NegativeSigma,
  BadFactor,
  MissingTensor,
  ShapeMismatch,
  CorruptManifest,
  CorruptArchive,
  ListMismatch,
  IoError,
};

const char* errorKindName(ErrorKind kind);

/// Library-wide exception type; `kind()` names the violated contract.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(std::string(errorKindName(kind)) + ": " + message),
        kind_(kind) {}

  ErrorKind kind() const { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace mpis

#endif
