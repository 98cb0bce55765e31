#pragma once

#include <stdexcept>
#include <string>

namespace loopharm {

enum class ErrorKind {
  BandOverflow,
  NonConvergent,
  ZeroArgument,
  ParamMismatch,
  SingularMetric,
  InvalidAlgebra,
  NonCommuting,
  GridTooSmall,
  SingularityTooClose,
  InvalidArgument,
};

inline const char* to_string(ErrorKind kind) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

  /// Numerical failures (as opposed to bad input) map to CLI exit code 3.
  bool is_numerical() const noexcept {
    return kind_ == ErrorKind::BandOverflow || kind_ == ErrorKind::NonConvergent ||
           kind_ == ErrorKind::SingularityTooClose;
  }

 private:
  ErrorKind kind_;
};

inline const char* to_string(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::BandOverflow: return "BandOverflow";
    case ErrorKind::NonConvergent: return "NonConvergent";
    case ErrorKind::ZeroArgument: return "ZeroArgument";
    case ErrorKind::ParamMismatch: return "ParamMismatch";
    case ErrorKind::SingularMetric: return "SingularMetric";
    case ErrorKind::InvalidAlgebra: return "InvalidAlgebra";
    case ErrorKind::NonCommuting: return "NonCommuting";
    case ErrorKind::GridTooSmall: return "GridTooSmall";
    case ErrorKind::SingularityTooClose: return "SingularityTooClose";
    case ErrorKind::InvalidArgument: return "InvalidArgument";
  }
  return "Unknown";
}

}  // namespace loopharm
