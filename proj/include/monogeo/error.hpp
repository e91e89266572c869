#pragma once

#include <stdexcept>
#include <string>

namespace monogeo {

// Base of every error the library throws. `kind()` is a stable machine name
// used by the CLI's JSON error output.
class Error : public std::runtime_error {
 public:
  Error(std::string kind, const std::string& what)
      : std::runtime_error(what), kind_(std::move(kind)) {}
  const std::string& kind() const noexcept { return kind_; }

 private:
  std::string kind_;
};

// Malformed text input (calibration, label, CSV, config).
class FormatError : public Error {
 public:
  explicit FormatError(const std::string& what) : Error("format", what) {}
};

// Precondition violated by the caller.
class ContractError : public Error {
 public:
  explicit ContractError(const std::string& what) : Error("contract", what) {}
};

class BehindCameraError : public Error {
 public:
  explicit BehindCameraError(const std::string& what) : Error("behind_camera", what) {}
};

// A height (or similar denominator) is zero or negative.
class DegenerateError : public Error {
 public:
  explicit DegenerateError(const std::string& what) : Error("degenerate", what) {}
};

class SingularityError : public Error {
 public:
  explicit SingularityError(const std::string& what) : Error("singularity", what) {}
};

class NondifferentiableError : public Error {
 public:
  explicit NondifferentiableError(const std::string& what) : Error("nondifferentiable", what) {}
};

namespace detail {
inline void require(bool ok, const std::string& what) {
  if (!ok) throw ContractError(what);
}
}  // namespace detail

}  // namespace monogeo
