#pragma once

#include <stdexcept>
#include <string>

namespace frsf {

struct Error : std::runtime_error {
  explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

struct InvalidParams : Error {
  using Error::Error;
};
struct DomainError : Error {
  using Error::Error;
};
struct DimensionError : Error {
  using Error::Error;
};
struct ZeroField : Error {
  using Error::Error;
};
struct NotAdmissible : Error {
  using Error::Error;
};
struct NotAdmissibleInit : Error {
  using Error::Error;
};
struct EpsilonAboveThreshold : Error {
  using Error::Error;
};
struct ResampleOverflow : Error {
  using Error::Error;
};
struct ResolutionError : Error {
  using Error::Error;
};
struct WrongRegime : Error {
  using Error::Error;
};
struct InsufficientTail : Error {
  using Error::Error;
};
struct NotSolvable : Error {
  using Error::Error;
};
struct DegenerateFit : Error {
  using Error::Error;
};
struct FitSkipped : Error {
  using Error::Error;
};
struct IoError : Error {
  using Error::Error;
};
struct ConfigError : Error {
  using Error::Error;
};

}  // namespace frsf
