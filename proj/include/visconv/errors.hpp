#pragma once

#include <stdexcept>
#include <string>

namespace visconv {

/// Bad argument or precondition on a public operation.
class InvalidArgument : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A time step was refused because the advective CFL number exceeded the limit.
class StepRejected : public std::runtime_error {
 public:
  StepRejected(double cfl, double limit);
  double cfl() const noexcept { return cfl_; }
  double limit() const noexcept { return limit_; }

 private:
  double cfl_;
  double limit_;
};

/// Requested evaluation time is not covered by the recorded data.
class DataRangeError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A sufficiency condition failed while running in strict mode, or an
/// iterate left the admissible viscosity bracket.
class ConditionFailure : public std::runtime_error {
 public:
  ConditionFailure(std::string condition, const std::string& detail);
  const std::string& condition() const noexcept { return condition_; }

 private:
  std::string condition_;
};

/// The weighted data energy on the evaluation window vanishes, so the
/// viscosity update has no denominator and the data carry no information.
class DegenerateData : public std::runtime_error {
 public:
  DegenerateData(double s, double t, double energy);
  double window_begin() const noexcept { return s_; }
  double window_end() const noexcept { return t_; }

 private:
  double s_;
  double t_;
};

/// Malformed trajectory container or config document.
class FormatError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace visconv
