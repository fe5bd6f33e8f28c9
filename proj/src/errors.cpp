#include "visconv/errors.hpp"

#include <sstream>
#include <utility>

namespace visconv {

namespace {

std::string cfl_message(double cfl, double limit) {
  std::ostringstream os;
  os << "step rejected: CFL number " << cfl << " exceeds limit " << limit;
  return os.str();
}

std::string degenerate_message(double s, double t, double energy) {
  std::ostringstream os;
  os << "denominator-degenerate: weighted data energy " << energy
     << " vanishes on window [" << s << ", " << t
     << "]; observations carry no information about the viscosity";
  return os.str();
}

}  // namespace

StepRejected::StepRejected(double cfl, double limit)
    : std::runtime_error(cfl_message(cfl, limit)), cfl_(cfl), limit_(limit) {}

ConditionFailure::ConditionFailure(std::string condition, const std::string& detail)
    : std::runtime_error("condition '" + condition + "' failed: " + detail),
      condition_(std::move(condition)) {}

DegenerateData::DegenerateData(double s, double t, double energy)
    : std::runtime_error(degenerate_message(s, t, energy)), s_(s), t_(t) {}

}  // namespace visconv
