#include "visconv/conditions.hpp"

#include <cmath>
#include <sstream>

#include "visconv/errors.hpp"

namespace visconv {

ConditionResult make_condition(std::string name, std::string inequality, double lhs, double rhs,
                               bool strict_inequality, std::string note) {
  ConditionResult c;
  c.name = std::move(name);
  c.inequality = std::move(inequality);
  c.lhs = lhs;
  c.rhs = rhs;
  c.strict_inequality = strict_inequality;
  c.pass = !std::isnan(lhs) && !std::isnan(rhs) && (strict_inequality ? lhs > rhs : lhs >= rhs);
  c.note = std::move(note);
  return c;
}

void enforce(const ConditionResult& c, ConditionMode mode) {
  if (c.pass || mode == ConditionMode::advisory) return;
  std::ostringstream detail;
  detail.precision(6);
  detail << c.inequality << " requires " << c.lhs << (c.strict_inequality ? " > " : " >= ") << c.rhs;
  throw ConditionFailure(c.name, detail.str());
}

}  // namespace visconv
