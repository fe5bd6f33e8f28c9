#pragma once

#include <string>

namespace visconv {

enum class ConditionMode { strict, advisory };

/// One sufficiency inequality "lhs > rhs" (or ">=" when !strict_inequality),
/// with both sides kept so reports can show the margin.
struct ConditionResult {
  std::string name;
  std::string inequality;
  double lhs = 0.0;
  double rhs = 0.0;
  bool strict_inequality = true;
  bool pass = false;
  std::string note;

  double margin() const { return lhs - rhs; }
};

ConditionResult make_condition(std::string name, std::string inequality, double lhs, double rhs,
                               bool strict_inequality, std::string note = {});

/// Throws ConditionFailure in strict mode when the condition fails.
void enforce(const ConditionResult& c, ConditionMode mode);

}  // namespace visconv
