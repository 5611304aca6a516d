#pragma once

#include <string>
#include <vector>

namespace vvl {

struct ValidationCheck {
  std::string name;
  double value = 0.0;      // measured worst case
  double tolerance = 0.0;
  bool pass = false;
};

/// Fast oracle and property checks of the library. The strict profile uses more samples.
std::vector<ValidationCheck> run_validation(bool strict);

}  // namespace vvl
