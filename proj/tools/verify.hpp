#ifndef SRUSK_TOOLS_VERIFY_HPP
#define SRUSK_TOOLS_VERIFY_HPP

#include <string>
#include <vector>

#include "srusk/config.hpp"

namespace srusk {

struct CheckResult {
  std::string name;
  enum class Status { Pass, Fail, Skip } status = Status::Pass;
  std::string detail;
};

// Property checks of every module, run against the configured model.
std::vector<CheckResult> run_verification(const RunConfig& rc);

}  // namespace srusk

#endif
