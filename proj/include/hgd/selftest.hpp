#pragma once

#include <string>
#include <vector>

#include "hgd/descriptor.hpp"

namespace hgd {

struct SuiteResult {
  std::string name;
  bool passed = false;
  std::string detail;
};

// Desk-scale invariant checks for every module. The descriptor config is
// injectable so a broken setting (eps0 = 0) shows up as a failed suite.
std::vector<SuiteResult> run_selftest(const DescriptorConfig& config = {});

}  // namespace hgd
