#ifndef VALTREE_SELFTEST_HPP
#define VALTREE_SELFTEST_HPP

#include <string>
#include <vector>

namespace valtree::selftest {

struct CheckResult {
  std::string id;
  std::string description;
  bool pass = false;
  std::string detail;
};

// Runs the full acceptance suite; results come back in criterion order
// regardless of the number of worker threads.
std::vector<CheckResult> run_all(int jobs = 1);

std::string format_table(const std::vector<CheckResult>& results);

}  // namespace valtree::selftest

#endif
