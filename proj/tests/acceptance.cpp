// Acceptance suite: runs every criterion and prints one line per result.
#include <iostream>

#include "valtree/selftest.hpp"

int main() {
  auto results = valtree::selftest::run_all(1);
  bool all = true;
  for (auto& r : results) {
    std::cout << "criterion " << r.id << ": " << (r.pass ? "PASS" : "FAIL") << " - "
              << r.description << " [" << r.detail << "]\n";
    all &= r.pass;
  }
  std::cout << (all ? "ACCEPTANCE: all criteria passed" : "ACCEPTANCE: FAILURES PRESENT")
            << std::endl;
  return all ? 0 : 1;
}
