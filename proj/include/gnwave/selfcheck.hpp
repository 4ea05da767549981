#ifndef GNWAVE_SELFCHECK_HPP
#define GNWAVE_SELFCHECK_HPP

#include <string>
#include <vector>

namespace gnwave::selfcheck {

struct CheckResult {
  std::string name;
  bool pass = false;
  double measured = 0.0; // the quantity compared against the bound
  double bound = 0.0;
};

// runs the invariant battery at grid size n (n even, >= 32)
std::vector<CheckResult> run(int n);

bool all_passed(const std::vector<CheckResult>& results);

} // namespace gnwave::selfcheck

#endif
