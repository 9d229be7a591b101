#include <iomanip>
#include <iostream>

#include "pfs/validation.hpp"

int main() {
  bool ok = true;
  for (const auto& r : pfs::run_checks(pfs::all_check_ids())) {
    std::cout << "criterion " << std::setw(2) << r.id << " " << (r.pass ? "PASS" : "FAIL") << "  "
              << r.name << ": " << r.detail << " [" << std::fixed << std::setprecision(1) << r.seconds
              << " s]" << std::endl;
    std::cout.unsetf(std::ios::fixed);
    ok = ok && r.pass;
  }
  return ok ? 0 : 1;
}
