// Acceptance suite: runs the release criteria and prints one PASS/FAIL line
// per criterion. With --criterion N only that criterion runs.

#include "swabsim/selftest.hpp"

#include <cstring>
#include <iostream>
#include <string>

int main(int argc, char** argv) {
  int criterion = 0;
  std::uint64_t seed = 0;
  bool seed_set = false;
  for (int i = 1; i < argc; ++i) {
    if (std::strcmp(argv[i], "--criterion") == 0 && i + 1 < argc) {
      criterion = std::stoi(argv[++i]);
    } else if (std::strcmp(argv[i], "--seed") == 0 && i + 1 < argc) {
      seed = std::stoull(argv[++i]);
      seed_set = true;
    } else {
      std::cerr << "usage: swabsim_acceptance [--criterion N] [--seed S]\n";
      return 2;
    }
  }

  swabsim::AppConfig cfg;
  if (seed_set) cfg.master_seed = seed;
  swabsim::SelfTest st(cfg);

  if (criterion > 0) {
    const auto res = st.run_criterion(criterion);
    std::cout << (res.pass ? "[PASS] " : "[FAIL] ") << res.id << ": " << res.name << " ("
              << res.detail << ")\n";
    return res.pass ? 0 : 1;
  }
  return st.run_all(std::cout) ? 0 : 1;
}
