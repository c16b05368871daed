#pragma once

#include "swabsim/config.hpp"
#include "swabsim/matrix.hpp"

#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace swabsim {

struct CriterionResult {
  int id = 0;
  std::string name;
  bool pass = false;
  std::string detail;
};

/// The twelve release criteria: pinned analytic values, independent
/// statistical oracles, scenario-level safety checks, qualitative trend
/// reproduction on the full matrix, and byte-level determinism. Criteria 11
/// and 12 run the full trial matrix with the configured master seed.
class SelfTest {
 public:
  explicit SelfTest(AppConfig cfg);

  /// Run one criterion (1-12).
  CriterionResult run_criterion(int id);

  /// Run all criteria, printing one PASS/FAIL line each to out.
  /// Returns true when every criterion passed.
  bool run_all(std::ostream& out);

  static int criterion_count() { return 12; }

 private:
  const MatrixResult& matrix_once();

  AppConfig cfg_;
  std::optional<MatrixResult> matrix_;
};

}  // namespace swabsim
