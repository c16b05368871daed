#pragma once

#include <array>
#include <optional>
#include <string>
#include <vector>

namespace swabsim {

inline constexpr double kBonferroniCritical = 0.05 / 4.0;  // four tests per measure

struct AnovaRow {
  std::array<std::string, 4> factors;
  double value = 0.0;
};

struct FactorTest {
  std::string factor;
  double statistic = 0.0;  // F or chi-square
  double p = 1.0;
  int df1 = 0;
  int df2 = 0;       // residual df (ANOVA only)
  bool excluded = false;  // factor had fewer than two levels
};

/// Main-effects four-way ANOVA on dummy-coded categorical factors with
/// Type-II sums of squares (each factor tested against the full main-effects
/// model), which handles the unbalanced left/right repeat counts. Factors
/// with a single level are excluded. Returns one test per factor, in factor
/// order.
std::vector<FactorTest> anova4(const std::vector<AnovaRow>& data,
                               const std::array<std::string, 4>& factor_names);

struct Chi2Result {
  double chi2 = 0.0;
  double p = 1.0;
  int dof = 0;
};

/// Pearson chi-square test of independence on a contingency table.
/// Throws std::invalid_argument for tables with a zero row or column margin.
Chi2Result chi2_independence(const std::vector<std::vector<double>>& table);

/// Upper-tail p-value helpers (regularised incomplete beta / gamma forms).
double f_distribution_sf(double f_stat, int df1, int df2);
double chi2_distribution_sf(double x, int dof);

}  // namespace swabsim
