#pragma once

#include "swabsim/measures.hpp"
#include "swabsim/record.hpp"
#include "swabsim/stats.hpp"
#include "swabsim/world.hpp"

#include <map>
#include <string>
#include <vector>

namespace swabsim {

struct MatrixConfig {
  WorldConfig base;               // spec fields are overwritten per trial
  std::uint64_t master_seed = 20240214;
  int workers = 0;                // 0: hardware concurrency
  bool emit_timeseries = false;
  std::string out_dir;            // empty: keep results in memory only
  int left_repeats = 10;
  int right_repeats = 5;
};

struct TrialResult {
  TrialSpec spec;
  Outcome outcome = Outcome::Faulted;
  bool reached = false;
  MeasureSet measures;
  std::string fault;
};

struct StatsReport {
  // continuous measures: factor tests from the four-way ANOVA
  std::map<std::string, std::vector<FactorTest>> anova;
  // measure iv: chi-square of reached vs each factor
  std::map<std::string, Chi2Result> reached_chi2;
  double bonferroni = kBonferroniCritical;

  std::string to_text() const;
};

struct MatrixResult {
  std::vector<TrialResult> trials;
  int fault_count = 0;
  std::uint64_t master_seed = 0;
  int none_trial_count = 0;

  std::string measures_csv() const;
  std::string trials_jsonl() const;
  std::string summary_text() const;
  StatsReport stats() const;

  double success_rate(const std::string& controller) const;
  /// mean of a collection-stage measure per controller; NaN when absent
  double mean_s2_transverse(const std::string& controller) const;
  double mean_oscillation(const std::string& controller, MotionLevel motion) const;
};

/// The full factorial: 6 controllers x {Light, Medium, Heavy} x 2 phantoms x
/// 2 sides with 10 left / 5 right repeats, plus one non-repeated None-motion
/// trial per (controller, phantom, side) cell. Faulted trials are recorded
/// and the matrix continues.
std::vector<TrialSpec> build_matrix_specs(const MatrixConfig& cfg);

MatrixResult run_matrix(const MatrixConfig& cfg);

/// Rebuild a StatsReport from a measures CSV produced by run_matrix.
StatsReport stats_from_csv(const std::string& csv_text);

std::vector<TrialResult> parse_measures_csv(const std::string& csv_text);

}  // namespace swabsim
