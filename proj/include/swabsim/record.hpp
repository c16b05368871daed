#pragma once

#include "swabsim/corridor.hpp"
#include "swabsim/head_motion.hpp"
#include "swabsim/observers.hpp"
#include "swabsim/types.hpp"

#include <optional>
#include <string>
#include <vector>

namespace swabsim {

struct TrialSpec {
  std::string controller = "D2.0";
  MotionLevel motion = MotionLevel::None;
  PhantomId phantom = PhantomId::A;
  Side side = Side::Left;
  std::uint64_t seed = 0;
  int repeat_index = 0;

  /// Stable per-trial seed derived from a master seed and the factor levels,
  /// so a trial's randomness does not depend on its position in the matrix.
  std::uint64_t derived_seed(std::uint64_t master_seed) const;

  std::string label() const;
};

enum class Outcome { ReachedNP, Stuck, Overload, Premature, WedgeAbort, Faulted };

const char* outcome_name(Outcome o);

/// One control-step sample of the trial time series.
struct Sample {
  double t = 0.0;
  Pose6 ee;
  Vec3 head_angles{Vec3::Zero()};
  Vec3 force_raw{Vec3::Zero()};       // loadcell, end-effector frame
  Vec3 force_filtered{Vec3::Zero()};  // low-pass state
  double cursor = 0.0;
  double tip_depth = 0.0;
  StageId stage = StageId::Sentry;
};

struct StageTransition {
  StageId stage;
  double t;
};

struct TrialRecord {
  TrialSpec spec;
  std::vector<Sample> series;
  std::vector<StageTransition> transitions;
  std::vector<std::pair<double, std::string>> events;
  Outcome outcome = Outcome::Stuck;
  std::optional<AbortEvent> abort;
  bool reached = false;             // nasopharynx reached (measure iv)
  double fuzzy_trigger_depth = -1.0;  // ground-truth tip depth at the trigger
  double np_depth = 0.0;
  std::string fault;  // diagnostic dump when the trial faulted

  std::optional<double> stage_entry(StageId s) const;

  /// Summary line without the time series (JSON object, sorted keys).
  std::string to_jsonl() const;

  /// Full plot-ready series as CSV.
  std::string series_to_csv() const;

  /// Byte-stable dump of everything, for determinism checks.
  std::string to_debug_string() const;
};

}  // namespace swabsim
