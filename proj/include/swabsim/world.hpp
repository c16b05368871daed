#pragma once

#include "swabsim/controller.hpp"
#include "swabsim/corridor.hpp"
#include "swabsim/head_motion.hpp"
#include "swabsim/measures.hpp"
#include "swabsim/observers.hpp"
#include "swabsim/plant.hpp"
#include "swabsim/record.hpp"
#include "swabsim/servo.hpp"
#include "swabsim/trajectory.hpp"

#include <memory>
#include <optional>

namespace swabsim {

/// Test hook: replaces the measured force while the ground-truth tip depth is
/// inside [depth_min, depth_max] during the contact phase.
struct ForceOverride {
  double depth_min = 0.0;
  double depth_max = 0.0;
  Vec3 force_ee{Vec3::Zero()};
};

struct WorldConfig {
  SimConfig sim;
  TrialSpec spec;

  double vision_noise_sigma = 0.001;  // m
  double vision_dropout = 0.05;

  SwabBeam swab;
  AxialContactModel axial;
  ServoGains servo;
  FuzzyParams fuzzy;
  SafetyParams safety;
  CollectSpec collect;
  ControllerConfig controller;  // filled from spec.controller when name empty

  TrajParams traj_left;
  TrajParams traj_right;

  double stage_timeout = 60.0;      // s per stage
  double head_track_gain = 0.5;     // 1/s
  double standoff_distance = 0.10;  // m back from the nostril along the shaft
  double standoff_tilt = 5.0 * M_PI / 180.0;

  // test hooks
  std::optional<ForceOverride> force_override;
  std::optional<double> manual_abort_at;   // s
  std::optional<double> nan_inject_at;     // s

  /// ReachedNP requires the fuzzy trigger within this margin of the wall.
  double reach_margin = 0.010;  // m
};

/// Closed-loop world: head motion, vision, the staged controller, the swab
/// plant and the observers, advanced at the control rate. A trial is a pure
/// function of (config, seed).
class World {
 public:
  explicit World(WorldConfig cfg);

  /// One control step. Update order per step: head motion, vision/estimator,
  /// stage controller, end-effector integration, plant forces, force filters,
  /// observers and stage transitions, then recording.
  void step();

  /// Run to completion (stage Done or the duration limit).
  TrialRecord run();

  // inspection
  double time() const { return t_; }
  StageId stage() const { return stage_; }
  const Pose6& ee_pose() const { return ee_; }
  const Pose6& head_pose() const { return head_pose_; }
  const ForceSample& last_force() const { return last_force_; }
  const ContactResult& last_contact() const { return last_contact_; }
  const PoseEstimate& estimate() const { return estimate_; }
  const NasalCorridor& corridor() const { return corridor_; }
  const WaypointTrack& track() const { return track_; }
  bool swab_attached() const { return attached_; }
  const TrialRecord& record() const { return record_; }
  double cursor() const { return cursor_.l; }

 private:
  void enter_stage(StageId next);
  void release_swab();
  void log_event(const std::string& msg);
  Twist6 stage_command();
  Pose6 approach_target() const;
  Pose6 track_target_world(double l) const;
  Pose6 ee_target_from_tip(const Pose6& tip_target) const;
  Pose6 tip_pose() const;
  /// measured insertion displacement: wrist travel projected on the planned
  /// insertion axis (the observable the contact controllers consume)
  double insertion_displacement() const;
  void classify_outcome();

  WorldConfig cfg_;
  NasalCorridor corridor_;
  HeadFixture fixture_;
  Pose6 nostril_local_;  // nostril frame in the head frame
  WaypointTrack track_;
  std::array<OUParams, 3> ou_;
  RngStream head_rng_;
  RngStream vision_rng_;

  double t_ = 0.0;
  std::uint64_t step_count_ = 0;
  NeckState neck_;
  Pose6 head_pose_;
  Pose6 ee_;
  Pose6 standoff_;
  bool attached_ = true;

  StageId stage_ = StageId::Sentry;
  double stage_entry_t_ = 0.0;
  PoseEstimate estimate_;
  BandpassState bandpass_;
  Vec3 repel_{Vec3::Zero()};
  FilteredForce filtered_;
  TrackCursor cursor_;
  Pose6 anchor_;           // nostril pose estimate frozen at insertion start
  Vec3 insert_start_pos_{Vec3::Zero()};
  Vec3 insert_axis_{Vec3::UnitX()};  // planned insertion direction, world frame
  Pose6 collect_hold_;
  double collect_entry_t_ = 0.0;
  ForceSample last_force_;
  ContactResult last_contact_;
  std::optional<AbortEvent> abort_;
  bool collected_ = false;
  bool pending_extract_ = false;

  TrialRecord record_;
};

/// Convenience: build, run and classify one trial.
TrialRecord run_trial(const WorldConfig& cfg);

}  // namespace swabsim
