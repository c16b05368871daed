#include "swabsim/world.hpp"

#include <sstream>

namespace swabsim {

namespace {

Pose6 nominal_head_pose(const std::array<OUParams, 3>& ou) {
  return neck_fk(ou[0].setpoint, ou[1].setpoint, ou[2].setpoint);
}

std::string dump_state(double t, StageId stage, const Pose6& ee, const Vec3& f) {
  std::ostringstream os;
  os << "t=" << t << " stage=" << stage_name(stage) << " ee=[" << ee.position.transpose()
     << "] force=[" << f.transpose() << "]";
  return os.str();
}

}  // namespace

World::World(WorldConfig cfg)
    : cfg_(std::move(cfg)),
      corridor_(make_corridor(cfg_.spec.phantom, cfg_.spec.side)),
      fixture_(make_head_fixture()),
      nostril_local_(fixture_.nostril_pose(cfg_.spec.side)),
      track_(build_waypoints(cfg_.spec.side == Side::Left ? cfg_.traj_left : cfg_.traj_right,
                             corridor_)),
      ou_(motion_preset(cfg_.spec.motion)),
      head_rng_(cfg_.spec.seed, "head"),
      vision_rng_(cfg_.spec.seed, "vision") {
  cfg_.sim.validate();
  if (cfg_.controller.name.empty()) cfg_.controller = controller_preset(cfg_.spec.controller);

  // patient starts holding the setpoint posture
  for (int i = 0; i < 3; ++i) {
    neck_.angles[i] = ou_[i].setpoint;
    neck_.targets[i] = ou_[i].setpoint;
  }
  head_pose_ = neck_fk(neck_.angles);

  // sentry standoff: nominal approach pose backed off along the shaft, with a
  // small pitch offset so the orientation loop is exercised too
  const Pose6 nominal_nostril = nominal_head_pose(ou_).compose(nostril_local_);
  const Pose6 approach = nominal_nostril.compose(track_.start());
  standoff_ = approach;
  standoff_.position -= cfg_.standoff_distance * (approach.orientation * Vec3::UnitZ());
  standoff_.orientation =
      (approach.orientation * Quat(Eigen::AngleAxisd(cfg_.standoff_tilt, Vec3::UnitY())))
          .normalized();
  ee_ = standoff_;
  anchor_ = nominal_nostril;  // refreshed from the estimate at insertion start
  insert_start_pos_ = ee_.position;
  collect_hold_ = ee_;

  record_.spec = cfg_.spec;
  record_.np_depth = corridor_.np_depth();
  record_.transitions.push_back({StageId::Sentry, 0.0});
}

Pose6 World::tip_pose() const {
  return {ee_.position + cfg_.swab.L_max * (ee_.orientation * Vec3::UnitZ()), ee_.orientation};
}

Pose6 World::approach_target() const { return estimate_.pose.compose(track_.start()); }

Pose6 World::track_target_world(double l) const {
  return anchor_.compose(target_at(track_, l));
}

Pose6 World::ee_target_from_tip(const Pose6& tip_target) const {
  Pose6 out = tip_target;
  out.position -= cfg_.swab.L_max * (tip_target.orientation * Vec3::UnitZ());
  return out;
}

double World::insertion_displacement() const {
  return std::max(0.0, (ee_.position - insert_start_pos_).dot(insert_axis_));
}

void World::enter_stage(StageId next) {
  if (!stage_transition_legal(stage_, next))
    throw SimulationFault(std::string("illegal stage transition ") + stage_name(stage_) + " -> " +
                          stage_name(next));
  stage_ = next;
  stage_entry_t_ = t_;
  record_.transitions.push_back({next, t_});
}

void World::release_swab() {
  if (!attached_) return;
  attached_ = false;
  log_event("swab_released");
}

void World::log_event(const std::string& msg) {
  // events sharing a step are merged so timestamps stay strictly increasing
  auto& evs = record_.events;
  if (!evs.empty() && evs.back().first == t_)
    evs.back().second += "+" + msg;
  else
    evs.emplace_back(t_, msg);
}

Twist6 World::stage_command() {
  Twist6 cmd;
  switch (stage_) {
    case StageId::Sentry:
      // the joint-table sentry move is abstracted to a teleport
      ee_ = standoff_;
      enter_stage(StageId::Approach);
      break;

    case StageId::Approach: {
      PoseEstimate target = estimate_;
      target.pose = approach_target();
      if (servo_converged(target, tip_pose(), cfg_.servo)) {
        anchor_ = estimate_.pose;
        insert_start_pos_ = ee_.position;
        insert_axis_ = anchor_.orientation * (track_.start().orientation * Vec3::UnitZ());
        cursor_ = TrackCursor{};
        log_event("servo_converged");
        enter_stage(StageId::Insert);
        break;
      }
      // the servo commands the tip twist; move it to the wrist so the
      // angular part does not drag the tip through the shaft lever
      cmd = servo_step(target, tip_pose(), repel_, cfg_.sim.dt(), cfg_.servo);
      cmd.linear -= cmd.angular.cross(cfg_.swab.L_max * (ee_.orientation * Vec3::UnitZ()));
      if (t_ - stage_entry_t_ > cfg_.stage_timeout && !abort_) {
        abort_ = AbortEvent{AbortKind::Manual, t_, last_contact_.tip_depth};
        record_.abort = abort_;
        if (estimate_.valid) anchor_ = estimate_.pose;
        insert_start_pos_ = ee_.position;
        insert_axis_ = anchor_.orientation * (track_.start().orientation * Vec3::UnitZ());
        cursor_ = TrackCursor{};
        log_event("approach_timeout");
        release_swab();
        enter_stage(StageId::Aborted);
      }
      break;
    }

    case StageId::Insert: {
      // the slowdown law consumes the low-pass force, like the control law
      cursor_ = advance_cursor(cursor_, filtered_.f.z(), cfg_.sim.dt(), track_.total_duration);
      const double displacement = insertion_displacement();
      const double lam_t = transverse_gain(cfg_.controller, cfg_.swab, displacement);
      const Pose6 ee_target = ee_target_from_tip(track_target_world(cursor_.l));
      cmd = control_step(ee_target, ee_, filtered_, Vec3::Zero(), lam_t,
                         cfg_.controller.axial_gain, cfg_.controller.k_gain);
      if (cursor_.finished) {
        log_event("cursor_finished");
        pending_extract_ = true;
      } else if (t_ - stage_entry_t_ > cfg_.stage_timeout) {
        log_event("insert_timeout");
        pending_extract_ = true;
      }
      break;
    }

    case StageId::Collect: {
      const double tau = t_ - collect_entry_t_;
      const double phase = 2.0 * M_PI * cfg_.collect.frequency * tau;
      const double spin = cfg_.collect.rotation_amplitude * std::sin(phase);
      Pose6 target = collect_hold_;
      target.orientation =
          (collect_hold_.orientation * Quat(Eigen::AngleAxisd(spin, Vec3::UnitZ()))).normalized();
      const double displacement = insertion_displacement();
      const double lam_t = transverse_gain(cfg_.controller, cfg_.swab, displacement);
      cmd = control_step(target, ee_, filtered_,
                         Vec3(0.0, 0.0, cfg_.controller.target_force_collect), lam_t,
                         cfg_.controller.axial_gain, cfg_.controller.k_gain);
      // feedforward keeps the commanded spin at full amplitude
      const double spin_rate =
          cfg_.collect.rotation_amplitude * 2.0 * M_PI * cfg_.collect.frequency * std::cos(phase);
      cmd.angular += spin_rate * (collect_hold_.orientation * Vec3::UnitZ());
      if (tau >= cfg_.collect.duration) {
        log_event("collection_complete");
        pending_extract_ = true;
      }
      break;
    }

    case StageId::Aborted:
      enter_stage(StageId::Extract);
      break;

    case StageId::Extract: {
      cursor_.l = std::max(0.0, cursor_.l - cfg_.sim.dt());
      cursor_.finished = false;
      const Pose6 ee_target = ee_target_from_tip(track_target_world(cursor_.l));
      const double displacement = insertion_displacement();
      const double lam_t = transverse_gain(cfg_.controller, cfg_.swab, displacement);
      cmd = control_step(ee_target, ee_, filtered_, Vec3::Zero(), lam_t,
                         cfg_.controller.axial_gain, cfg_.controller.k_gain);
      if (cursor_.l <= 0.0 && (ee_.position - ee_target.position).norm() < 0.005)
        enter_stage(StageId::Done);
      break;
    }

    case StageId::Done:
      break;
  }
  return cmd;
}

void World::step() {
  const double dt = cfg_.sim.dt();
  t_ += dt;  // everything below happens at the new time

  // 1. head motion: stochastic targets, proportional tracking
  advance_targets(neck_, ou_, dt, head_rng_);
  neck_ = track_head(neck_, cfg_.head_track_gain, dt);
  head_pose_ = neck_fk(neck_.angles);

  // 2. vision at the camera rate, zero-order hold in between
  std::optional<Pose6> meas;
  if (step_count_ % static_cast<std::uint64_t>(cfg_.sim.vision_divisor()) == 0) {
    const auto pts = fiducials_world(fixture_, head_pose_);
    const auto detected =
        measure_fiducials(pts, cfg_.vision_noise_sigma, cfg_.vision_dropout, vision_rng_);
    try {
      const Pose6 head_est = register_pose(detected, fixture_.fiducials);
      meas = head_est.compose(nostril_local_);
    } catch (const EstimationUnavailable&) {
      // coast on the previous estimate
    }
  }
  estimate_ = filter_pose(estimate_, meas, Twist6{}, dt);

  // 3. stage controller (consumes the previous step's forces)
  const std::size_t transitions_before = record_.transitions.size();
  const Twist6 cmd = stage_command();

  // 4. integrate the end-effector
  ee_ = integrate_twist(ee_, cmd, dt);
  if (!ee_.valid(1e-6))
    throw SimulationFault("non-finite end-effector state: " +
                          dump_state(t_, stage_, ee_, last_force_.f));
  ee_.renormalize();

  // 5. plant: contact geometry always, forces only while the swab is held
  ContactResult contact =
      contact_forces(corridor_, nostril_local_, head_pose_, ee_, cfg_.swab, cfg_.axial, cmd);
  if (!attached_) {
    contact.force_ee = Vec3::Zero();
    contact.at_wall = false;
  }
  const bool in_contact_phase = stage_ == StageId::Insert || stage_ == StageId::Collect;
  if (cfg_.force_override && in_contact_phase && attached_ &&
      contact.tip_depth >= cfg_.force_override->depth_min &&
      contact.tip_depth <= cfg_.force_override->depth_max) {
    contact.force_ee = cfg_.force_override->force_ee;
  }
  if (cfg_.nan_inject_at && t_ >= *cfg_.nan_inject_at)
    contact.force_ee = Vec3::Constant(std::numeric_limits<double>::quiet_NaN());
  last_contact_ = contact;
  last_force_ = ForceSample{contact.force_ee, t_};
  if (!last_force_.sane())
    throw SimulationFault("force sample out of range: " +
                          dump_state(t_, stage_, ee_, last_force_.f));

  // 6. force filters
  filtered_ = filter_step(filtered_, last_force_.f, cfg_.controller.alpha, dt);
  // repulsion follows the force acting on the swab (the contact reaction)
  auto [bp, repel_ee] = bandpass_step(bandpass_, -last_force_.f, dt, cfg_.servo);
  bandpass_ = bp;
  repel_ = ee_.orientation * repel_ee;

  // 7. observers; at most one stage transition per step
  const bool stage_changed = record_.transitions.size() != transitions_before;
  if (in_contact_phase && !stage_changed) {
    const bool manual = cfg_.manual_abort_at && t_ >= *cfg_.manual_abort_at;
    const double p_meas = insertion_displacement();
    if (!abort_) {
      if (auto ab = safety_check(p_meas, last_force_, cfg_.safety, manual)) {
        abort_ = ab;
        record_.abort = ab;
        log_event(std::string("abort_") + abort_kind_name(ab->kind));
        release_swab();
        pending_extract_ = false;
        enter_stage(StageId::Aborted);
      }
    }
    if (stage_ == StageId::Insert && !abort_) {
      const FuzzyDecision d = fuzzy_eval(p_meas, last_force_.f.z(), cfg_.fuzzy);
      if (d.triggered) {
        collected_ = true;
        record_.fuzzy_trigger_depth = contact.tip_depth;
        record_.reached = contact.tip_depth >= corridor_.np_depth() - cfg_.reach_margin;
        log_event("fuzzy_triggered");
        collect_hold_ = ee_;
        collect_entry_t_ = t_;
        pending_extract_ = false;
        enter_stage(StageId::Collect);
      }
    }
  }
  if (pending_extract_ && stage_ != StageId::Aborted) {
    pending_extract_ = false;
    enter_stage(StageId::Extract);
  }

  // 8. record
  Sample s;
  s.t = t_;
  s.ee = ee_;
  s.head_angles = neck_.angles;
  s.force_raw = last_force_.f;
  s.force_filtered = filtered_.f;
  s.cursor = cursor_.l;
  s.tip_depth = contact.tip_depth;
  s.stage = stage_;
  record_.series.push_back(s);

  ++step_count_;
}

void World::classify_outcome() {
  // a trial that aborted after a proper arrival still counts as reached for
  // measure iv; the outcome records the abort disposition
  if (abort_ && abort_->kind == AbortKind::Overload) {
    record_.outcome = Outcome::Overload;
  } else if (abort_ && abort_->kind == AbortKind::Wedge) {
    record_.outcome = Outcome::WedgeAbort;
  } else if (collected_ && record_.reached) {
    record_.outcome = Outcome::ReachedNP;
  } else if (collected_) {
    record_.outcome = Outcome::Premature;
  } else {
    record_.outcome = Outcome::Stuck;
  }
}

TrialRecord World::run() {
  while (stage_ != StageId::Done && t_ < cfg_.sim.duration_limit) step();
  if (stage_ != StageId::Done) log_event("duration_limit_reached");
  classify_outcome();
  return record_;
}

TrialRecord run_trial(const WorldConfig& cfg) {
  World world(cfg);
  return world.run();
}

}  // namespace swabsim
