#include "swabsim/config.hpp"

#include "json.hpp"

#include <fstream>
#include <set>
#include <stdexcept>

namespace swabsim {

using nlohmann::json;

namespace {

void check_keys(const json& j, const std::set<std::string>& allowed, const std::string& where) {
  for (const auto& [key, value] : j.items())
    if (!allowed.count(key))
      throw std::invalid_argument("config: unknown key '" + key + "' in " + where);
}

template <typename T>
void maybe(const json& j, const char* key, T& out) {
  if (j.contains(key)) out = j.at(key).get<T>();
}

void parse_traj(const json& j, TrajParams& p) {
  check_keys(j, {"chi", "e1", "e2"}, "trajectory");
  maybe(j, "chi", p.chi);
  maybe(j, "e1", p.e1);
  maybe(j, "e2", p.e2);
}

}  // namespace

AppConfig config_from_json_text(const std::string& text) {
  AppConfig cfg;
  const json j = json::parse(text);
  check_keys(j,
             {"sim", "trial", "vision", "swab", "axial", "fuzzy", "safety", "servo", "collect",
              "controller", "trajectory", "stage_timeout", "standoff", "matrix"},
             "top level");

  if (j.contains("sim")) {
    const auto& s = j["sim"];
    check_keys(s, {"control_rate", "vision_rate", "seed", "duration_limit"}, "sim");
    maybe(s, "control_rate", cfg.world.sim.control_rate);
    maybe(s, "vision_rate", cfg.world.sim.vision_rate);
    maybe(s, "seed", cfg.world.sim.seed);
    maybe(s, "duration_limit", cfg.world.sim.duration_limit);
    cfg.world.sim.validate();
  }
  if (j.contains("trial")) {
    const auto& t = j["trial"];
    check_keys(t, {"controller", "motion", "phantom", "side", "repeat"}, "trial");
    maybe(t, "controller", cfg.world.spec.controller);
    controller_preset(cfg.world.spec.controller);  // validate the name
    if (t.contains("motion")) cfg.world.spec.motion = parse_motion(t["motion"].get<std::string>());
    if (t.contains("phantom")) cfg.world.spec.phantom = parse_phantom(t["phantom"].get<std::string>());
    if (t.contains("side")) cfg.world.spec.side = parse_side(t["side"].get<std::string>());
    maybe(t, "repeat", cfg.world.spec.repeat_index);
  }
  if (j.contains("vision")) {
    const auto& v = j["vision"];
    check_keys(v, {"noise_sigma", "dropout"}, "vision");
    maybe(v, "noise_sigma", cfg.world.vision_noise_sigma);
    maybe(v, "dropout", cfg.world.vision_dropout);
  }
  if (j.contains("swab")) {
    const auto& s = j["swab"];
    check_keys(s, {"L_max", "breakpoint", "m_coef", "b_coef", "zeta"}, "swab");
    maybe(s, "L_max", cfg.world.swab.L_max);
    maybe(s, "breakpoint", cfg.world.swab.breakpoint);
    maybe(s, "m_coef", cfg.world.swab.m_coef);
    maybe(s, "b_coef", cfg.world.swab.b_coef);
    maybe(s, "zeta", cfg.world.swab.zeta);
  }
  if (j.contains("axial")) {
    const auto& a = j["axial"];
    check_keys(a, {"wall_stiffness", "buckle_force", "friction_coef"}, "axial");
    maybe(a, "wall_stiffness", cfg.world.axial.wall_stiffness);
    maybe(a, "buckle_force", cfg.world.axial.buckle_force);
    maybe(a, "friction_coef", cfg.world.axial.friction_coef);
  }
  if (j.contains("fuzzy")) {
    const auto& f = j["fuzzy"];
    check_keys(f, {"s_p", "i_p", "s_F", "i_F", "threshold"}, "fuzzy");
    maybe(f, "s_p", cfg.world.fuzzy.s_p);
    maybe(f, "i_p", cfg.world.fuzzy.i_p);
    maybe(f, "s_F", cfg.world.fuzzy.s_f);
    maybe(f, "i_F", cfg.world.fuzzy.i_f);
    maybe(f, "threshold", cfg.world.fuzzy.threshold);
  }
  if (j.contains("safety")) {
    const auto& s = j["safety"];
    check_keys(s, {"wedge_force", "wedge_depth", "max_force"}, "safety");
    maybe(s, "wedge_force", cfg.world.safety.wedge_force);
    maybe(s, "wedge_depth", cfg.world.safety.wedge_depth);
    maybe(s, "max_force", cfg.world.safety.max_force);
  }
  if (j.contains("servo")) {
    const auto& s = j["servo"];
    check_keys(s,
               {"lambda0", "lambda0_slope", "lambda_inf", "alpha1", "alpha2", "lambda_vs",
                "converge_pos", "converge_angle_deg"},
               "servo");
    maybe(s, "lambda0", cfg.world.servo.lambda0);
    maybe(s, "lambda0_slope", cfg.world.servo.lambda0_slope);
    maybe(s, "lambda_inf", cfg.world.servo.lambda_inf);
    maybe(s, "alpha1", cfg.world.servo.alpha1);
    maybe(s, "alpha2", cfg.world.servo.alpha2);
    if (s.contains("lambda_vs")) {
      const auto v = s["lambda_vs"].get<std::vector<double>>();
      if (v.size() != 3) throw std::invalid_argument("config: servo.lambda_vs needs 3 entries");
      cfg.world.servo.lambda_vs = Vec3(v[0], v[1], v[2]);
    }
    maybe(s, "converge_pos", cfg.world.servo.converge_pos);
    if (s.contains("converge_angle_deg"))
      cfg.world.servo.converge_angle = s["converge_angle_deg"].get<double>() * M_PI / 180.0;
  }
  if (j.contains("collect")) {
    const auto& c = j["collect"];
    check_keys(c, {"duration", "amplitude_deg", "frequency"}, "collect");
    maybe(c, "duration", cfg.world.collect.duration);
    if (c.contains("amplitude_deg"))
      cfg.world.collect.rotation_amplitude = c["amplitude_deg"].get<double>() * M_PI / 180.0;
    maybe(c, "frequency", cfg.world.collect.frequency);
  }
  if (j.contains("controller")) {
    const auto& c = j["controller"];
    check_keys(c, {"nu_tip", "axial_gain", "alpha", "target_force_collect"}, "controller");
    // preset is named in trial.controller; these override its constants
    ControllerConfig base = controller_preset(cfg.world.spec.controller);
    maybe(c, "nu_tip", base.nu_tip);
    maybe(c, "axial_gain", base.axial_gain);
    maybe(c, "alpha", base.alpha);
    maybe(c, "target_force_collect", base.target_force_collect);
    cfg.world.controller = base;
  }
  if (j.contains("trajectory")) {
    const auto& t = j["trajectory"];
    check_keys(t, {"left", "right"}, "trajectory");
    if (t.contains("left")) parse_traj(t["left"], cfg.world.traj_left);
    if (t.contains("right")) parse_traj(t["right"], cfg.world.traj_right);
  }
  maybe(j, "stage_timeout", cfg.world.stage_timeout);
  if (j.contains("standoff")) {
    const auto& s = j["standoff"];
    check_keys(s, {"distance", "tilt_deg"}, "standoff");
    maybe(s, "distance", cfg.world.standoff_distance);
    if (s.contains("tilt_deg"))
      cfg.world.standoff_tilt = s["tilt_deg"].get<double>() * M_PI / 180.0;
  }
  if (j.contains("matrix")) {
    const auto& m = j["matrix"];
    check_keys(m, {"master_seed", "workers", "emit_timeseries", "out_dir"}, "matrix");
    maybe(m, "master_seed", cfg.master_seed);
    maybe(m, "workers", cfg.workers);
    maybe(m, "emit_timeseries", cfg.emit_timeseries);
    maybe(m, "out_dir", cfg.out_dir);
  }
  return cfg;
}

AppConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("config: cannot open " + path);
  std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return config_from_json_text(text);
}

void save_trajectory_params(const std::string& path, const TrajParams& left,
                            const TrajParams& right) {
  json j;
  j["trajectory"]["left"] = {{"chi", left.chi}, {"e1", left.e1}, {"e2", left.e2}};
  j["trajectory"]["right"] = {{"chi", right.chi}, {"e1", right.e1}, {"e2", right.e2}};
  std::ofstream out(path);
  if (!out) throw std::runtime_error("config: cannot write " + path);
  out << j.dump(2) << "\n";
}

}  // namespace swabsim
