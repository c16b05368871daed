#pragma once

#include "swabsim/matrix.hpp"
#include "swabsim/world.hpp"

#include <string>

namespace swabsim {

/// Everything the CLI needs: the per-trial world configuration plus matrix
/// settings. All config-file keys are optional and override these defaults.
struct AppConfig {
  WorldConfig world;
  std::uint64_t master_seed = 20240214;
  int workers = 0;
  bool emit_timeseries = false;
  std::string out_dir = "out";

  MatrixConfig matrix_config() const {
    MatrixConfig mc;
    mc.base = world;
    mc.master_seed = master_seed;
    mc.workers = workers;
    mc.emit_timeseries = emit_timeseries;
    mc.out_dir = out_dir;
    return mc;
  }
};

/// Parse the JSON config file (schema documented in the README). Unknown keys
/// are rejected to catch typos.
AppConfig load_config(const std::string& path);

AppConfig config_from_json_text(const std::string& text);

/// Write the trajectory parameters back into a config-shaped JSON file.
void save_trajectory_params(const std::string& path, const TrajParams& left,
                            const TrajParams& right);

}  // namespace swabsim
