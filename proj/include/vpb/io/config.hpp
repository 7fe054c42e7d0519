#pragma once

#include "vpb/common.hpp"
#include "vpb/kinetic/weights.hpp"

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

namespace vpb::io {

// Every violation found in one pass, one line each.
class ConfigError : public PreconditionError {
 public:
  explicit ConfigError(std::vector<std::string> problems);
  const std::vector<std::string>& problems() const { return problems_; }

 private:
  std::vector<std::string> problems_;
};

struct ScenarioConfig {
  // [model]
  double gamma = 1.0;
  double angular_amplitude = 1.0;
  // [velocity]
  int velocity_count = 16;
  double velocity_radius = 8.0;
  int angular_polar = 3;
  int angular_azimuth = 6;
  // [space]
  int space_count = 64;
  double space_length = 2.0 * kPi;
  int space_dim = 1;
  // [run]
  double eps = 0.5;
  std::vector<double> eps_list{0.5, 0.25, 0.125};
  std::uint64_t seed = 1;
  std::string output_dir = "vpb-out";
  // [weights]
  kinetic::WeightSpec weights;
  // [solver]
  double dt = 0.0;        // 0 selects dt_scale * eps^2
  double dt_scale = 0.1;
  std::string scheme = "strang";     // lie | strang
  std::string collision = "bgk";     // bgk | full
  double nu0 = 1.0;
  double t_end = 1.0;
  int record_every = 10;
  bool gamma_on = true;
  // [initial]
  std::string preset = "macro_wave";
  double amplitude = 0.05;
  // [audit]
  int audit_refined_count = 20;
  // [decay]
  std::string decay_preset = "chi_temperature";
  std::string decay_collision = "full";
  std::string decay_propagator = "expm";
  double decay_k_min = 1e-3;
  double decay_k_max = 8.0;
  int decay_k_count = 48;
  double decay_t_end = 300.0;
  double decay_sample_dt = 1.0;
  double decay_window_lo = 20.0;
  double decay_window_hi = 300.0;
  // [hydro]
  double hydro_record_interval = 0.05;
  double hydro_fluid_dt = 1e-3;
  // [characteristics]
  double char_t_scale = 0.1;   // t = t_scale * sqrt(eps)
  double char_field = 1e-2;    // phi = field * cos(k1 x1), so |d^2 phi| <= field
  int char_steps = 64;
  std::vector<double> char_x{0.3, 0.0, 0.0};
  std::vector<double> char_v{1.0, 0.5, -0.2};
  // [nu_tilde]
  double nu_tilde_delta = 1e-2;
  int nu_tilde_refine = 1;

  // Resolved (section.key, value) pairs in a stable order, for the manifest.
  std::vector<std::pair<std::string, std::string>> echo() const;
  // Effective time step for a given eps.
  double time_step(double eps) const { return dt > 0.0 ? dt : dt_scale * eps * eps; }
};

// Reads an INI document. Unknown sections/keys, malformed values and range
// violations are all collected and thrown together as ConfigError.
ScenarioConfig parse_config(const std::string& path);
ScenarioConfig parse_config_text(const std::string& text);

}  // namespace vpb::io
