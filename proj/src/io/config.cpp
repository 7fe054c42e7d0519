#include "vpb/io/config.hpp"

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include <charconv>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>
#include <variant>

namespace vpb::io {

namespace {

std::string join(const std::vector<std::string>& v) {
  std::string s;
  for (const auto& p : v) s += (s.empty() ? "" : "\n") + p;
  return s;
}

}  // namespace

ConfigError::ConfigError(std::vector<std::string> problems)
    : PreconditionError("invalid configuration:\n" + join(problems)), problems_(std::move(problems)) {}

namespace {

using Slot = std::variant<double*, int*, std::uint64_t*, std::string*, bool*, std::vector<double>*>;

struct Key {
  const char* section;
  const char* name;
  Slot slot;
};

std::vector<Key> key_table(ScenarioConfig& c) {
  return {
      {"model", "gamma", &c.gamma},
      {"model", "angular_amplitude", &c.angular_amplitude},
      {"velocity", "count", &c.velocity_count},
      {"velocity", "radius", &c.velocity_radius},
      {"velocity", "polar", &c.angular_polar},
      {"velocity", "azimuth", &c.angular_azimuth},
      {"space", "count", &c.space_count},
      {"space", "length", &c.space_length},
      {"space", "dim", &c.space_dim},
      {"run", "eps", &c.eps},
      {"run", "eps_list", &c.eps_list},
      {"run", "seed", &c.seed},
      {"run", "output_dir", &c.output_dir},
      {"weights", "vartheta", &c.weights.vartheta},
      {"weights", "sigma", &c.weights.sigma_exp},
      {"weights", "ell", &c.weights.ell},
      {"weights", "ell0", &c.weights.ell0},
      {"weights", "vartheta_cap", &c.weights.vartheta_cap},
      {"solver", "dt", &c.dt},
      {"solver", "dt_scale", &c.dt_scale},
      {"solver", "scheme", &c.scheme},
      {"solver", "collision", &c.collision},
      {"solver", "nu0", &c.nu0},
      {"solver", "t_end", &c.t_end},
      {"solver", "record_every", &c.record_every},
      {"solver", "gamma_on", &c.gamma_on},
      {"initial", "preset", &c.preset},
      {"initial", "amplitude", &c.amplitude},
      {"audit", "refined_count", &c.audit_refined_count},
      {"decay", "preset", &c.decay_preset},
      {"decay", "collision", &c.decay_collision},
      {"decay", "propagator", &c.decay_propagator},
      {"decay", "k_min", &c.decay_k_min},
      {"decay", "k_max", &c.decay_k_max},
      {"decay", "k_count", &c.decay_k_count},
      {"decay", "t_end", &c.decay_t_end},
      {"decay", "sample_dt", &c.decay_sample_dt},
      {"decay", "window_lo", &c.decay_window_lo},
      {"decay", "window_hi", &c.decay_window_hi},
      {"hydro", "record_interval", &c.hydro_record_interval},
      {"hydro", "fluid_dt", &c.hydro_fluid_dt},
      {"characteristics", "t_scale", &c.char_t_scale},
      {"characteristics", "field", &c.char_field},
      {"characteristics", "steps", &c.char_steps},
      {"characteristics", "x", &c.char_x},
      {"characteristics", "v", &c.char_v},
      {"nu_tilde", "delta", &c.nu_tilde_delta},
      {"nu_tilde", "refine", &c.nu_tilde_refine},
  };
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

template <class T>
bool parse_number(const std::string& text, T& out) {
  const std::string t = trim(text);
  const char* first = t.data();
  const char* last = t.data() + t.size();
  if (!t.empty() && t[0] == '+') ++first;
  auto [p, ec] = std::from_chars(first, last, out);
  return ec == std::errc() && p == last && first != last;
}

bool parse_value(const std::string& text, Slot slot) {
  return std::visit(
      [&](auto* ptr) -> bool {
        using T = std::remove_pointer_t<decltype(ptr)>;
        if constexpr (std::is_same_v<T, std::string>) {
          *ptr = trim(text);
          return !ptr->empty();
        } else if constexpr (std::is_same_v<T, bool>) {
          const std::string t = trim(text);
          if (t == "true" || t == "1" || t == "yes" || t == "on") *ptr = true;
          else if (t == "false" || t == "0" || t == "no" || t == "off") *ptr = false;
          else return false;
          return true;
        } else if constexpr (std::is_same_v<T, std::vector<double>>) {
          std::vector<double> v;
          std::stringstream ss(text);
          std::string item;
          while (std::getline(ss, item, ',')) {
            double x;
            if (!parse_number(item, x)) return false;
            v.push_back(x);
          }
          if (v.empty()) return false;
          *ptr = v;
          return true;
        } else {
          T x;
          if (!parse_number(text, x)) return false;
          if constexpr (std::is_same_v<T, double>)
            if (!std::isfinite(x)) return false;
          *ptr = x;
          return true;
        }
      },
      slot);
}

std::string format_value(const Slot& slot) {
  return std::visit(
      [](auto* ptr) -> std::string {
        using T = std::remove_pointer_t<decltype(ptr)>;
        if constexpr (std::is_same_v<T, std::string>) {
          return *ptr;
        } else if constexpr (std::is_same_v<T, bool>) {
          return *ptr ? "true" : "false";
        } else if constexpr (std::is_same_v<T, std::vector<double>>) {
          std::string s;
          for (double x : *ptr) {
            char buf[32];
            auto r = std::to_chars(buf, buf + sizeof buf, x);
            s += (s.empty() ? "" : ", ") + std::string(buf, r.ptr);
          }
          return s;
        } else {
          char buf[32];
          auto r = std::to_chars(buf, buf + sizeof buf, *ptr);
          return std::string(buf, r.ptr);
        }
      },
      slot);
}

void check_ranges(const ScenarioConfig& c, std::vector<std::string>& err) {
  auto need = [&](bool ok, const std::string& msg) {
    if (!ok) err.push_back(msg);
  };
  need(c.gamma > -3.0 && c.gamma <= 1.0, "model.gamma must lie in (-3, 1]");
  need(c.angular_amplitude > 0.0, "model.angular_amplitude must be positive");
  need(c.velocity_count >= 4 && c.velocity_count <= 40, "velocity.count must lie in [4, 40]");
  need(c.velocity_radius > 0.0, "velocity.radius must be positive");
  need(c.angular_polar >= 1, "velocity.polar must be >= 1");
  need(c.angular_azimuth >= 2 && c.angular_azimuth % 2 == 0, "velocity.azimuth must be even and >= 2");
  need(c.space_count >= 8 && (c.space_count & (c.space_count - 1)) == 0, "space.count must be a power of two >= 8");
  need(c.space_length > 0.0, "space.length must be positive");
  need(c.space_dim == 1 || c.space_dim == 3, "space.dim must be 1 or 3");
  need(c.eps > 0.0 && c.eps <= 1.0, "run.eps must lie in (0, 1]");
  for (double e : c.eps_list) need(e > 0.0 && e <= 1.0, "run.eps_list entries must lie in (0, 1]");
  need(!c.output_dir.empty(), "run.output_dir must not be empty");
  need(c.weights.vartheta_cap > 0.0, "weights.vartheta_cap must be positive");
  need(c.weights.vartheta > 0.0 && c.weights.vartheta <= c.weights.vartheta_cap,
       "weights.vartheta must lie in (0, vartheta_cap]");
  need(c.weights.sigma_exp > 0.0 && c.weights.sigma_exp <= 0.25, "weights.sigma must lie in (0, 1/4]");
  need(c.weights.ell >= 0.0, "weights.ell must be nonnegative");
  need(c.weights.ell0 >= 0.0, "weights.ell0 must be nonnegative");
  need(c.dt >= 0.0, "solver.dt must be nonnegative (0 selects dt_scale * eps^2)");
  need(c.dt_scale > 0.0, "solver.dt_scale must be positive");
  need(c.scheme == "lie" || c.scheme == "strang", "solver.scheme must be lie or strang");
  need(c.collision == "bgk" || c.collision == "full", "solver.collision must be bgk or full");
  need(c.nu0 > 0.0, "solver.nu0 must be positive");
  need(c.t_end >= 0.0, "solver.t_end must be nonnegative");
  need(c.record_every >= 1, "solver.record_every must be >= 1");
  static const std::set<std::string> presets{"zero", "macro_wave", "density_wave", "random_macro"};
  need(presets.count(c.preset) == 1, "initial.preset must be one of zero, macro_wave, density_wave, random_macro");
  need(c.amplitude >= 0.0, "initial.amplitude must be nonnegative");
  need(c.audit_refined_count > c.velocity_count, "audit.refined_count must exceed velocity.count");
  need(c.decay_preset == "chi_sqrt_mu" || c.decay_preset == "chi_temperature",
       "decay.preset must be chi_sqrt_mu or chi_temperature");
  need(c.decay_collision == "bgk" || c.decay_collision == "full", "decay.collision must be bgk or full");
  need(c.decay_propagator == "expm" || c.decay_propagator == "strang", "decay.propagator must be expm or strang");
  need(c.decay_k_min > 0.0 && c.decay_k_max > c.decay_k_min, "decay.k_min must be positive and below k_max");
  need(c.decay_k_count >= 2, "decay.k_count must be >= 2");
  need(c.decay_t_end > 0.0, "decay.t_end must be positive");
  need(c.decay_sample_dt > 0.0, "decay.sample_dt must be positive");
  need(c.decay_window_lo >= 0.0 && c.decay_window_hi > c.decay_window_lo, "decay window must satisfy 0 <= lo < hi");
  need(c.hydro_record_interval > 0.0, "hydro.record_interval must be positive");
  need(c.hydro_fluid_dt > 0.0, "hydro.fluid_dt must be positive");
  need(c.char_t_scale >= 0.0, "characteristics.t_scale must be nonnegative");
  need(c.char_field >= 0.0, "characteristics.field must be nonnegative");
  need(c.char_steps >= 1, "characteristics.steps must be >= 1");
  need(c.char_x.size() == 3, "characteristics.x must have 3 components");
  need(c.char_v.size() == 3, "characteristics.v must have 3 components");
  need(c.nu_tilde_delta >= 0.0, "nu_tilde.delta must be nonnegative");
  need(c.nu_tilde_refine >= 1, "nu_tilde.refine must be >= 1");
}

}  // namespace

std::vector<std::pair<std::string, std::string>> ScenarioConfig::echo() const {
  ScenarioConfig copy = *this;
  std::vector<std::pair<std::string, std::string>> out;
  for (const auto& k : key_table(copy)) out.emplace_back(std::string(k.section) + "." + k.name, format_value(k.slot));
  return out;
}

ScenarioConfig parse_config_text(const std::string& text) {
  namespace pt = boost::property_tree;
  pt::ptree tree;
  try {
    std::istringstream in(text);
    pt::read_ini(in, tree);
  } catch (const pt::ini_parser_error& e) {
    throw ConfigError({std::string("malformed document: ") + e.message() + " (line " + std::to_string(e.line()) + ")"});
  }
  ScenarioConfig c;
  auto table = key_table(c);
  std::vector<std::string> err;
  for (const auto& [section, body] : tree) {
    if (body.empty()) {
      err.push_back("key '" + section + "' outside any section");
      continue;
    }
    for (const auto& [name, node] : body) {
      const std::string full = section + "." + name;
      const Key* match = nullptr;
      for (const auto& k : table)
        if (section == k.section && name == k.name) match = &k;
      if (!match) {
        err.push_back("unknown key '" + full + "'");
        continue;
      }
      if (!parse_value(node.data(), match->slot)) err.push_back("cannot parse '" + full + "' = '" + node.data() + "'");
    }
  }
  check_ranges(c, err);
  if (!err.empty()) throw ConfigError(err);
  return c;
}

ScenarioConfig parse_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError({"cannot open config file '" + path + "'"});
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config_text(ss.str());
}

}  // namespace vpb::io
