#include "vpb/io/commands.hpp"
#include "vpb/io/config.hpp"
#include "vpb/io/manifest.hpp"

#include <CLI11.hpp>

#include <iostream>

int main(int argc, char** argv) {
  using namespace vpb::io;
  CLI::App app{"vpb: kinetic / fluid experiments for the rescaled Vlasov-Poisson-Boltzmann system"};
  app.require_subcommand(1, 1);

  std::string config_path, out_dir;
  std::uint64_t seed = 0;
  for (const auto& name : subcommand_names()) {
    auto* sub = app.add_subcommand(name);
    sub->add_option("--config", config_path, "INI configuration file")->required();
    sub->add_option("--out", out_dir, "output directory (overrides run.output_dir)");
    sub->add_option("--seed", seed, "RNG seed (overrides run.seed)");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kExitOk : kExitConfig;
  }
  const std::string name = app.get_subcommands().front()->get_name();
  const auto* sub = app.get_subcommands().front();

  ScenarioConfig cfg;
  try {
    cfg = parse_config(config_path);
  } catch (const ConfigError& e) {
    std::cerr << e.what() << "\n";
    if (!out_dir.empty()) {
      ScenarioConfig fallback;
      fallback.output_dir = out_dir;
      RunArtifacts art(out_dir, name, fallback);
      art.write_failure(kExitConfig, "config", e.what());
      art.finalize(kExitConfig);
    }
    return kExitConfig;
  }
  if (!out_dir.empty()) cfg.output_dir = out_dir;
  if (sub->count("--seed") > 0) cfg.seed = seed;

  for (const auto& [k, v] : cfg.echo()) std::cerr << k << " = " << v << "\n";
  const int code = run_subcommand(name, cfg, std::cerr);
  std::cerr << name << " exit " << code << " -> " << cfg.output_dir << "\n";
  return code;
}
