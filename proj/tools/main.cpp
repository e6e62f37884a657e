#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "kinmv/cli.hpp"
#include "kinmv/errors.hpp"
#include "kinmv/persistence.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Particle simulator for degenerate McKean-Vlasov systems"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_dir;
  std::uint64_t seed = 0;
  unsigned workers = 1;
  bool retain_increments = false;
  std::vector<std::string> overrides;

  for (const char* name : {"simulate", "validate", "ladder", "diagnose", "independence"}) {
    auto* sub = app.add_subcommand(name);
    sub->add_option("--config,-c", config_path, "sectioned key=value config file")->required();
    sub->add_option("--out,-o", out_dir, "output directory (overrides output.dir)");
    sub->add_option("--seed", seed, "overrides the config seed");
    sub->add_option("--workers,-j", workers, "worker threads; does not change results")
        ->check(CLI::PositiveNumber);
    sub->add_flag("--retain-increments", retain_increments, "store Wiener increments");
    sub->add_option("--set", overrides, "override a key, e.g. --set init.scale=0.5");
  }

  CLI11_PARSE(app, argc, argv);
  const auto* sub = app.get_subcommands().front();

  kinmv::RunConfig config;
  try {
    auto entries = kinmv::ParseConfigText(kinmv::ReadTextFile(config_path), config_path);
    for (const auto& o : overrides) entries.push_back(kinmv::ParseOverride(o, "--set"));
    if (sub->count("--seed")) {
      entries.push_back({"", "seed", std::to_string(seed), "--seed", 0});
    }
    if (retain_increments) {
      entries.push_back({"", "retain_increments", "true", "--retain-increments", 0});
    }
    if (sub->count("--out")) entries.push_back({"output", "dir", out_dir, "--out", 0});
    config = kinmv::ResolveConfig(entries);
  } catch (const kinmv::ConfigError& e) {
    std::cerr << "error: ConfigError: " << e.what() << "\n";
    return 2;
  } catch (const kinmv::StoreError& e) {
    std::cerr << "error: StoreError: " << e.what() << "\n";
    return 2;
  }
  config.command = sub->get_name();
  config.workers = workers;
  return kinmv::Run(config, std::cout, std::cerr);
}
