#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "henonlab/experiments.hpp"

namespace {

constexpr const char* kVersion = "1.0.0";

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"henonlab: periodic points, Green functions and tangent dynamics of complex Henon maps"};
  app.require_subcommand(1);

  std::string config_path;
  std::optional<std::string> output;
  std::optional<unsigned> threads;
  std::optional<std::uint64_t> seed;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", config_path, "experiment configuration (YAML)")->required();
    sub->add_option("--output", output, "output directory (overrides the configuration)");
    sub->add_option("--threads", threads, "worker threads, 0 = auto");
    sub->add_option("--seed", seed, "pseudo-random seed (overrides prng_seed)");
  };
  CLI::App* run = app.add_subcommand("run", "run every experiment of a configuration");
  add_common(run);
  CLI::App* describe = app.add_subcommand("describe", "print the resolved plan without running");
  add_common(describe);
  CLI::App* version = app.add_subcommand("version", "print the version");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : henonlab::kExitConfig;
  }

  const henonlab::RunOverrides overrides{output, threads, seed};
  if (run->parsed()) return henonlab::run_config_file(config_path, overrides, std::cout, std::cerr);
  if (describe->parsed()) return henonlab::describe_config_file(config_path, overrides, std::cout, std::cerr);
  if (version->parsed()) std::cout << "henonlab " << kVersion << "\n";
  return 0;
}
