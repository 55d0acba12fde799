// Command-line front end for the experiment harness.
//
//   experts run <config>       any experiment kind
//   experts verify <config>    equivalence-verify or bound-sweep
//   experts compare <config>   forecaster comparison table
//   experts path <config>      shortest-path game
//
// Exit codes: 0 all checks passed, 1 a check failed, 2 bad config or
// usage, 3 runtime error.

#include <iostream>
#include <set>

#include <CLI11.hpp>

#include "experts/error.hpp"
#include "experts/experiment.hpp"

namespace {

using experts::ExperimentKind;

int dispatch(const std::string& command, const std::string& config_path,
             const experts::RunOverrides& overrides) {
  auto config = experts::load_config(config_path);
  experts::apply_overrides(config, overrides);

  const std::set<ExperimentKind> verify_kinds{ExperimentKind::EquivalenceVerify,
                                              ExperimentKind::BoundSweep};
  if (command == "verify" && !verify_kinds.count(config.kind))
    throw experts::ConfigError("verify needs kind equivalence-verify or bound-sweep, got " +
                               to_string(config.kind));
  if (command == "path" && config.kind != ExperimentKind::ShortestPath)
    throw experts::ConfigError("path needs kind shortest-path, got " + to_string(config.kind));

  const auto result = command == "compare" ? experts::run_comparison(config)
                                           : experts::run_experiment(config);
  std::cout << "wrote " << (config.out_dir / "summary.json").string() << '\n';
  if (result.exit_status != 0) std::cerr << "one or more checks failed\n";
  return result.exit_status;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Online experts, perturbed leaders and shortest paths"};
  app.set_version_flag("--version", EXPERTS_VERSION);
  app.require_subcommand(1);

  std::string config_path;
  std::vector<std::uint64_t> seeds;
  std::string out_dir;
  std::size_t samples = 0;

  for (const char* name : {"run", "verify", "compare", "path"}) {
    auto* sub = app.add_subcommand(name);
    sub->add_option("config", config_path, "experiment config (YAML)")
        ->required()
        ->check(CLI::ExistingFile);
    sub->add_option("--seed-override", seeds, "replace the config's seed list");
    sub->add_option("--out-dir", out_dir, "replace the config's output directory");
    sub->add_option("--samples", samples, "Monte Carlo draws")->check(CLI::PositiveNumber);
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  experts::RunOverrides overrides;
  if (!seeds.empty()) overrides.seeds = seeds;
  if (!out_dir.empty()) overrides.out_dir = out_dir;
  if (samples > 0) overrides.samples = samples;

  const std::string command = app.get_subcommands().front()->get_name();
  try {
    return dispatch(command, config_path, overrides);
  } catch (const experts::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 3;
  }
}
