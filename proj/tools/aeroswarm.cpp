#include <cstdint>
#include <cstdio>
#include <exception>
#include <string>

#include <CLI11.hpp>

#include "aeroswarm/experiment.hpp"
#include "aeroswarm/scenario.hpp"

int main(int argc, char** argv) {
  CLI::App app{"two-tier UAV/GBS network simulator and policy trainer"};
  app.require_subcommand(1);

  std::string config_path, out_dir = "out", checkpoint;
  long long seed = -1;
  int episodes = -1;
  bool trace = false;

  auto add_common = [&](CLI::App* sub, bool with_checkpoint) {
    sub->add_option("--config", config_path, "config file (key = value)")
        ->check(CLI::ExistingFile);
    sub->add_option("--seed", seed, "override the scenario seed");
    sub->add_option("--out", out_dir, "output directory");
    sub->add_option("--episodes", episodes, "episode budget override");
    sub->add_flag("--trace", trace, "dump per-step trajectories");
    if (with_checkpoint)
      sub->add_option("--checkpoint", checkpoint, "checkpoint file to load");
  };

  CLI::App* train =
      app.add_subcommand("train", "train the policy, logging baseline rows");
  add_common(train, true);
  CLI::App* eval_cmd =
      app.add_subcommand("eval", "greedy rollouts from a checkpoint");
  add_common(eval_cmd, true);
  CLI::App* sweep =
      app.add_subcommand("sweep", "repeat the task chain over user densities");
  add_common(sweep, false);
  CLI::App* dump =
      app.add_subcommand("dump-defaults", "print the default config and exit");

  CLI11_PARSE(app, argc, argv);

  try {
    if (dump->parsed()) {
      const std::string text =
          aeroswarm::config_to_string(aeroswarm::ScenarioConfig{});
      std::fputs(text.c_str(), stdout);
      return 0;
    }
    aeroswarm::ScenarioConfig cfg;
    if (!config_path.empty()) cfg = aeroswarm::load_config(config_path);
    aeroswarm::apply_env_overrides(cfg);  // flags still win over env
    if (seed >= 0) cfg.seed = static_cast<std::uint64_t>(seed);

    aeroswarm::RunOptions opt;
    opt.mode = train->parsed() ? "train" : eval_cmd->parsed() ? "eval" : "sweep";
    opt.out_dir = out_dir;
    opt.checkpoint = checkpoint;
    opt.episodes_override = episodes;
    opt.trace = trace;
    return aeroswarm::run_experiment(cfg, opt);
  } catch (const std::exception& ex) {
    std::fprintf(stderr, "error: %s\n", ex.what());
    return 1;
  }
}
