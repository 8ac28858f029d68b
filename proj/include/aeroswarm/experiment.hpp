#pragma once
// Run modes behind the CLI: training with per-episode baseline rows, greedy
// checkpoint evaluation, and the user-density sweep.

#include <string>

#include "aeroswarm/scenario.hpp"

namespace aeroswarm {

struct RunOptions {
  std::string mode = "train";  // train | eval | sweep
  std::string out_dir = "out";
  std::string checkpoint;      // eval: required; train: resume point
  int episodes_override = -1;  // replaces the schedule total when > 0
  bool trace = false;          // per-step trajectory dump
};

int run_experiment(const ScenarioConfig& cfg, const RunOptions& opt);

}  // namespace aeroswarm
