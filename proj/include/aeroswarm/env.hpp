#pragma once
// Dec-POMDP environment: joint discrete actions, C1-C3 enforcement,
// per-agent observations, global state for the centralized critic.

#include <vector>

#include "aeroswarm/channel.hpp"
#include "aeroswarm/reward.hpp"
#include "aeroswarm/scenario.hpp"
#include "aeroswarm/world.hpp"

namespace aeroswarm {

// actions: 0:+x 1:-x 2:+y 3:-y 4:+z 5:-z 6:hover
constexpr int kNumActions = 7;

struct TraceRow {
  int step;
  int uav_id;
  double x, y, z;
  int action;
  bool collided;
};

class Env {
 public:
  explicit Env(const ScenarioConfig& cfg);

  std::vector<std::vector<double>> reset(int episode_index);

  struct StepResult {
    std::vector<std::vector<double>> observations;
    std::vector<RewardVector> rewards;  // team components, per-agent collided
    bool done = false;
  };
  StepResult step(const std::vector<int>& actions);

  std::vector<double> global_state() const;
  std::vector<std::vector<double>> observations() const;

  const WorldState& world() const { return world_; }
  const std::vector<LinkReport>& links() const { return links_; }
  const ScenarioConfig& config() const { return cfg_; }
  bool done() const { return world_.step_index >= cfg_.horizon_steps; }

  // Overrides UAV positions (for externally computed placements) and
  // re-evaluates links. Positions must already satisfy C1-C3.
  void set_uav_positions(const std::vector<Vec3>& pos);

  int obs_dim() const { return 3 + 3 * cfg_.k_neighbors + 3 * cfg_.l_users + 1; }
  int global_dim() const { return 3 * cfg_.n_uavs + (cfg_.n_uavs + 1) + 16 + 1; }

  // when set, step() appends one row per UAV per step
  void set_trace(std::vector<TraceRow>* sink) { trace_ = sink; }

 private:
  void check_invariants() const;

  ScenarioConfig cfg_;
  PhaseParams params_;
  WorldState world_;
  std::vector<LinkReport> links_;
  std::vector<TraceRow>* trace_ = nullptr;
};

}  // namespace aeroswarm
