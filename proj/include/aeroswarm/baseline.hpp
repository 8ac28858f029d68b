#pragma once
// Non-learning controls: k-means placement (static) and the uniform-random
// walker, both scored through the same link model as the trainer.

#include <vector>

#include "aeroswarm/geom.hpp"
#include "aeroswarm/rng.hpp"
#include "aeroswarm/scenario.hpp"

namespace aeroswarm {

struct PlacementSolution {
  std::vector<Vec3> uav_pos;
  double wcss = 0.0;  // within-cluster sum of squared 2D distances
};

// Lloyd's algorithm with 20 seeded restarts (centroids initialized on
// distinct user points), then a per-UAV altitude scan against the link model
// with shadowing zeroed, then a minimum-separation repair sweep. The result
// satisfies the altitude, area, and separation constraints.
PlacementSolution kmeans_place(const std::vector<Vec2>& users,
                               const ScenarioConfig& cfg, RandomStream& rng);

// one uniform action id per agent
std::vector<int> random_actions(int n_agents, RandomStream& rng);

}  // namespace aeroswarm
