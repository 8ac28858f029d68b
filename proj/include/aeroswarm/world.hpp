#pragma once

#include <vector>

#include "aeroswarm/geom.hpp"
#include "aeroswarm/scenario.hpp"

namespace aeroswarm {

// Committed simulation state. Node ids: 0 = GBS, 1..N = UAVs.
struct WorldState {
  std::vector<Vec3> uav_pos;
  UserField users;
  // per (user, node) frozen shadowing in dB, row-major M x (N+1); only the
  // GBS column is populated — the air-to-ground model carries no shadowing
  std::vector<double> shadow_table;
  int step_index = 0;
  Phase phase_id = Phase::urban;
  int episode_index = 0;

  double shadow_db(int user, int node) const {
    return shadow_table[static_cast<std::size_t>(user) *
                            (uav_pos.size() + 1) +
                        static_cast<std::size_t>(node)];
  }
};

}  // namespace aeroswarm
