#include "aeroswarm/env.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace aeroswarm {

Env::Env(const ScenarioConfig& cfg) : cfg_(cfg) {
  validate_config(cfg_);
  params_ = default_phase_params(cfg_);
}

std::vector<std::vector<double>> Env::reset(int episode_index) {
  if (episode_index < 0) throw std::runtime_error("reset: episode_index < 0");
  const Phase phase = phase_for_episode(cfg_, episode_index);

  world_ = WorldState{};
  world_.phase_id = phase;
  world_.episode_index = episode_index;

  RandomStream users_rng(cfg_.seed, "users",
                         static_cast<std::uint64_t>(episode_index));
  world_.users = sample_phase(cfg_, params_, phase, users_rng);

  const int m = static_cast<int>(world_.users.positions.size());
  const int nodes = cfg_.n_uavs + 1;
  world_.shadow_table.assign(static_cast<std::size_t>(m) * nodes, 0.0);
  RandomStream shadow_rng(cfg_.seed, "shadow",
                          static_cast<std::uint64_t>(episode_index));
  for (int u = 0; u < m; ++u)
    world_.shadow_table[static_cast<std::size_t>(u) * nodes] =
        shadow_rng.normal(0.0, cfg_.shadow_sigma_db);

  // seeded-uniform layout with pairwise separation (C3) rejection
  RandomStream layout_rng(cfg_.seed, "layout",
                          static_cast<std::uint64_t>(episode_index));
  world_.uav_pos.clear();
  int attempts = 0;
  while (static_cast<int>(world_.uav_pos.size()) < cfg_.n_uavs) {
    if (++attempts > 10000)
      throw std::runtime_error(
          "reset: no C3-feasible initial layout in 10000 attempts");
    Vec3 cand{layout_rng.uniform(0, cfg_.area_side_m),
              layout_rng.uniform(0, cfg_.area_side_m),
              layout_rng.uniform(cfg_.h_min_m, cfg_.h_max_m)};
    bool ok = true;
    for (const auto& p : world_.uav_pos)
      if (dist3d(cand, p) < cfg_.d_min_m) {
        ok = false;
        break;
      }
    if (ok) world_.uav_pos.push_back(cand);
  }

  world_.step_index = 0;
  links_ = evaluate_links(world_, cfg_);
  check_invariants();
  return observations();
}

Env::StepResult Env::step(const std::vector<int>& actions) {
  const int n = cfg_.n_uavs;
  if (static_cast<int>(actions.size()) != n)
    throw std::runtime_error("step: wrong joint-action size");
  for (int a : actions)
    if (a < 0 || a >= kNumActions)
      throw std::runtime_error("step: action index out of range");
  if (done()) throw std::runtime_error("step: episode already finished");

  const std::vector<Vec3> prev = world_.uav_pos;
  std::vector<Vec3> pos = prev;
  for (int i = 0; i < n; ++i) {
    switch (actions[i]) {
      case 0: pos[i].x += cfg_.step_xy_m; break;
      case 1: pos[i].x -= cfg_.step_xy_m; break;
      case 2: pos[i].y += cfg_.step_xy_m; break;
      case 3: pos[i].y -= cfg_.step_xy_m; break;
      case 4: pos[i].z += cfg_.step_z_m; break;
      case 5: pos[i].z -= cfg_.step_z_m; break;
      default: break;  // hover
    }
    pos[i].x = std::clamp(pos[i].x, 0.0, cfg_.area_side_m);  // C2
    pos[i].y = std::clamp(pos[i].y, 0.0, cfg_.area_side_m);
    pos[i].z = std::clamp(pos[i].z, cfg_.h_min_m, cfg_.h_max_m);  // C1
  }

  // C3 move-revert-penalize, iterated to a fixpoint: a revert can expose a
  // new conflict against the restored position, so re-check until clean.
  // Terminates because reverts only ever restore previous positions, and the
  // previous joint state satisfied C3.
  std::vector<bool> collided(n, false), reverted(n, false);
  bool changed = true;
  while (changed) {
    changed = false;
    for (int i = 0; i < n; ++i)
      for (int j = i + 1; j < n; ++j)
        if (dist3d(pos[i], pos[j]) < cfg_.d_min_m) {
          for (int who : {i, j}) {
            collided[who] = true;
            if (!reverted[who]) {
              pos[who] = prev[who];
              reverted[who] = true;
              changed = true;
            }
          }
        }
  }

  world_.uav_pos = pos;
  world_.step_index++;
  links_ = evaluate_links(world_, cfg_);
  check_invariants();

  StepResult out;
  out.done = done();
  out.observations = observations();
  const RewardVector team = compute_raw(links_, world_, cfg_);
  out.rewards.assign(n, team);
  for (int i = 0; i < n; ++i) out.rewards[i].collided = collided[i];

  if (trace_)
    for (int i = 0; i < n; ++i)
      trace_->push_back({world_.step_index, i, pos[i].x, pos[i].y, pos[i].z,
                         actions[i], collided[i]});
  return out;
}

std::vector<std::vector<double>> Env::observations() const {
  const int n = cfg_.n_uavs;
  const int m = static_cast<int>(world_.users.positions.size());
  const double side = cfg_.area_side_m;
  const double zrange = cfg_.h_max_m - cfg_.h_min_m;
  const auto counts = association_counts(links_, n);

  std::vector<std::vector<double>> all(n);
  for (int i = 0; i < n; ++i) {
    auto& obs = all[i];
    obs.reserve(obs_dim());
    const Vec3& me = world_.uav_pos[i];
    obs.push_back(me.x / side);
    obs.push_back(me.y / side);
    obs.push_back((me.z - cfg_.h_min_m) / zrange);

    // nearest neighbors by 3D distance, ties by id; zero-padded
    std::vector<int> others;
    for (int j = 0; j < n; ++j)
      if (j != i) others.push_back(j);
    std::sort(others.begin(), others.end(), [&](int a, int b) {
      const double da = dist3d(me, world_.uav_pos[a]);
      const double db = dist3d(me, world_.uav_pos[b]);
      return da != db ? da < db : a < b;
    });
    for (int k = 0; k < cfg_.k_neighbors; ++k) {
      if (k < static_cast<int>(others.size())) {
        const Vec3& p = world_.uav_pos[others[k]];
        obs.push_back((p.x - me.x) / side);
        obs.push_back((p.y - me.y) / side);
        obs.push_back((p.z - me.z) / side);
      } else {
        obs.insert(obs.end(), {0.0, 0.0, 0.0});
      }
    }

    // nearest users by horizontal distance, with a served-by-me flag
    std::vector<int> order(m);
    std::iota(order.begin(), order.end(), 0);
    std::vector<double> d2(m);
    for (int u = 0; u < m; ++u) {
      const Vec2& w = world_.users.positions[u];
      const double dx = w.x - me.x, dy = w.y - me.y;
      d2[u] = dx * dx + dy * dy;
    }
    const int l = std::min(cfg_.l_users, m);
    std::partial_sort(order.begin(), order.begin() + l, order.end(),
                      [&](int a, int b) {
                        return d2[a] != d2[b] ? d2[a] < d2[b] : a < b;
                      });
    for (int k = 0; k < cfg_.l_users; ++k) {
      if (k < l) {
        const int u = order[k];
        const Vec2& w = world_.users.positions[u];
        obs.push_back((w.x - me.x) / side);
        obs.push_back((w.y - me.y) / side);
        obs.push_back(links_[u].serving_node == i + 1 ? 1.0 : 0.0);
      } else {
        obs.insert(obs.end(), {0.0, 0.0, 0.0});
      }
    }

    obs.push_back(static_cast<double>(counts[i + 1]) / m);
  }
  return all;
}

std::vector<double> Env::global_state() const {
  const int n = cfg_.n_uavs;
  const int m = static_cast<int>(world_.users.positions.size());
  const double side = cfg_.area_side_m;
  const double zrange = cfg_.h_max_m - cfg_.h_min_m;

  std::vector<double> s;
  s.reserve(global_dim());
  for (const auto& p : world_.uav_pos) {
    s.push_back(p.x / side);
    s.push_back(p.y / side);
    s.push_back((p.z - cfg_.h_min_m) / zrange);
  }
  for (int c : association_counts(links_, n))
    s.push_back(static_cast<double>(c) / m);

  // 4x4 occupancy grid: user-order invariant and shape-stable across phases
  std::array<double, 16> grid{};
  for (const auto& w : world_.users.positions) {
    const int gx = std::min(3, static_cast<int>(w.x / side * 4.0));
    const int gy = std::min(3, static_cast<int>(w.y / side * 4.0));
    grid[gy * 4 + gx] += 1.0;
  }
  for (double g : grid) s.push_back(g / m);

  s.push_back(static_cast<double>(world_.step_index) / cfg_.horizon_steps);
  return s;
}

void Env::set_uav_positions(const std::vector<Vec3>& pos) {
  if (static_cast<int>(pos.size()) != cfg_.n_uavs)
    throw std::runtime_error("set_uav_positions: wrong count");
  world_.uav_pos = pos;
  links_ = evaluate_links(world_, cfg_);
  check_invariants();
}

void Env::check_invariants() const {
#ifndef NDEBUG
  for (const auto& p : world_.uav_pos) {
    assert(p.z >= cfg_.h_min_m && p.z <= cfg_.h_max_m);
    assert(p.x >= 0 && p.x <= cfg_.area_side_m);
    assert(p.y >= 0 && p.y <= cfg_.area_side_m);
  }
  for (std::size_t i = 0; i < world_.uav_pos.size(); ++i)
    for (std::size_t j = i + 1; j < world_.uav_pos.size(); ++j)
      assert(dist3d(world_.uav_pos[i], world_.uav_pos[j]) >= cfg_.d_min_m);
#endif
}

}  // namespace aeroswarm
