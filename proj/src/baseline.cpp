#include "aeroswarm/baseline.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "aeroswarm/channel.hpp"
#include "aeroswarm/env.hpp"
#include "aeroswarm/kernels.hpp"
#include "aeroswarm/world.hpp"

namespace aeroswarm {

namespace {

constexpr int kRestarts = 20;
constexpr int kLloydIters = 100;
constexpr int kRepairSweeps = 100;

struct LloydResult {
  std::vector<Vec2> centroids;
  double wcss = 0.0;
};

LloydResult lloyd_once(const std::vector<Vec2>& users, int k, double side,
                       RandomStream& rng) {
  const std::size_t m = users.size();
  LloydResult res;
  res.centroids.resize(k);

  // init on distinct user points; fall back to uniform draws if k > m
  std::vector<std::size_t> order(m);
  for (std::size_t i = 0; i < m; ++i) order[i] = i;
  rng.shuffle(order);
  for (int c = 0; c < k; ++c) {
    if (static_cast<std::size_t>(c) < m)
      res.centroids[c] = users[order[c]];
    else
      res.centroids[c] = {rng.uniform(0.0, side), rng.uniform(0.0, side)};
  }

  std::vector<double> ux(m), uy(m);
  for (std::size_t i = 0; i < m; ++i) {
    ux[i] = users[i].x;
    uy[i] = users[i].y;
  }
  std::vector<double> d2(m);
  std::vector<double> best(m);
  std::vector<int> assign(m, 0);

  for (int iter = 0; iter < kLloydIters; ++iter) {
    std::fill(best.begin(), best.end(),
              std::numeric_limits<double>::infinity());
    for (int c = 0; c < k; ++c) {
      kern::sq_dist2(ux.data(), uy.data(), res.centroids[c].x,
                     res.centroids[c].y, d2.data(), m);
      for (std::size_t i = 0; i < m; ++i)
        if (d2[i] < best[i]) {  // strict: ties stay with the lower id
          best[i] = d2[i];
          assign[i] = c;
        }
    }
    std::vector<Vec2> next(k, {0.0, 0.0});
    std::vector<int> counts(k, 0);
    for (std::size_t i = 0; i < m; ++i) {
      next[assign[i]].x += users[i].x;
      next[assign[i]].y += users[i].y;
      ++counts[assign[i]];
    }
    bool moved = false;
    for (int c = 0; c < k; ++c) {
      if (counts[c] == 0) continue;  // empty cluster keeps its centroid
      next[c].x /= counts[c];
      next[c].y /= counts[c];
      if (next[c].x != res.centroids[c].x || next[c].y != res.centroids[c].y)
        moved = true;
      res.centroids[c] = next[c];
    }
    if (!moved) break;
  }

  std::fill(best.begin(), best.end(), std::numeric_limits<double>::infinity());
  for (int c = 0; c < k; ++c) {
    kern::sq_dist2(ux.data(), uy.data(), res.centroids[c].x, res.centroids[c].y,
                   d2.data(), m);
    for (std::size_t i = 0; i < m; ++i) best[i] = std::min(best[i], d2[i]);
  }
  res.wcss = kern::reduce_sum(best.data(), m);
  return res;
}

std::vector<double> altitude_candidates(const ScenarioConfig& cfg) {
  std::vector<double> cands;
  for (double h : {80.0, 90.0, 100.0, 110.0, 120.0})
    cands.push_back(std::clamp(h, cfg.h_min_m, cfg.h_max_m));
  std::sort(cands.begin(), cands.end());
  cands.erase(std::unique(cands.begin(), cands.end()), cands.end());
  return cands;
}

int covered_by(const std::vector<LinkReport>& links, int uav_id,
               double rate_threshold) {
  int covered = 0;
  for (const LinkReport& l : links)
    if (l.serving_node == uav_id + 1 && l.rate_bps >= rate_threshold)
      ++covered;
  return covered;
}

}  // namespace

PlacementSolution kmeans_place(const std::vector<Vec2>& users,
                               const ScenarioConfig& cfg, RandomStream& rng) {
  if (users.empty()) throw std::invalid_argument("kmeans_place: no users");
  const int n = cfg.n_uavs;

  LloydResult best;
  best.wcss = std::numeric_limits<double>::infinity();
  for (int r = 0; r < kRestarts; ++r) {
    LloydResult cand = lloyd_once(users, n, cfg.area_side_m, rng);
    if (cand.wcss < best.wcss) best = cand;
  }

  PlacementSolution sol;
  sol.wcss = best.wcss;
  sol.uav_pos.resize(n);
  for (int i = 0; i < n; ++i)
    sol.uav_pos[i] = {best.centroids[i].x, best.centroids[i].y, cfg.h_min_m};

  // per-UAV altitude scan against the interference-aware link model
  WorldState world;
  world.users.positions = users;
  world.shadow_table.assign(users.size() * (n + 1), 0.0);
  const std::vector<double> cands = altitude_candidates(cfg);
  for (int i = 0; i < n; ++i) {
    double best_h = sol.uav_pos[i].z;
    int best_cov = -1;
    for (double h : cands) {
      world.uav_pos = sol.uav_pos;
      world.uav_pos[i].z = h;
      const int cov = covered_by(evaluate_links(world, cfg), i,
                                 cfg.rate_threshold_bps);
      if (cov > best_cov) {  // strict: ties keep the lower altitude
        best_cov = cov;
        best_h = h;
      }
    }
    sol.uav_pos[i].z = best_h;
  }

  // separation repair: the lower id holds, the higher id is pushed out
  for (int sweep = 0;; ++sweep) {
    bool violated = false;
    for (int i = 0; i < n; ++i) {
      for (int j = i + 1; j < n; ++j) {
        if (dist3d(sol.uav_pos[i], sol.uav_pos[j]) >= cfg.d_min_m) continue;
        violated = true;
        const double dz = sol.uav_pos[j].z - sol.uav_pos[i].z;
        const double target = cfg.d_min_m * (1.0 + 1e-7);
        const double need_xy = std::sqrt(target * target - dz * dz);
        double dx = sol.uav_pos[j].x - sol.uav_pos[i].x;
        double dy = sol.uav_pos[j].y - sol.uav_pos[i].y;
        const double xy = std::hypot(dx, dy);
        if (xy == 0.0) {
          dx = 1.0;
          dy = 0.0;
        } else {
          dx /= xy;
          dy /= xy;
        }
        sol.uav_pos[j].x =
            std::clamp(sol.uav_pos[i].x + dx * need_xy, 0.0, cfg.area_side_m);
        sol.uav_pos[j].y =
            std::clamp(sol.uav_pos[i].y + dy * need_xy, 0.0, cfg.area_side_m);
      }
    }
    if (!violated) break;
    if (sweep >= kRepairSweeps)
      throw std::runtime_error(
          "kmeans_place: cannot satisfy the separation constraint");
  }
  return sol;
}

std::vector<int> random_actions(int n_agents, RandomStream& rng) {
  std::vector<int> acts(n_agents);
  for (int i = 0; i < n_agents; ++i)
    acts[i] = static_cast<int>(rng.uniform_int(kNumActions));
  return acts;
}

}  // namespace aeroswarm
