#pragma once
// World configuration, the three spatial user samplers, and the task-chain
// schedule that swaps distributions at episode boundaries.

#include <cstdint>
#include <string>
#include <vector>

#include "aeroswarm/geom.hpp"
#include "aeroswarm/rng.hpp"

namespace aeroswarm {

enum class Phase { urban, suburban, rural };

const char* phase_name(Phase p);
Phase phase_from_name(const std::string& s);  // throws on unknown name

struct PhaseEntry {
  Phase phase;
  int episodes;
};

struct ScenarioConfig {
  // [scenario]
  double area_side_m = 2000.0;
  int n_uavs = 4;
  int users_urban = 140;
  int users_suburban = 90;
  int users_rural = 40;
  double h_min_m = 80.0;
  double h_max_m = 120.0;
  double d_min_m = 100.0;
  std::vector<PhaseEntry> phase_schedule = {{Phase::urban, 700},
                                            {Phase::suburban, 700},
                                            {Phase::rural, 700}};
  std::uint64_t seed = 1;
  int urban_clusters = 3;
  double urban_sigma_m = 120.0;
  double suburban_alpha = 0.3;
  int suburban_clusters = 2;
  double suburban_std_m = 200.0;

  // [channel]
  double carrier_hz = 2e9;
  double bandwidth_hz = 20e6;
  double noise_dbm_per_hz = -174.0;
  double p_uav_dbm = 23.0;
  double p_gbs_dbm = 43.0;
  double g_uav_dbi = 2.0;
  double g_gbs_dbi = 15.0;
  double gbs_x_m = 1000.0;
  double gbs_y_m = 1000.0;
  double gbs_h_m = 25.0;
  double a_env = 9.61;
  double b_env = 0.16;
  double eta_los_db = 1.0;
  double eta_nlos_db = 20.0;
  double kappa_gbs = 3.8;
  double d0_m = 100.0;
  double shadow_sigma_db = 8.0;
  double rate_threshold_bps = 1e6;

  // [env]
  double step_xy_m = 50.0;
  double step_z_m = 10.0;
  int horizon_steps = 200;
  int k_neighbors = 3;
  int l_users = 10;

  // [reward]
  double w_ee = 1.0, w_fair = 1.0, w_load = 1.0, w_cov = 1.0, w_qos = 1.0;
  double collision_penalty_eta = 5.0;
  int warmup_min = 100;
  double norm_epsilon = 1e-8;

  // [learner]
  double actor_lr = 5e-4;
  double critic_lr = 1e-3;
  double gamma = 0.99;
  double gae_lambda = 0.95;
  double clip_eps = 0.2;
  int minibatch = 64;
  int k_opt = 4;
  double entropy_coef = 0.01;
  double grad_clip = 0.5;
  std::vector<int> actor_hidden = {64, 64};
  std::vector<int> critic_hidden = {128, 128};
  int checkpoint_every = 50;

  int users_for(Phase p) const {
    switch (p) {
      case Phase::urban: return users_urban;
      case Phase::suburban: return users_suburban;
      default: return users_rural;
    }
  }
  int total_episodes() const;
};

struct UserField {
  std::vector<Vec2> positions;
  Phase phase_id = Phase::urban;
};

struct GaussComponent {
  double mean_x = 0, mean_y = 0;
  double sxx = 1, sxy = 0, syy = 1;  // covariance, must be SPD
  double weight = 1;
};

struct PhaseParams {
  int urban_k = 3;
  double urban_sigma_m = 120.0;
  double suburban_alpha = 0.3;
  std::vector<GaussComponent> suburban_mix;
};

// PhaseParams implied by the flat config: suburban components placed evenly
// on the area diagonal with isotropic spread, equal weights.
PhaseParams default_phase_params(const ScenarioConfig& cfg);

UserField sample_urban(const ScenarioConfig& cfg, const PhaseParams& params,
                       RandomStream& rng);
UserField sample_suburban(const ScenarioConfig& cfg, const PhaseParams& params,
                          RandomStream& rng);
UserField sample_rural(const ScenarioConfig& cfg, RandomStream& rng);
UserField sample_phase(const ScenarioConfig& cfg, const PhaseParams& params,
                       Phase phase, RandomStream& rng);

Phase phase_for_episode(const ScenarioConfig& cfg, int episode_index);

// Flat key=value config file with [sections]; unknown sections or keys are
// hard errors. Environment variables AEROSWARM_<UPPERCASED_KEY> override any
// key after the file is applied.
ScenarioConfig load_config(const std::string& path);
void apply_env_overrides(ScenarioConfig& cfg);
std::string config_to_string(const ScenarioConfig& cfg);
void save_config(const ScenarioConfig& cfg, const std::string& path);
void validate_config(const ScenarioConfig& cfg);  // throws on bad invariants

}  // namespace aeroswarm
