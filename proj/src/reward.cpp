#include "aeroswarm/reward.hpp"

#include <algorithm>
#include <cmath>

namespace aeroswarm {

NormalizerState make_normalizer(const ScenarioConfig& cfg) {
  NormalizerState norm;
  norm.warmup_min = cfg.warmup_min;
  norm.epsilon = cfg.norm_epsilon;
  return norm;
}

double jain_index(const std::vector<double>& xs) {
  double sum = 0, sumsq = 0;
  for (double x : xs) {
    sum += x;
    sumsq += x * x;
  }
  if (sumsq == 0) return 0.0;
  return sum * sum / (static_cast<double>(xs.size()) * sumsq);
}

RewardVector compute_raw(const std::vector<LinkReport>& links,
                         const WorldState& world, const ScenarioConfig& cfg) {
  const int n = static_cast<int>(world.uav_pos.size());
  const int m = static_cast<int>(links.size());
  RewardVector r;

  std::vector<double> rates(m);
  double total_bps = 0;
  double min_rate = links.empty() ? 0.0 : links[0].rate_bps;
  int covered = 0;
  for (int u = 0; u < m; ++u) {
    rates[u] = links[u].rate_bps;
    total_bps += rates[u];
    min_rate = std::min(min_rate, rates[u]);
    if (rates[u] >= cfg.rate_threshold_bps) covered++;
  }

  // radiated power of the whole two-tier network, in watts
  const double power_w =
      (n * dbm_to_mw(cfg.p_uav_dbm) + dbm_to_mw(cfg.p_gbs_dbm)) / 1000.0;
  r.r_ee = (total_bps / 1e6) / power_w;
  r.r_fair = jain_index(rates);

  const auto counts = association_counts(links, n);
  double mean = 0;
  for (int k = 1; k <= n; ++k) mean += counts[k];
  mean /= n;
  double var = 0;
  for (int k = 1; k <= n; ++k) {
    const double d = counts[k] - mean;
    var += d * d;
  }
  const double denom = std::max(1.0, static_cast<double>(m) / n);
  r.r_load = -std::sqrt(var / n) / denom;

  r.r_cov = static_cast<double>(covered) / m;
  r.r_qos = -std::max(0.0, (cfg.rate_threshold_bps - min_rate) /
                               cfg.rate_threshold_bps);
  return r;
}

std::array<double, 5> normalize_components(const RewardVector& raw,
                                           NormalizerState& norm) {
  const auto comps = raw.components();
  std::array<double, 5> out{};
  for (int k = 0; k < 5; ++k) {
    // update first (streaming moments), then normalize the current sample
    norm.n[k]++;
    const double delta = comps[k] - norm.mean[k];
    norm.mean[k] += delta / static_cast<double>(norm.n[k]);
    norm.m2[k] += delta * (comps[k] - norm.mean[k]);
    if (norm.n[k] < norm.warmup_min) {
      out[k] = comps[k];
    } else {
      out[k] = (comps[k] - norm.mean[k]) / (norm.sigma(k) + norm.epsilon);
    }
  }
  return out;
}

double scalarize(const std::array<double, 5>& normed, bool collided,
                 const ScenarioConfig& cfg) {
  const double w[5] = {cfg.w_ee, cfg.w_fair, cfg.w_load, cfg.w_cov, cfg.w_qos};
  double total = 0;
  for (int k = 0; k < 5; ++k) total += w[k] * normed[k];
  if (collided) total -= cfg.collision_penalty_eta;
  return total;
}

double normalize_and_scalarize(const RewardVector& raw, NormalizerState& norm,
                               const ScenarioConfig& cfg) {
  return scalarize(normalize_components(raw, norm), raw.collided, cfg);
}

double scalarize_readonly(const RewardVector& raw, const NormalizerState& norm,
                          const ScenarioConfig& cfg) {
  const auto comps = raw.components();
  std::array<double, 5> out{};
  for (int k = 0; k < 5; ++k) {
    if (norm.n[k] < norm.warmup_min) {
      out[k] = comps[k];
    } else {
      out[k] = (comps[k] - norm.mean[k]) / (norm.sigma(k) + norm.epsilon);
    }
  }
  return scalarize(out, raw.collided, cfg);
}

}  // namespace aeroswarm
