#pragma once
// The five raw reward components, and running z-score normalization with
// weighted scalarization of the team reward.

#include <array>
#include <vector>

#include "aeroswarm/channel.hpp"
#include "aeroswarm/scenario.hpp"
#include "aeroswarm/world.hpp"

namespace aeroswarm {

struct RewardVector {
  double r_ee = 0;    // Mbps per W
  double r_fair = 0;  // [0,1]
  double r_load = 0;  // <= 0, normalized association-count spread
  double r_cov = 0;   // [0,1]
  double r_qos = 0;   // <= 0, worst-user shortfall
  bool collided = false;

  std::array<double, 5> components() const {
    return {r_ee, r_fair, r_load, r_cov, r_qos};
  }
};

// Streaming moments per component. Statistics persist across episodes and
// phase transitions — resetting would re-inject the scale shock the
// normalization exists to absorb.
struct NormalizerState {
  std::array<long long, 5> n{};
  std::array<double, 5> mean{};
  std::array<double, 5> m2{};  // sum of squared deviations
  int warmup_min = 100;
  double epsilon = 1e-8;

  double sigma(int k) const {
    return n[k] > 0 ? std::sqrt(m2[k] / static_cast<double>(n[k])) : 0.0;
  }
};

NormalizerState make_normalizer(const ScenarioConfig& cfg);

double jain_index(const std::vector<double>& xs);  // 0 when all entries are 0

// Team reward, identical for every agent; `collided` is left false — the env
// stamps it per agent.
RewardVector compute_raw(const std::vector<LinkReport>& links,
                         const WorldState& world, const ScenarioConfig& cfg);

// Updates the streaming moments with the team vector (call once per step),
// returning the per-component normalized values: pass-through below warmup,
// z-score after.
std::array<double, 5> normalize_components(const RewardVector& raw,
                                           NormalizerState& norm);

// R_total = sum w_k * hr_k - eta * I_col
double scalarize(const std::array<double, 5>& normed, bool collided,
                 const ScenarioConfig& cfg);

// One-agent convenience matching the two calls above in order.
double normalize_and_scalarize(const RewardVector& raw, NormalizerState& norm,
                               const ScenarioConfig& cfg);

// Normalizes against the current statistics without updating them; used to
// score non-learning baselines on the same scale as the trainer.
double scalarize_readonly(const RewardVector& raw, const NormalizerState& norm,
                          const ScenarioConfig& cfg);

}  // namespace aeroswarm
