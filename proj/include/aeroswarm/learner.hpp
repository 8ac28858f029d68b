#pragma once
// Multi-agent PPO with a shared-parameter actor (one-hot agent id appended to
// the observation), a centralized critic on the global state, GAE, and the
// running reward normalizer. Checkpoints capture everything needed to resume
// a run bit-for-bit.

#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "aeroswarm/env.hpp"
#include "aeroswarm/metrics.hpp"
#include "aeroswarm/mlp.hpp"
#include "aeroswarm/reward.hpp"
#include "aeroswarm/scenario.hpp"

namespace aeroswarm {

struct GaeResult {
  std::vector<double> advantages;
  std::vector<double> targets;  // advantage + value
};

// Backward recursion over one reward/value sequence; `bootstrap` is the value
// estimate of the state after the last step (horizon cut).
GaeResult gae(const std::vector<double>& rewards,
              const std::vector<double>& values, double bootstrap, double gamma,
              double lambda);

struct RolloutBuffer {
  int n_agents = 0;
  std::vector<std::vector<std::vector<double>>> obs;  // [t][agent] actor input
  std::vector<std::vector<double>> gstate;            // [t]
  std::vector<std::vector<int>> actions;              // [t][agent]
  std::vector<std::vector<double>> logp;              // [t][agent]
  std::vector<double> values;                         // [t], V(s_t)
  std::vector<std::vector<double>> rewards;           // [t][agent], scalarized
  double bootstrap_value = 0.0;

  int steps() const { return static_cast<int>(values.size()); }
};

struct LossStats {
  double surrogate_first = 0.0;  // clip objective, first minibatch, pre-update
  double ratio_first = 0.0;      // mean importance ratio there (1 on-policy)
  double actor_loss = 0.0;
  double value_loss = 0.0;
  double entropy = 0.0;
};

struct AdvantageTable {
  std::vector<std::vector<double>> advantages;  // [t][agent], standardized
  std::vector<std::vector<double>> targets;     // [t][agent], raw A + V
};

// Per-agent GAE over the shared value sequence, then standardization of the
// advantages over the whole buffer (population std + 1e-8). Targets are
// computed from the raw advantages, before standardization.
AdvantageTable prepare_advantages(const RolloutBuffer& buf,
                                  const ScenarioConfig& cfg);

struct BatchEval {
  double actor_loss = 0.0;  // -(surrogate + entropy_coef * entropy)
  double value_loss = 0.0;  // mean squared value error
  double surrogate = 0.0;   // mean clipped surrogate
  double ratio_mean = 0.0;  // mean importance ratio
  double entropy = 0.0;     // mean policy entropy
};

// Evaluates one minibatch of (t, agent) samples at the current parameters.
// When `gactor`/`gcritic` are non-null they must point at zero-filled buffers
// of param_count() doubles; the gradients of the minibatch-mean losses are
// accumulated into them. Null pointers skip the backward pass.
BatchEval ppo_batch(const RolloutBuffer& buf,
                    const std::vector<std::pair<int, int>>& batch,
                    const AdvantageTable& adv, const Mlp& actor,
                    const Mlp& critic, const ScenarioConfig& cfg,
                    double* gactor, double* gcritic);

// K epochs of shuffled minibatch clipped-surrogate updates; advantages are
// standardized over the whole buffer first.
LossStats ppo_update(const RolloutBuffer& buf, Mlp& actor, Mlp& critic,
                     AdamState& actor_adam, AdamState& critic_adam,
                     const ScenarioConfig& cfg, RandomStream& shuffle_rng);

struct PolicyEval {
  std::vector<double> probs;
  std::vector<double> logp;
};

PolicyEval policy_forward(const Mlp& actor, const std::vector<double>& input);

// CDF-walk categorical sample from one uniform draw
int sample_categorical(const std::vector<double>& probs, RandomStream& rng);

struct EpisodeStats {
  int episode = 0;
  Phase phase = Phase::urban;
  MetricFragment tail_metrics;  // means over the final 20% of steps
  double total_reward = 0.0;    // agent-mean scalar reward, same tail window
  LossStats losses;
};

class Trainer {
 public:
  explicit Trainer(const ScenarioConfig& cfg);

  using Hook = std::function<void(const EpisodeStats&)>;

  // Trains episodes [next_episode(), until), invoking hook after each.
  void run(int until, const Hook& hook);

  EpisodeStats run_episode();
  int next_episode() const { return episode_; }

  void save_checkpoint(const std::string& path) const;
  void load_checkpoint(const std::string& path);

  const NormalizerState& normalizer() const { return norm_; }
  const Mlp& actor() const { return actor_; }
  const Mlp& critic() const { return critic_; }
  const ScenarioConfig& config() const { return cfg_; }

  std::vector<double> actor_input(const std::vector<double>& obs,
                                  int agent) const;
  void set_trace(std::vector<TraceRow>* sink) { env_.set_trace(sink); }
  // argmax logits per agent, ties toward the lower action id
  std::vector<int> greedy_actions(
      const std::vector<std::vector<double>>& obs) const;

 private:
  ScenarioConfig cfg_;
  Env env_;
  Mlp actor_, critic_;
  AdamState actor_adam_, critic_adam_;
  NormalizerState norm_;
  int episode_ = 0;
};

}  // namespace aeroswarm
