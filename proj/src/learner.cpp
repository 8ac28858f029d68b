#include "aeroswarm/learner.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <stdexcept>

#include "aeroswarm/kernels.hpp"

namespace aeroswarm {

GaeResult gae(const std::vector<double>& rewards,
              const std::vector<double>& values, double bootstrap, double gamma,
              double lambda) {
  const std::size_t T = rewards.size();
  if (values.size() != T)
    throw std::invalid_argument("gae: rewards/values length mismatch");
  GaeResult out;
  out.advantages.resize(T);
  out.targets.resize(T);
  double acc = 0.0;
  for (std::size_t t = T; t-- > 0;) {
    const double v_next = (t + 1 < T) ? values[t + 1] : bootstrap;
    const double delta = rewards[t] + gamma * v_next - values[t];
    acc = delta + gamma * lambda * acc;
    out.advantages[t] = acc;
    out.targets[t] = acc + values[t];
  }
  return out;
}

PolicyEval policy_forward(const Mlp& actor, const std::vector<double>& input) {
  PolicyEval pe;
  std::vector<double> logits = actor.forward(input);
  softmax(logits, pe.probs, pe.logp);
  return pe;
}

int sample_categorical(const std::vector<double>& probs, RandomStream& rng) {
  const double u = rng.uniform01();
  double cdf = 0.0;
  for (std::size_t j = 0; j < probs.size(); ++j) {
    cdf += probs[j];
    if (u < cdf) return static_cast<int>(j);
  }
  return static_cast<int>(probs.size()) - 1;
}

AdvantageTable prepare_advantages(const RolloutBuffer& buf,
                                  const ScenarioConfig& cfg) {
  const int T = buf.steps();
  const int N = buf.n_agents;
  if (T == 0 || N == 0)
    throw std::invalid_argument("prepare_advantages: empty buffer");

  // per-agent GAE over the shared value sequence
  AdvantageTable out;
  out.advantages.assign(T, std::vector<double>(N));
  out.targets.assign(T, std::vector<double>(N));
  std::vector<double> seq(T);
  for (int i = 0; i < N; ++i) {
    for (int t = 0; t < T; ++t) seq[t] = buf.rewards[t][i];
    GaeResult g =
        gae(seq, buf.values, buf.bootstrap_value, cfg.gamma, cfg.gae_lambda);
    for (int t = 0; t < T; ++t) {
      out.advantages[t][i] = g.advantages[t];
      out.targets[t][i] = g.targets[t];
    }
  }

  // standardize advantages over the whole buffer
  double mean = 0.0;
  for (int t = 0; t < T; ++t)
    for (int i = 0; i < N; ++i) mean += out.advantages[t][i];
  mean /= static_cast<double>(T) * N;
  double var = 0.0;
  for (int t = 0; t < T; ++t)
    for (int i = 0; i < N; ++i)
      var += (out.advantages[t][i] - mean) * (out.advantages[t][i] - mean);
  var /= static_cast<double>(T) * N;
  const double denom = std::sqrt(var) + 1e-8;
  for (int t = 0; t < T; ++t)
    for (int i = 0; i < N; ++i)
      out.advantages[t][i] = (out.advantages[t][i] - mean) / denom;
  return out;
}

BatchEval ppo_batch(const RolloutBuffer& buf,
                    const std::vector<std::pair<int, int>>& batch,
                    const AdvantageTable& adv, const Mlp& actor,
                    const Mlp& critic, const ScenarioConfig& cfg,
                    double* gactor, double* gcritic) {
  if (batch.empty()) throw std::invalid_argument("ppo_batch: empty batch");
  const double bsz = static_cast<double>(batch.size());
  double b_surr = 0.0, b_ratio = 0.0, b_ent = 0.0, b_vloss = 0.0;
  for (const auto& [t, i] : batch) {
    Mlp::Trace tra;
    std::vector<double> logits = actor.forward_trace(buf.obs[t][i], tra);
    std::vector<double> p, lp;
    softmax(logits, p, lp);
    const int a = buf.actions[t][i];
    const double ratio = std::exp(lp[a] - buf.logp[t][i]);
    const double A = adv.advantages[t][i];
    const double t1 = ratio * A;
    const double lo = 1.0 - cfg.clip_eps, hi = 1.0 + cfg.clip_eps;
    const double t2 = std::clamp(ratio, lo, hi) * A;
    const double surr = std::min(t1, t2);
    const double H = entropy(p, lp);
    if (gactor) {
      // when the unclipped branch is active its gradient w.r.t. logits is
      // ratio*A*(1{j=a} - p_j); the clipped branch is constant in theta
      const double gsur = (t1 <= t2) ? ratio * A : 0.0;
      std::vector<double> dz(p.size());
      for (std::size_t j = 0; j < p.size(); ++j) {
        const double ind = (static_cast<int>(j) == a) ? 1.0 : 0.0;
        dz[j] =
            (-gsur * (ind - p[j]) + cfg.entropy_coef * p[j] * (lp[j] + H)) /
            bsz;
      }
      actor.backward(tra, dz, gactor);
    }

    Mlp::Trace trc;
    const double v = critic.forward_trace(buf.gstate[t], trc)[0];
    const double diff = v - adv.targets[t][i];
    b_vloss += diff * diff;
    if (gcritic) {
      std::vector<double> dv{2.0 * diff / bsz};
      critic.backward(trc, dv, gcritic);
    }

    b_surr += surr;
    b_ratio += ratio;
    b_ent += H;
  }
  BatchEval be;
  be.surrogate = b_surr / bsz;
  be.ratio_mean = b_ratio / bsz;
  be.entropy = b_ent / bsz;
  be.value_loss = b_vloss / bsz;
  be.actor_loss = -(be.surrogate + cfg.entropy_coef * be.entropy);
  return be;
}

LossStats ppo_update(const RolloutBuffer& buf, Mlp& actor, Mlp& critic,
                     AdamState& actor_adam, AdamState& critic_adam,
                     const ScenarioConfig& cfg, RandomStream& shuffle_rng) {
  const int T = buf.steps();
  const int N = buf.n_agents;
  if (T == 0 || N == 0) throw std::invalid_argument("ppo_update: empty buffer");

  const AdvantageTable adv = prepare_advantages(buf, cfg);

  std::vector<std::pair<int, int>> idx;
  idx.reserve(static_cast<std::size_t>(T) * N);
  for (int t = 0; t < T; ++t)
    for (int i = 0; i < N; ++i) idx.emplace_back(t, i);

  const std::size_t mb =
      std::min<std::size_t>(static_cast<std::size_t>(cfg.minibatch),
                            idx.size());
  std::vector<double> ga(actor.param_count());
  std::vector<double> gc(critic.param_count());
  std::vector<std::pair<int, int>> batch;
  batch.reserve(mb);
  LossStats ls;
  bool first = true;
  int batches = 0;

  for (int epoch = 0; epoch < cfg.k_opt; ++epoch) {
    shuffle_rng.shuffle(idx);
    for (std::size_t start = 0; start < idx.size(); start += mb) {
      const std::size_t stop = std::min(start + mb, idx.size());
      batch.assign(idx.begin() + static_cast<std::ptrdiff_t>(start),
                   idx.begin() + static_cast<std::ptrdiff_t>(stop));
      std::fill(ga.begin(), ga.end(), 0.0);
      std::fill(gc.begin(), gc.end(), 0.0);
      const BatchEval be =
          ppo_batch(buf, batch, adv, actor, critic, cfg, ga.data(), gc.data());
      if (first) {
        ls.surrogate_first = be.surrogate;
        ls.ratio_first = be.ratio_mean;
        first = false;
      }
      clip_grad_norm(ga, cfg.grad_clip);
      clip_grad_norm(gc, cfg.grad_clip);
      actor_adam.step(actor.data(), ga.data(), ga.size(), cfg.actor_lr);
      critic_adam.step(critic.data(), gc.data(), gc.size(), cfg.critic_lr);
      ls.actor_loss += be.actor_loss;
      ls.value_loss += be.value_loss;
      ls.entropy += be.entropy;
      ++batches;
    }
  }
  ls.actor_loss /= batches;
  ls.value_loss /= batches;
  ls.entropy /= batches;
  if (!std::isfinite(ls.actor_loss) || !std::isfinite(ls.value_loss))
    throw std::runtime_error("ppo_update produced non-finite loss");
  return ls;
}

namespace {

std::vector<int> mlp_dims(int in, const std::vector<int>& hidden, int out) {
  std::vector<int> dims;
  dims.push_back(in);
  dims.insert(dims.end(), hidden.begin(), hidden.end());
  dims.push_back(out);
  return dims;
}

}  // namespace

Trainer::Trainer(const ScenarioConfig& cfg) : cfg_(cfg), env_(cfg) {
  actor_ = Mlp(mlp_dims(env_.obs_dim() + cfg_.n_uavs, cfg_.actor_hidden,
                        kNumActions));
  critic_ = Mlp(mlp_dims(env_.global_dim(), cfg_.critic_hidden, 1));
  RandomStream ra(cfg_.seed, "init_actor", 0);
  RandomStream rc(cfg_.seed, "init_critic", 0);
  actor_.init(ra);
  critic_.init(rc);
  actor_adam_.init(actor_.param_count());
  critic_adam_.init(critic_.param_count());
  norm_ = make_normalizer(cfg_);
}

std::vector<double> Trainer::actor_input(const std::vector<double>& obs,
                                         int agent) const {
  std::vector<double> in = obs;
  in.resize(obs.size() + cfg_.n_uavs, 0.0);
  in[obs.size() + agent] = 1.0;
  return in;
}

std::vector<int> Trainer::greedy_actions(
    const std::vector<std::vector<double>>& obs) const {
  std::vector<int> acts(obs.size());
  for (std::size_t i = 0; i < obs.size(); ++i) {
    std::vector<double> logits =
        actor_.forward(actor_input(obs[i], static_cast<int>(i)));
    int best = 0;
    for (std::size_t j = 1; j < logits.size(); ++j)
      if (logits[j] > logits[best]) best = static_cast<int>(j);
    acts[i] = best;
  }
  return acts;
}

EpisodeStats Trainer::run_episode() {
  const int e = episode_;
  const int n = cfg_.n_uavs;
  const int T = cfg_.horizon_steps;
  std::vector<std::vector<double>> obs = env_.reset(e);
  RandomStream pol(cfg_.seed, "policy", static_cast<std::uint64_t>(e));
  const std::uint64_t actor_sum = actor_.checksum();

  RolloutBuffer buf;
  buf.n_agents = n;
  buf.obs.reserve(T);
  buf.gstate.reserve(T);
  buf.actions.reserve(T);
  buf.logp.reserve(T);
  buf.values.reserve(T);
  buf.rewards.reserve(T);

  std::vector<MetricFragment> frags;
  frags.reserve(T);
  std::vector<double> team_reward;
  team_reward.reserve(T);

  for (int t = 0; t < T; ++t) {
    std::vector<double> gs = env_.global_state();
    const double v = critic_.forward(gs)[0];
    std::vector<std::vector<double>> inputs(n);
    std::vector<int> acts(n);
    std::vector<double> logps(n);
    for (int i = 0; i < n; ++i) {
      inputs[i] = actor_input(obs[i], i);
      PolicyEval pe = policy_forward(actor_, inputs[i]);
      const int a = sample_categorical(pe.probs, pol);
      acts[i] = a;
      logps[i] = pe.logp[a];
    }
    Env::StepResult sr = env_.step(acts);

    std::array<double, 5> normed = normalize_components(sr.rewards[0], norm_);
    std::vector<double> r(n);
    double r_mean = 0.0;
    for (int i = 0; i < n; ++i) {
      r[i] = scalarize(normed, sr.rewards[i].collided, cfg_);
      r_mean += r[i];
    }
    r_mean /= n;

    buf.obs.push_back(std::move(inputs));
    buf.gstate.push_back(std::move(gs));
    buf.actions.push_back(std::move(acts));
    buf.logp.push_back(std::move(logps));
    buf.values.push_back(v);
    buf.rewards.push_back(std::move(r));

    frags.push_back(compute_metrics(env_.links(), cfg_));
    team_reward.push_back(r_mean);
    obs = std::move(sr.observations);
  }
  buf.bootstrap_value = critic_.forward(env_.global_state())[0];

  if (actor_.checksum() != actor_sum)
    throw std::logic_error("actor parameters changed during rollout");

  const int tail = std::max(1, T / 5);
  EpisodeStats st;
  st.episode = e;
  st.phase = phase_for_episode(cfg_, e);
  st.tail_metrics = mean_fragment(
      std::vector<MetricFragment>(frags.end() - tail, frags.end()));
  double tr = 0.0;
  for (int t = T - tail; t < T; ++t) tr += team_reward[t];
  st.total_reward = tr / tail;

  RandomStream shuf(cfg_.seed, "shuffle", static_cast<std::uint64_t>(e));
  st.losses = ppo_update(buf, actor_, critic_, actor_adam_, critic_adam_, cfg_,
                         shuf);
  ++episode_;
  return st;
}

void Trainer::run(int until, const Hook& hook) {
  while (episode_ < until) {
    EpisodeStats st = run_episode();
    if (hook) hook(st);
  }
}

namespace {

constexpr std::uint64_t kCheckpointMagic = 0x41535743'4b303031ull;  // ASWCK001

void put_u64(std::ofstream& f, std::uint64_t v) {
  f.write(reinterpret_cast<const char*>(&v), sizeof(v));
}
void put_f64s(std::ofstream& f, const double* p, std::size_t n) {
  f.write(reinterpret_cast<const char*>(p), sizeof(double) * n);
}
std::uint64_t get_u64(std::ifstream& f) {
  std::uint64_t v = 0;
  f.read(reinterpret_cast<char*>(&v), sizeof(v));
  return v;
}
void get_f64s(std::ifstream& f, double* p, std::size_t n) {
  f.read(reinterpret_cast<char*>(p), sizeof(double) * n);
}

void put_adam(std::ofstream& f, const AdamState& a) {
  put_u64(f, static_cast<std::uint64_t>(a.t));
  put_u64(f, a.m.size());
  put_f64s(f, a.m.data(), a.m.size());
  put_f64s(f, a.v.data(), a.v.size());
}

void get_adam(std::ifstream& f, AdamState& a, std::size_t expect) {
  a.t = static_cast<long long>(get_u64(f));
  const std::size_t n = get_u64(f);
  if (n != expect) throw std::runtime_error("checkpoint layout mismatch");
  a.m.resize(n);
  a.v.resize(n);
  get_f64s(f, a.m.data(), n);
  get_f64s(f, a.v.data(), n);
}

}  // namespace

void Trainer::save_checkpoint(const std::string& path) const {
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw std::runtime_error("cannot write checkpoint: " + path);
  put_u64(f, kCheckpointMagic);
  for (const Mlp* net : {&actor_, &critic_}) {
    put_u64(f, net->dims().size());
    for (int d : net->dims()) put_u64(f, static_cast<std::uint64_t>(d));
    put_u64(f, net->param_count());
    put_f64s(f, net->data(), net->param_count());
  }
  put_adam(f, actor_adam_);
  put_adam(f, critic_adam_);
  for (int k = 0; k < 5; ++k) {
    put_u64(f, static_cast<std::uint64_t>(norm_.n[k]));
    put_f64s(f, &norm_.mean[k], 1);
    put_f64s(f, &norm_.m2[k], 1);
  }
  put_u64(f, static_cast<std::uint64_t>(norm_.warmup_min));
  put_f64s(f, &norm_.epsilon, 1);
  put_u64(f, static_cast<std::uint64_t>(episode_));
  if (!f) throw std::runtime_error("short write on checkpoint: " + path);
}

void Trainer::load_checkpoint(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open checkpoint: " + path);
  if (get_u64(f) != kCheckpointMagic)
    throw std::runtime_error("checkpoint version mismatch: " + path);
  for (Mlp* net : {&actor_, &critic_}) {
    const std::size_t nd = get_u64(f);
    std::vector<int> dims(nd);
    for (std::size_t i = 0; i < nd; ++i)
      dims[i] = static_cast<int>(get_u64(f));
    if (dims != net->dims())
      throw std::runtime_error("checkpoint layout mismatch: " + path);
    const std::size_t np = get_u64(f);
    if (np != net->param_count())
      throw std::runtime_error("checkpoint layout mismatch: " + path);
    get_f64s(f, net->data(), np);
  }
  get_adam(f, actor_adam_, actor_.param_count());
  get_adam(f, critic_adam_, critic_.param_count());
  for (int k = 0; k < 5; ++k) {
    norm_.n[k] = static_cast<long long>(get_u64(f));
    get_f64s(f, &norm_.mean[k], 1);
    get_f64s(f, &norm_.m2[k], 1);
  }
  norm_.warmup_min = static_cast<int>(get_u64(f));
  get_f64s(f, &norm_.epsilon, 1);
  episode_ = static_cast<int>(get_u64(f));
  if (!f) throw std::runtime_error("truncated checkpoint: " + path);
}

}  // namespace aeroswarm
