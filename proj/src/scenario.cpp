#include "aeroswarm/scenario.hpp"

#include <cctype>
#include <charconv>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <sstream>
#include <stdexcept>

namespace aeroswarm {

const char* phase_name(Phase p) {
  switch (p) {
    case Phase::urban: return "urban";
    case Phase::suburban: return "suburban";
    default: return "rural";
  }
}

Phase phase_from_name(const std::string& s) {
  if (s == "urban") return Phase::urban;
  if (s == "suburban") return Phase::suburban;
  if (s == "rural") return Phase::rural;
  throw std::runtime_error("unknown phase name: '" + s + "'");
}

int ScenarioConfig::total_episodes() const {
  int n = 0;
  for (const auto& e : phase_schedule) n += e.episodes;
  return n;
}

PhaseParams default_phase_params(const ScenarioConfig& cfg) {
  PhaseParams p;
  p.urban_k = cfg.urban_clusters;
  p.urban_sigma_m = cfg.urban_sigma_m;
  p.suburban_alpha = cfg.suburban_alpha;
  const int k = cfg.suburban_clusters;
  const double var = cfg.suburban_std_m * cfg.suburban_std_m;
  for (int i = 0; i < k; ++i) {
    GaussComponent g;
    const double frac = double(i + 1) / double(k + 1);  // spread on diagonal
    g.mean_x = frac * cfg.area_side_m;
    g.mean_y = frac * cfg.area_side_m;
    g.sxx = g.syy = var;
    g.sxy = 0;
    g.weight = 1.0 / k;
    p.suburban_mix.push_back(g);
  }
  return p;
}

namespace {

bool in_area(const ScenarioConfig& cfg, double x, double y) {
  return x >= 0 && x <= cfg.area_side_m && y >= 0 && y <= cfg.area_side_m;
}

constexpr int kMaxRejects = 10000;

}  // namespace

UserField sample_urban(const ScenarioConfig& cfg, const PhaseParams& params,
                       RandomStream& rng) {
  if (params.urban_k < 1) throw std::runtime_error("urban: k_clusters < 1");
  if (params.urban_sigma_m < 0)
    throw std::runtime_error("urban: sigma_u < 0");
  const double side = cfg.area_side_m;
  const double sig = params.urban_sigma_m;
  // clamp centers so a 2-sigma disk fits inside the area
  double lo = 2 * sig, hi = side - 2 * sig;
  if (lo > hi) lo = hi = side / 2;
  std::vector<Vec2> centers(params.urban_k);
  for (auto& c : centers) {
    c.x = rng.uniform(lo, hi);
    c.y = rng.uniform(lo, hi);
  }
  UserField field;
  field.phase_id = Phase::urban;
  const int m = cfg.users_for(Phase::urban);
  field.positions.reserve(m);
  for (int u = 0; u < m; ++u) {
    const auto& c = centers[rng.uniform_index(params.urban_k)];
    bool placed = false;
    for (int attempt = 0; attempt < kMaxRejects; ++attempt) {
      const double x = c.x + rng.normal(0, sig);
      const double y = c.y + rng.normal(0, sig);
      if (in_area(cfg, x, y)) {
        field.positions.push_back({x, y});
        placed = true;
        break;
      }
    }
    if (!placed)
      throw std::runtime_error(
          "urban sampler: rejection exceeded 10000 attempts (sigma_u too "
          "large for area)");
  }
  return field;
}

namespace {

// lower-triangular cholesky of a 2x2 SPD covariance
struct Chol2 {
  double l11, l21, l22;
};

Chol2 cholesky2(const GaussComponent& g) {
  if (g.sxx <= 0) throw std::runtime_error("suburban: covariance not SPD");
  Chol2 c;
  c.l11 = std::sqrt(g.sxx);
  c.l21 = g.sxy / c.l11;
  const double rest = g.syy - c.l21 * c.l21;
  if (rest <= 0) throw std::runtime_error("suburban: covariance not SPD");
  c.l22 = std::sqrt(rest);
  return c;
}

}  // namespace

UserField sample_suburban(const ScenarioConfig& cfg, const PhaseParams& params,
                          RandomStream& rng) {
  if (params.suburban_alpha < 0 || params.suburban_alpha > 1)
    throw std::runtime_error("suburban: alpha outside [0,1]");
  if (params.suburban_mix.empty())
    throw std::runtime_error("suburban: empty mixture");
  double wsum = 0;
  for (const auto& g : params.suburban_mix) {
    if (g.weight < 0) throw std::runtime_error("suburban: negative weight");
    wsum += g.weight;
  }
  if (std::fabs(wsum - 1.0) > 1e-9)
    throw std::runtime_error("suburban: weights do not sum to 1");
  std::vector<Chol2> chols;
  for (const auto& g : params.suburban_mix) chols.push_back(cholesky2(g));

  UserField field;
  field.phase_id = Phase::suburban;
  const int m = cfg.users_for(Phase::suburban);
  field.positions.reserve(m);
  const double side = cfg.area_side_m;
  for (int u = 0; u < m; ++u) {
    if (rng.uniform01() < params.suburban_alpha) {
      field.positions.push_back({rng.uniform(0, side), rng.uniform(0, side)});
      continue;
    }
    // pick a component by its weight, then reject into the area
    const double pick = rng.uniform01();
    std::size_t k = 0;
    double acc = 0;
    for (; k < params.suburban_mix.size(); ++k) {
      acc += params.suburban_mix[k].weight;
      if (pick < acc) break;
    }
    if (k == params.suburban_mix.size()) k--;  // pick==1 edge
    const auto& g = params.suburban_mix[k];
    const auto& c = chols[k];
    bool placed = false;
    for (int attempt = 0; attempt < kMaxRejects; ++attempt) {
      const double z1 = rng.normal(), z2 = rng.normal();
      const double x = g.mean_x + c.l11 * z1;
      const double y = g.mean_y + c.l21 * z1 + c.l22 * z2;
      if (in_area(cfg, x, y)) {
        field.positions.push_back({x, y});
        placed = true;
        break;
      }
    }
    if (!placed)
      throw std::runtime_error(
          "suburban sampler: rejection exceeded 10000 attempts");
  }
  return field;
}

UserField sample_rural(const ScenarioConfig& cfg, RandomStream& rng) {
  UserField field;
  field.phase_id = Phase::rural;
  const int m = cfg.users_for(Phase::rural);
  field.positions.reserve(m);
  const double side = cfg.area_side_m;
  for (int u = 0; u < m; ++u)
    field.positions.push_back({rng.uniform(0, side), rng.uniform(0, side)});
  return field;
}

UserField sample_phase(const ScenarioConfig& cfg, const PhaseParams& params,
                       Phase phase, RandomStream& rng) {
  switch (phase) {
    case Phase::urban: return sample_urban(cfg, params, rng);
    case Phase::suburban: return sample_suburban(cfg, params, rng);
    default: return sample_rural(cfg, rng);
  }
}

Phase phase_for_episode(const ScenarioConfig& cfg, int episode_index) {
  int acc = 0;
  for (const auto& e : cfg.phase_schedule) {
    acc += e.episodes;
    if (episode_index < acc) return e.phase;
  }
  return cfg.phase_schedule.back().phase;  // past the end: stay in last phase
}

// ---------------------------------------------------------------------------
// config file I/O

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

double parse_f64(const std::string& s) {
  double v = 0;
  const char* b = s.data();
  const char* e = b + s.size();
  auto [p, ec] = std::from_chars(b, e, v);
  if (ec != std::errc{} || p != e)
    throw std::runtime_error("bad numeric value: '" + s + "'");
  return v;
}

long long parse_i64(const std::string& s) {
  long long v = 0;
  const char* b = s.data();
  const char* e = b + s.size();
  auto [p, ec] = std::from_chars(b, e, v);
  if (ec != std::errc{} || p != e)
    throw std::runtime_error("bad integer value: '" + s + "'");
  return v;
}

std::string fmt_f64(double v) {
  char buf[64];
  auto [p, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  (void)ec;
  return std::string(buf, p);
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = s.find(sep, start);
    if (pos == std::string::npos) {
      out.push_back(trim(s.substr(start)));
      break;
    }
    out.push_back(trim(s.substr(start, pos - start)));
    start = pos + 1;
  }
  return out;
}

std::string schedule_to_string(const std::vector<PhaseEntry>& sched) {
  std::string out;
  for (std::size_t i = 0; i < sched.size(); ++i) {
    if (i) out += ",";
    out += phase_name(sched[i].phase);
    out += ":";
    out += std::to_string(sched[i].episodes);
  }
  return out;
}

std::vector<PhaseEntry> schedule_from_string(const std::string& s) {
  std::vector<PhaseEntry> sched;
  for (const auto& tok : split(s, ',')) {
    const auto colon = tok.find(':');
    if (colon == std::string::npos)
      throw std::runtime_error("bad phase_schedule entry: '" + tok + "'");
    PhaseEntry e;
    e.phase = phase_from_name(trim(tok.substr(0, colon)));
    e.episodes = static_cast<int>(parse_i64(trim(tok.substr(colon + 1))));
    sched.push_back(e);
  }
  return sched;
}

std::string ints_to_string(const std::vector<int>& v) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) out += ",";
    out += std::to_string(v[i]);
  }
  return out;
}

std::vector<int> ints_from_string(const std::string& s) {
  std::vector<int> v;
  for (const auto& tok : split(s, ','))
    v.push_back(static_cast<int>(parse_i64(tok)));
  return v;
}

struct Binding {
  const char* section;
  const char* key;
  std::function<void(ScenarioConfig&, const std::string&)> set;
  std::function<std::string(const ScenarioConfig&)> get;
};

Binding fbind(const char* sec, const char* key, double ScenarioConfig::*f) {
  return {sec, key,
          [f](ScenarioConfig& c, const std::string& v) { c.*f = parse_f64(v); },
          [f](const ScenarioConfig& c) { return fmt_f64(c.*f); }};
}

Binding ibind(const char* sec, const char* key, int ScenarioConfig::*f) {
  return {sec, key,
          [f](ScenarioConfig& c, const std::string& v) {
            c.*f = static_cast<int>(parse_i64(v));
          },
          [f](const ScenarioConfig& c) { return std::to_string(c.*f); }};
}

const std::vector<Binding>& bindings() {
  static const std::vector<Binding> b = {
      fbind("scenario", "area_side_m", &ScenarioConfig::area_side_m),
      ibind("scenario", "n_uavs", &ScenarioConfig::n_uavs),
      ibind("scenario", "users_urban", &ScenarioConfig::users_urban),
      ibind("scenario", "users_suburban", &ScenarioConfig::users_suburban),
      ibind("scenario", "users_rural", &ScenarioConfig::users_rural),
      fbind("scenario", "h_min_m", &ScenarioConfig::h_min_m),
      fbind("scenario", "h_max_m", &ScenarioConfig::h_max_m),
      fbind("scenario", "d_min_m", &ScenarioConfig::d_min_m),
      {"scenario", "phase_schedule",
       [](ScenarioConfig& c, const std::string& v) {
         c.phase_schedule = schedule_from_string(v);
       },
       [](const ScenarioConfig& c) {
         return schedule_to_string(c.phase_schedule);
       }},
      {"scenario", "seed",
       [](ScenarioConfig& c, const std::string& v) {
         c.seed = static_cast<std::uint64_t>(parse_i64(v));
       },
       [](const ScenarioConfig& c) { return std::to_string(c.seed); }},
      ibind("scenario", "urban_clusters", &ScenarioConfig::urban_clusters),
      fbind("scenario", "urban_sigma_m", &ScenarioConfig::urban_sigma_m),
      fbind("scenario", "suburban_alpha", &ScenarioConfig::suburban_alpha),
      ibind("scenario", "suburban_clusters",
            &ScenarioConfig::suburban_clusters),
      fbind("scenario", "suburban_std_m", &ScenarioConfig::suburban_std_m),

      fbind("channel", "carrier_hz", &ScenarioConfig::carrier_hz),
      fbind("channel", "bandwidth_hz", &ScenarioConfig::bandwidth_hz),
      fbind("channel", "noise_dbm_per_hz", &ScenarioConfig::noise_dbm_per_hz),
      fbind("channel", "p_uav_dbm", &ScenarioConfig::p_uav_dbm),
      fbind("channel", "p_gbs_dbm", &ScenarioConfig::p_gbs_dbm),
      fbind("channel", "g_uav_dbi", &ScenarioConfig::g_uav_dbi),
      fbind("channel", "g_gbs_dbi", &ScenarioConfig::g_gbs_dbi),
      fbind("channel", "gbs_x_m", &ScenarioConfig::gbs_x_m),
      fbind("channel", "gbs_y_m", &ScenarioConfig::gbs_y_m),
      fbind("channel", "gbs_h_m", &ScenarioConfig::gbs_h_m),
      fbind("channel", "a_env", &ScenarioConfig::a_env),
      fbind("channel", "b_env", &ScenarioConfig::b_env),
      fbind("channel", "eta_los_db", &ScenarioConfig::eta_los_db),
      fbind("channel", "eta_nlos_db", &ScenarioConfig::eta_nlos_db),
      fbind("channel", "kappa_gbs", &ScenarioConfig::kappa_gbs),
      fbind("channel", "d0_m", &ScenarioConfig::d0_m),
      fbind("channel", "shadow_sigma_db", &ScenarioConfig::shadow_sigma_db),
      fbind("channel", "rate_threshold_bps",
            &ScenarioConfig::rate_threshold_bps),

      fbind("env", "step_xy_m", &ScenarioConfig::step_xy_m),
      fbind("env", "step_z_m", &ScenarioConfig::step_z_m),
      ibind("env", "horizon_steps", &ScenarioConfig::horizon_steps),
      ibind("env", "k_neighbors", &ScenarioConfig::k_neighbors),
      ibind("env", "l_users", &ScenarioConfig::l_users),

      fbind("reward", "w_ee", &ScenarioConfig::w_ee),
      fbind("reward", "w_fair", &ScenarioConfig::w_fair),
      fbind("reward", "w_load", &ScenarioConfig::w_load),
      fbind("reward", "w_cov", &ScenarioConfig::w_cov),
      fbind("reward", "w_qos", &ScenarioConfig::w_qos),
      fbind("reward", "collision_penalty_eta",
            &ScenarioConfig::collision_penalty_eta),
      ibind("reward", "warmup_min", &ScenarioConfig::warmup_min),
      fbind("reward", "norm_epsilon", &ScenarioConfig::norm_epsilon),

      fbind("learner", "actor_lr", &ScenarioConfig::actor_lr),
      fbind("learner", "critic_lr", &ScenarioConfig::critic_lr),
      fbind("learner", "gamma", &ScenarioConfig::gamma),
      fbind("learner", "gae_lambda", &ScenarioConfig::gae_lambda),
      fbind("learner", "clip_eps", &ScenarioConfig::clip_eps),
      ibind("learner", "minibatch", &ScenarioConfig::minibatch),
      ibind("learner", "k_opt", &ScenarioConfig::k_opt),
      fbind("learner", "entropy_coef", &ScenarioConfig::entropy_coef),
      fbind("learner", "grad_clip", &ScenarioConfig::grad_clip),
      {"learner", "actor_hidden",
       [](ScenarioConfig& c, const std::string& v) {
         c.actor_hidden = ints_from_string(v);
       },
       [](const ScenarioConfig& c) { return ints_to_string(c.actor_hidden); }},
      {"learner", "critic_hidden",
       [](ScenarioConfig& c, const std::string& v) {
         c.critic_hidden = ints_from_string(v);
       },
       [](const ScenarioConfig& c) {
         return ints_to_string(c.critic_hidden);
       }},
      ibind("learner", "checkpoint_every", &ScenarioConfig::checkpoint_every),
  };
  return b;
}

const Binding* find_binding(const std::string& section,
                            const std::string& key) {
  for (const auto& b : bindings())
    if (section == b.section && key == b.key) return &b;
  return nullptr;
}

std::string upper(std::string s) {
  for (auto& ch : s) ch = static_cast<char>(std::toupper(ch));
  return s;
}

}  // namespace

ScenarioConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config file: " + path);
  ScenarioConfig cfg;
  std::string line, section;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const std::string t = trim(line);
    if (t.empty() || t[0] == '#' || t[0] == ';') continue;
    if (t.front() == '[') {
      if (t.back() != ']')
        throw std::runtime_error(path + ":" + std::to_string(lineno) +
                                 ": malformed section header");
      section = trim(t.substr(1, t.size() - 2));
      bool known = false;
      for (const auto& b : bindings())
        if (section == b.section) known = true;
      if (!known)
        throw std::runtime_error(path + ":" + std::to_string(lineno) +
                                 ": unknown section [" + section + "]");
      continue;
    }
    const auto eq = t.find('=');
    if (eq == std::string::npos)
      throw std::runtime_error(path + ":" + std::to_string(lineno) +
                               ": expected key = value");
    const std::string key = trim(t.substr(0, eq));
    const std::string val = trim(t.substr(eq + 1));
    const Binding* b = find_binding(section, key);
    if (!b)
      throw std::runtime_error(path + ":" + std::to_string(lineno) +
                               ": unknown key '" + key + "' in section [" +
                               section + "]");
    try {
      b->set(cfg, val);
    } catch (const std::exception& e) {
      throw std::runtime_error(path + ":" + std::to_string(lineno) + ": " +
                               e.what());
    }
  }
  return cfg;
}

void apply_env_overrides(ScenarioConfig& cfg) {
  for (const auto& b : bindings()) {
    const std::string var = "AEROSWARM_" + upper(b.key);
    if (const char* v = std::getenv(var.c_str())) {
      try {
        b.set(cfg, v);
      } catch (const std::exception& e) {
        throw std::runtime_error(var + ": " + e.what());
      }
    }
  }
}

std::string config_to_string(const ScenarioConfig& cfg) {
  std::ostringstream out;
  std::string cur;
  for (const auto& b : bindings()) {
    if (cur != b.section) {
      if (!cur.empty()) out << "\n";
      cur = b.section;
      out << "[" << cur << "]\n";
    }
    out << b.key << " = " << b.get(cfg) << "\n";
  }
  return out.str();
}

void save_config(const ScenarioConfig& cfg, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write config file: " + path);
  out << config_to_string(cfg);
}

void validate_config(const ScenarioConfig& cfg) {
  auto fail = [](const std::string& msg) {
    throw std::runtime_error("config invalid: " + msg);
  };
  if (!(cfg.area_side_m > 0)) fail("area_side_m must be > 0");
  if (cfg.n_uavs < 1) fail("n_uavs must be >= 1");
  if (cfg.users_urban < 1 || cfg.users_suburban < 1 || cfg.users_rural < 1)
    fail("per-phase user counts must be >= 1");
  if (!(cfg.h_min_m > 0 && cfg.h_min_m < cfg.h_max_m))
    fail("need 0 < h_min_m < h_max_m");
  if (!(cfg.d_min_m > 0)) fail("d_min_m must be > 0");
  if (cfg.phase_schedule.empty()) fail("phase_schedule must be non-empty");
  for (const auto& e : cfg.phase_schedule)
    if (e.episodes < 1) fail("phase_schedule episode counts must be >= 1");
  if (cfg.urban_clusters < 1) fail("urban_clusters must be >= 1");
  if (!(cfg.urban_sigma_m > 0)) fail("urban_sigma_m must be > 0");
  if (cfg.suburban_alpha < 0 || cfg.suburban_alpha > 1)
    fail("suburban_alpha must be in [0,1]");
  if (cfg.suburban_clusters < 1) fail("suburban_clusters must be >= 1");
  if (!(cfg.suburban_std_m > 0)) fail("suburban_std_m must be > 0");
  if (!(cfg.carrier_hz > 0)) fail("carrier_hz must be > 0");
  if (!(cfg.bandwidth_hz > 0)) fail("bandwidth_hz must be > 0");
  if (!std::isfinite(cfg.p_uav_dbm) || !std::isfinite(cfg.p_gbs_dbm))
    fail("transmit powers must be finite");
  if (cfg.gbs_x_m < 0 || cfg.gbs_x_m > cfg.area_side_m || cfg.gbs_y_m < 0 ||
      cfg.gbs_y_m > cfg.area_side_m)
    fail("gbs position must lie inside the area");
  if (!(cfg.gbs_h_m >= 0)) fail("gbs_h_m must be >= 0");
  if (!(cfg.a_env > 0 && cfg.b_env > 0)) fail("a_env, b_env must be > 0");
  if (!(cfg.d0_m > 0)) fail("d0_m must be > 0");
  if (cfg.shadow_sigma_db < 0) fail("shadow_sigma_db must be >= 0");
  if (!(cfg.rate_threshold_bps > 0)) fail("rate_threshold_bps must be > 0");
  if (!(cfg.step_xy_m > 0 && cfg.step_z_m > 0))
    fail("step quanta must be > 0");
  if (cfg.horizon_steps < 1) fail("horizon_steps must be >= 1");
  if (cfg.k_neighbors < 0 || cfg.l_users < 0)
    fail("observation sizes must be >= 0");
  const double w[] = {cfg.w_ee, cfg.w_fair, cfg.w_load, cfg.w_cov, cfg.w_qos};
  double wsum = 0;
  for (double x : w) {
    if (x < 0) fail("reward weights must be >= 0");
    wsum += x;
  }
  if (wsum <= 0) fail("reward weights must not all be zero");
  if (cfg.collision_penalty_eta < 0)
    fail("collision_penalty_eta must be >= 0");
  if (cfg.warmup_min < 0) fail("warmup_min must be >= 0");
  if (!(cfg.norm_epsilon > 0)) fail("norm_epsilon must be > 0");
  if (!(cfg.actor_lr > 0 && cfg.critic_lr > 0))
    fail("learning rates must be > 0");
  if (cfg.gamma < 0 || cfg.gamma > 1) fail("gamma must be in [0,1]");
  if (cfg.gae_lambda < 0 || cfg.gae_lambda > 1)
    fail("gae_lambda must be in [0,1]");
  if (!(cfg.clip_eps > 0)) fail("clip_eps must be > 0");
  if (cfg.minibatch < 1) fail("minibatch must be >= 1");
  if (cfg.k_opt < 1) fail("k_opt must be >= 1");
  if (cfg.entropy_coef < 0) fail("entropy_coef must be >= 0");
  if (!(cfg.grad_clip > 0)) fail("grad_clip must be > 0");
  for (int h : cfg.actor_hidden)
    if (h < 1) fail("actor_hidden dims must be >= 1");
  for (int h : cfg.critic_hidden)
    if (h < 1) fail("critic_hidden dims must be >= 1");
  if (cfg.actor_hidden.empty() || cfg.critic_hidden.empty())
    fail("hidden layer lists must be non-empty");
  if (cfg.checkpoint_every < 1) fail("checkpoint_every must be >= 1");
}

}  // namespace aeroswarm
