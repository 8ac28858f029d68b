#include "aeroswarm/experiment.hpp"

#include <algorithm>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <stdexcept>
#include <vector>

#include "aeroswarm/baseline.hpp"
#include "aeroswarm/env.hpp"
#include "aeroswarm/learner.hpp"
#include "aeroswarm/metrics.hpp"
#include "aeroswarm/reward.hpp"

namespace fs = std::filesystem;

namespace aeroswarm {

namespace {

struct TagWindows {
  RollingVariance gmappo{50}, kmeans{50}, random{50};
};

constexpr std::uint64_t kStateMagic = 0x41535753'54303031ull;  // ASWST001

void save_windows(const std::string& path, const TagWindows& win) {
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw std::runtime_error("cannot write run state: " + path);
  std::uint64_t magic = kStateMagic;
  f.write(reinterpret_cast<const char*>(&magic), sizeof(magic));
  for (const RollingVariance* w : {&win.gmappo, &win.kmeans, &win.random}) {
    const std::uint64_t n = w->values().size();
    f.write(reinterpret_cast<const char*>(&n), sizeof(n));
    for (double v : w->values())
      f.write(reinterpret_cast<const char*>(&v), sizeof(v));
  }
}

void load_windows(const std::string& path, TagWindows& win) {
  std::ifstream f(path, std::ios::binary);
  if (!f)
    throw std::runtime_error("cannot open run state (expected next to the "
                             "checkpoint): " + path);
  std::uint64_t magic = 0;
  f.read(reinterpret_cast<char*>(&magic), sizeof(magic));
  if (magic != kStateMagic)
    throw std::runtime_error("run state version mismatch: " + path);
  for (RollingVariance* w : {&win.gmappo, &win.kmeans, &win.random}) {
    std::uint64_t n = 0;
    f.read(reinterpret_cast<char*>(&n), sizeof(n));
    std::vector<double> vals(n);
    f.read(reinterpret_cast<char*>(vals.data()),
           static_cast<std::streamsize>(n * sizeof(double)));
    w->restore(vals);
  }
  if (!f) throw std::runtime_error("truncated run state: " + path);
}

MetricsRecord make_record(int episode, Phase phase, const char* tag,
                          const MetricFragment& f, double total_reward,
                          double variance) {
  MetricsRecord rec;
  rec.episode = episode;
  rec.phase_id = phase_name(phase);
  rec.policy_tag = tag;
  rec.throughput_mbps = f.throughput_mbps;
  rec.jain_rate = f.jain_rate;
  rec.coverage = f.coverage;
  rec.min_rate_mbps = f.min_rate_mbps;
  rec.load_jfi = f.load_jfi;
  rec.total_reward = total_reward;
  rec.reward_variance_window = variance;
  return rec;
}

struct BaselineResult {
  MetricFragment kmeans_frag;
  double kmeans_reward = 0.0;
  MetricFragment random_frag;
  double random_reward = 0.0;
};

// Scores both baselines on the same episode (identical user field and
// shadowing via the shared seed), against the trainer's current reward scale.
BaselineResult eval_baselines(const ScenarioConfig& cfg, int episode,
                              const NormalizerState& norm) {
  BaselineResult out;
  Env env(cfg);
  env.reset(episode);

  // k-means placement is static, so one link evaluation covers the horizon
  RandomStream kr(cfg.seed, "kmeans", static_cast<std::uint64_t>(episode));
  PlacementSolution sol = kmeans_place(env.world().users.positions, cfg, kr);
  env.set_uav_positions(sol.uav_pos);
  out.kmeans_frag = compute_metrics(env.links(), cfg);
  RewardVector raw = compute_raw(env.links(), env.world(), cfg);
  out.kmeans_reward = scalarize_readonly(raw, norm, cfg);

  env.reset(episode);
  RandomStream rr(cfg.seed, "random", static_cast<std::uint64_t>(episode));
  const int T = cfg.horizon_steps;
  const int tail = std::max(1, T / 5);
  std::vector<MetricFragment> frags;
  frags.reserve(T);
  std::vector<double> rewards;
  rewards.reserve(T);
  for (int t = 0; t < T; ++t) {
    Env::StepResult sr = env.step(random_actions(cfg.n_uavs, rr));
    frags.push_back(compute_metrics(env.links(), cfg));
    double r = 0.0;
    for (const RewardVector& rv : sr.rewards)
      r += scalarize_readonly(rv, norm, cfg);
    rewards.push_back(r / cfg.n_uavs);
  }
  out.random_frag = mean_fragment(
      std::vector<MetricFragment>(frags.end() - tail, frags.end()));
  double acc = 0.0;
  for (int t = T - tail; t < T; ++t) acc += rewards[t];
  out.random_reward = acc / tail;
  return out;
}

void write_trace_rows(std::ofstream& f, std::vector<TraceRow>& rows) {
  char buf[160];
  for (const TraceRow& r : rows) {
    std::snprintf(buf, sizeof(buf), "%d,%d,%.17g,%.17g,%.17g,%d,%d\n", r.step,
                  r.uav_id, r.x, r.y, r.z, r.action, r.collided ? 1 : 0);
    f << buf;
  }
  rows.clear();
}

constexpr const char* kTraceHeader = "step,uav_id,x,y,z,action,collision_flag";

void write_plot_script(const std::string& path) {
  static const char* kScript = R"PY(#!/usr/bin/env python3
"""Plot aeroswarm metrics.csv: learning curves vs baselines, the reward band,
and (for sweep outputs) the per-density summary. Usage:

    python3 plot_metrics.py [metrics.csv]
"""
import os
import sys

import matplotlib
matplotlib.use("Agg")
import matplotlib.pyplot as plt

METRICS = ["throughput_mbps", "jain_rate", "coverage", "min_rate_mbps", "load_jfi"]
COLORS = {"gmappo": "tab:blue", "kmeans": "tab:orange", "random": "tab:green"}


def load_sections(path):
    sections, tag, rows, header = [], "", [], None
    for line in open(path):
        line = line.strip()
        if not line:
            continue
        if line.startswith("#"):
            if rows:
                sections.append((tag, header, rows))
            tag, rows, header = line.lstrip("# "), [], None
            continue
        cells = line.split(",")
        if cells[0] == "episode":
            header = cells
            continue
        rows.append(dict(zip(header, cells)))
    if rows:
        sections.append((tag, header, rows))
    return sections


def column(rows, tag, field):
    out = [(int(r["episode"]), float(r[field])) for r in rows if r["policy_tag"] == tag]
    out.sort()
    return [e for e, _ in out], [v for _, v in out]


def phase_boundaries(rows):
    seen, bounds = {}, []
    for r in rows:
        e, p = int(r["episode"]), r["phase_id"]
        if e not in seen:
            seen[e] = p
    order = sorted(seen)
    for a, b in zip(order, order[1:]):
        if seen[a] != seen[b]:
            bounds.append(b)
    return bounds


def plot_run(rows, stem):
    fig, axes = plt.subplots(2, 3, figsize=(15, 8))
    for ax, metric in zip(axes.flat, METRICS):
        for tag in COLORS:
            eps, vals = column(rows, tag, metric)
            if eps:
                ax.plot(eps, vals, label=tag, color=COLORS[tag], lw=1)
        for b in phase_boundaries(rows):
            ax.axvline(b, color="gray", ls="--", lw=0.8)
        ax.set_title(metric)
        ax.set_xlabel("episode")
        ax.legend(fontsize=8)
    ax = axes.flat[-1]
    eps, rew = column(rows, "gmappo", "total_reward")
    _, var = column(rows, "gmappo", "reward_variance_window")
    if eps:
        ax.plot(eps, rew, color=COLORS["gmappo"], lw=1, label="gmappo")
        band = [v ** 0.5 for v in var]
        lo = [r - s for r, s in zip(rew, band)]
        hi = [r + s for r, s in zip(rew, band)]
        ax.fill_between(eps, lo, hi, color=COLORS["gmappo"], alpha=0.2)
    for tag in ("kmeans", "random"):
        eps, rew = column(rows, tag, "total_reward")
        if eps:
            ax.plot(eps, rew, color=COLORS[tag], lw=1, label=tag)
    for b in phase_boundaries(rows):
        ax.axvline(b, color="gray", ls="--", lw=0.8)
    ax.set_title("total_reward (rolling-50 band)")
    ax.set_xlabel("episode")
    ax.legend(fontsize=8)
    fig.tight_layout()
    fig.savefig(stem + ".png", dpi=120)
    print("wrote", stem + ".png")


def plot_sweep(sections, stem):
    fig, axes = plt.subplots(1, len(METRICS), figsize=(4 * len(METRICS), 4))
    for ax, metric in zip(axes, METRICS):
        for tag in COLORS:
            xs, ys = [], []
            for label, _, rows in sections:
                m = int(label.split("=")[1])
                eps, vals = column(rows, tag, metric)
                if not vals:
                    continue
                k = max(1, len(vals) // 5)
                xs.append(m)
                ys.append(sum(vals[-k:]) / k)
            if xs:
                ax.plot(xs, ys, "o-", label=tag, color=COLORS[tag])
        ax.set_title(metric)
        ax.set_xlabel("users M")
        ax.legend(fontsize=8)
    fig.tight_layout()
    fig.savefig(stem + "_sweep.png", dpi=120)
    print("wrote", stem + "_sweep.png")


def main():
    path = sys.argv[1] if len(sys.argv) > 1 else "metrics.csv"
    sections = load_sections(path)
    stem = os.path.splitext(path)[0]
    if len(sections) > 1:
        plot_sweep(sections, stem)
        for label, _, rows in sections:
            plot_run(rows, stem + "_" + label.replace("=", ""))
    else:
        plot_run(sections[0][2], stem)


if __name__ == "__main__":
    main()
)PY";
  std::ofstream f(path, std::ios::trunc);
  if (!f) throw std::runtime_error("cannot write plot script: " + path);
  f << kScript;
}

void write_rows(std::ofstream& csv, int episode, Phase phase,
                const BaselineResult& base, TagWindows& win,
                double gmappo_reward, const MetricFragment& gmappo_frag) {
  win.gmappo.push(gmappo_reward);
  win.kmeans.push(base.kmeans_reward);
  win.random.push(base.random_reward);
  csv << to_csv_row(make_record(episode, phase, "gmappo", gmappo_frag,
                                gmappo_reward, win.gmappo.value()))
      << "\n";
  csv << to_csv_row(make_record(episode, phase, "kmeans", base.kmeans_frag,
                                base.kmeans_reward, win.kmeans.value()))
      << "\n";
  csv << to_csv_row(make_record(episode, phase, "random", base.random_frag,
                                base.random_reward, win.random.value()))
      << "\n";
  csv.flush();
}

int train_mode(const ScenarioConfig& cfg, const RunOptions& opt) {
  fs::create_directories(opt.out_dir);
  save_config(cfg, opt.out_dir + "/config.ini");
  write_plot_script(opt.out_dir + "/plot_metrics.py");

  Trainer trainer(cfg);
  TagWindows win;
  if (!opt.checkpoint.empty()) {
    trainer.load_checkpoint(opt.checkpoint);
    load_windows(opt.checkpoint + ".state", win);
  }
  const int until =
      opt.episodes_override > 0 ? opt.episodes_override : cfg.total_episodes();
  if (trainer.next_episode() >= until)
    throw std::runtime_error("nothing to train: checkpoint is at episode " +
                             std::to_string(trainer.next_episode()) +
                             ", budget is " + std::to_string(until));

  std::ofstream csv(opt.out_dir + "/metrics.csv", std::ios::trunc);
  if (!csv) throw std::runtime_error("cannot write metrics.csv");
  csv << metrics_csv_header() << "\n";

  std::vector<TraceRow> trace_rows;
  std::ofstream trace_csv;
  if (opt.trace) {
    trace_csv.open(opt.out_dir + "/trace.csv", std::ios::trunc);
    trace_csv << kTraceHeader << "\n";
    trainer.set_trace(&trace_rows);
  }

  trainer.run(until, [&](const EpisodeStats& st) {
    BaselineResult base =
        eval_baselines(cfg, st.episode, trainer.normalizer());
    write_rows(csv, st.episode, st.phase, base, win, st.total_reward,
               st.tail_metrics);
    if (opt.trace) write_trace_rows(trace_csv, trace_rows);
    const int next = st.episode + 1;
    const bool boundary = next < cfg.total_episodes() &&
                          phase_for_episode(cfg, next) != st.phase;
    if (next % cfg.checkpoint_every == 0 || boundary || next == until) {
      const std::string ck =
          opt.out_dir + "/checkpoint_ep" + std::to_string(next) + ".bin";
      trainer.save_checkpoint(ck);
      save_windows(ck + ".state", win);
    }
  });
  return 0;
}

int eval_mode(const ScenarioConfig& cfg, const RunOptions& opt) {
  if (opt.checkpoint.empty())
    throw std::runtime_error("eval needs --checkpoint");
  fs::create_directories(opt.out_dir);
  save_config(cfg, opt.out_dir + "/config.ini");
  write_plot_script(opt.out_dir + "/plot_metrics.py");

  Trainer trainer(cfg);
  trainer.load_checkpoint(opt.checkpoint);
  const int n_eps = opt.episodes_override > 0 ? opt.episodes_override : 10;

  std::ofstream csv(opt.out_dir + "/metrics.csv", std::ios::trunc);
  if (!csv) throw std::runtime_error("cannot write metrics.csv");
  csv << metrics_csv_header() << "\n";

  Env env(cfg);
  std::vector<TraceRow> trace_rows;
  std::ofstream trace_csv;
  if (opt.trace) {
    trace_csv.open(opt.out_dir + "/trace.csv", std::ios::trunc);
    trace_csv << kTraceHeader << "\n";
    env.set_trace(&trace_rows);
  }

  RollingVariance var(50);
  const int T = cfg.horizon_steps;
  const int tail = std::max(1, T / 5);
  for (int k = 0; k < n_eps; ++k) {
    const int e = trainer.next_episode() + k;  // unseen-by-training worlds
    std::vector<std::vector<double>> obs = env.reset(e);
    std::vector<MetricFragment> frags;
    frags.reserve(T);
    std::vector<double> rewards;
    rewards.reserve(T);
    for (int t = 0; t < T; ++t) {
      Env::StepResult sr = env.step(trainer.greedy_actions(obs));
      frags.push_back(compute_metrics(env.links(), cfg));
      double r = 0.0;
      for (const RewardVector& rv : sr.rewards)
        r += scalarize_readonly(rv, trainer.normalizer(), cfg);
      rewards.push_back(r / cfg.n_uavs);
      obs = std::move(sr.observations);
    }
    MetricFragment f = mean_fragment(
        std::vector<MetricFragment>(frags.end() - tail, frags.end()));
    double acc = 0.0;
    for (int t = T - tail; t < T; ++t) acc += rewards[t];
    const double tr = acc / tail;
    var.push(tr);
    csv << to_csv_row(make_record(e, phase_for_episode(cfg, e), "gmappo", f,
                                  tr, var.value()))
        << "\n";
    if (opt.trace) write_trace_rows(trace_csv, trace_rows);
  }
  csv.flush();
  return 0;
}

int sweep_mode(const ScenarioConfig& cfg, const RunOptions& opt) {
  fs::create_directories(opt.out_dir);
  save_config(cfg, opt.out_dir + "/config.ini");
  write_plot_script(opt.out_dir + "/plot_metrics.py");

  std::ofstream csv(opt.out_dir + "/metrics.csv", std::ios::trunc);
  if (!csv) throw std::runtime_error("cannot write metrics.csv");

  for (int m : {60, 80, 100, 120, 140}) {
    csv << "# M=" << m << "\n" << metrics_csv_header() << "\n";
    ScenarioConfig c = cfg;
    c.users_urban = c.users_suburban = c.users_rural = m;
    validate_config(c);
    Trainer trainer(c);
    TagWindows win;
    const int until =
        opt.episodes_override > 0 ? opt.episodes_override : c.total_episodes();
    trainer.run(until, [&](const EpisodeStats& st) {
      BaselineResult base =
          eval_baselines(c, st.episode, trainer.normalizer());
      write_rows(csv, st.episode, st.phase, base, win, st.total_reward,
                 st.tail_metrics);
    });
  }
  return 0;
}

}  // namespace

int run_experiment(const ScenarioConfig& cfg, const RunOptions& opt) {
  validate_config(cfg);
  if (opt.mode == "train") return train_mode(cfg, opt);
  if (opt.mode == "eval") return eval_mode(cfg, opt);
  if (opt.mode == "sweep") return sweep_mode(cfg, opt);
  throw std::runtime_error("unknown mode: " + opt.mode);
}

}  // namespace aeroswarm
