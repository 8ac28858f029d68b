#include "aeroswarm/metrics.hpp"

#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <stdexcept>

#include "aeroswarm/reward.hpp"

namespace aeroswarm {

MetricFragment compute_metrics(const std::vector<LinkReport>& links,
                               const ScenarioConfig& cfg) {
  MetricFragment f;
  if (links.empty()) return f;
  std::vector<double> rates;
  rates.reserve(links.size());
  double sum_bps = 0.0, min_bps = 0.0;
  std::size_t covered = 0;
  for (const LinkReport& l : links) {
    rates.push_back(l.rate_bps);
    sum_bps += l.rate_bps;
    if (l.rate_bps >= cfg.rate_threshold_bps) ++covered;
  }
  min_bps = *std::min_element(rates.begin(), rates.end());
  f.throughput_mbps = sum_bps / 1e6;
  f.jain_rate = jain_index(rates);
  f.coverage = static_cast<double>(covered) / links.size();
  f.min_rate_mbps = min_bps / 1e6;
  std::vector<int> counts = association_counts(links, cfg.n_uavs);
  std::vector<double> loads(counts.begin() + 1, counts.end());  // UAVs only
  f.load_jfi = jain_index(loads);
  return f;
}

MetricFragment mean_fragment(const std::vector<MetricFragment>& frags) {
  MetricFragment m;
  if (frags.empty()) return m;
  for (const MetricFragment& f : frags) {
    m.throughput_mbps += f.throughput_mbps;
    m.jain_rate += f.jain_rate;
    m.coverage += f.coverage;
    m.min_rate_mbps += f.min_rate_mbps;
    m.load_jfi += f.load_jfi;
  }
  const double inv = 1.0 / static_cast<double>(frags.size());
  m.throughput_mbps *= inv;
  m.jain_rate *= inv;
  m.coverage *= inv;
  m.min_rate_mbps *= inv;
  m.load_jfi *= inv;
  return m;
}

std::string metrics_csv_header() {
  return "episode,phase_id,policy_tag,throughput_mbps,jain_rate,coverage,"
         "min_rate_mbps,load_jfi,total_reward,reward_variance_window";
}

namespace {

std::string fmt_g17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace

std::string to_csv_row(const MetricsRecord& rec) {
  std::string row = std::to_string(rec.episode);
  row += ',';
  row += rec.phase_id;
  row += ',';
  row += rec.policy_tag;
  for (double v : {rec.throughput_mbps, rec.jain_rate, rec.coverage,
                   rec.min_rate_mbps, rec.load_jfi, rec.total_reward,
                   rec.reward_variance_window}) {
    row += ',';
    row += fmt_g17(v);
  }
  return row;
}

MetricsRecord record_from_csv_row(const std::string& line) {
  std::vector<std::string> cells;
  std::string cur;
  for (char c : line) {
    if (c == ',') {
      cells.push_back(cur);
      cur.clear();
    } else {
      cur += c;
    }
  }
  cells.push_back(cur);
  if (cells.size() != 10)
    throw std::runtime_error("metrics row has " + std::to_string(cells.size()) +
                             " cells, want 10: " + line);
  MetricsRecord rec;
  rec.episode = std::stoll(cells[0]);
  rec.phase_id = cells[1];
  rec.policy_tag = cells[2];
  double* nums[7] = {&rec.throughput_mbps,    &rec.jain_rate,
                     &rec.coverage,           &rec.min_rate_mbps,
                     &rec.load_jfi,           &rec.total_reward,
                     &rec.reward_variance_window};
  for (int i = 0; i < 7; ++i) {
    // strtod instead of stod: stod throws on subnormals (ERANGE), but any
    // value the writer can emit must parse back
    const std::string& cell = cells[3 + i];
    char* end = nullptr;
    *nums[i] = std::strtod(cell.c_str(), &end);
    if (end == cell.c_str() || *end != '\0')
      throw std::runtime_error("bad numeric cell in metrics row: " + cell);
  }
  return rec;
}

void RollingVariance::push(double x) {
  vals_.push_back(x);
  if (vals_.size() > window_) vals_.pop_front();
}

double RollingVariance::value() const {
  if (vals_.empty()) return 0.0;
  double mean = 0.0;
  for (double v : vals_) mean += v;
  mean /= static_cast<double>(vals_.size());
  double acc = 0.0;
  for (double v : vals_) acc += (v - mean) * (v - mean);
  return acc / static_cast<double>(vals_.size());
}

void RollingVariance::restore(const std::vector<double>& vals) {
  vals_.assign(vals.begin(), vals.end());
  while (vals_.size() > window_) vals_.pop_front();
}

}  // namespace aeroswarm
