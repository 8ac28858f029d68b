#pragma once
// Per-step network metrics, the metrics.csv record layout, and the rolling
// reward-variance window used in the emitted rows.

#include <deque>
#include <string>
#include <vector>

#include "aeroswarm/channel.hpp"
#include "aeroswarm/scenario.hpp"
#include "aeroswarm/world.hpp"

namespace aeroswarm {

struct MetricFragment {
  double throughput_mbps = 0.0;
  double jain_rate = 0.0;
  double coverage = 0.0;
  double min_rate_mbps = 0.0;
  double load_jfi = 0.0;
};

MetricFragment compute_metrics(const std::vector<LinkReport>& links,
                               const ScenarioConfig& cfg);

MetricFragment mean_fragment(const std::vector<MetricFragment>& frags);

struct MetricsRecord {
  long long episode = 0;
  std::string phase_id;   // "urban" | "suburban" | "rural"
  std::string policy_tag; // "gmappo" | "kmeans" | "random"
  double throughput_mbps = 0.0;
  double jain_rate = 0.0;
  double coverage = 0.0;
  double min_rate_mbps = 0.0;
  double load_jfi = 0.0;
  double total_reward = 0.0;
  double reward_variance_window = 0.0;
};

std::string metrics_csv_header();
std::string to_csv_row(const MetricsRecord& rec);
MetricsRecord record_from_csv_row(const std::string& line);

// population variance over the last `window` pushed values
class RollingVariance {
 public:
  explicit RollingVariance(std::size_t window = 50) : window_(window) {}
  void push(double x);
  double value() const;
  const std::deque<double>& values() const { return vals_; }
  void restore(const std::vector<double>& vals);

 private:
  std::size_t window_;
  std::deque<double> vals_;
};

}  // namespace aeroswarm
