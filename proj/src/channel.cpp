#include "aeroswarm/channel.hpp"

#include <cmath>
#include <stdexcept>

namespace aeroswarm {

namespace {
constexpr double kLightSpeed = 299792458.0;
constexpr double kPi = 3.14159265358979323846;
}  // namespace

LinkGeometry link_geometry(const Vec3& uav, const Vec2& user) {
  LinkGeometry g;
  g.horizontal_dist_m = std::hypot(uav.x - user.x, uav.y - user.y);
  g.altitude_m = uav.z;
  g.dist_3d_m = std::sqrt(g.horizontal_dist_m * g.horizontal_dist_m +
                          uav.z * uav.z);
  g.elevation_deg =
      g.horizontal_dist_m == 0
          ? 90.0
          : std::atan(uav.z / g.horizontal_dist_m) * 180.0 / kPi;
  return g;
}

double fspl_db(double dist_m, double freq_hz) {
  if (!(dist_m > 0) || !(freq_hz > 0))
    throw std::invalid_argument("fspl_db: distance and frequency must be > 0");
  return 20.0 * std::log10(4.0 * kPi * dist_m * freq_hz / kLightSpeed);
}

double p_los(double theta_deg, double a, double b) {
  if (!(a > 0) || !(b > 0))
    throw std::invalid_argument("p_los: a and b must be > 0");
  return 1.0 / (1.0 + a * std::exp(-b * (theta_deg - a)));
}

double a2g_pathloss_db(const LinkGeometry& geom, const ScenarioConfig& cfg) {
  const double fspl = fspl_db(geom.dist_3d_m, cfg.carrier_hz);
  const double p = p_los(geom.elevation_deg, cfg.a_env, cfg.b_env);
  // probability-weighted average of the dB losses
  return p * (fspl + cfg.eta_los_db) + (1.0 - p) * (fspl + cfg.eta_nlos_db);
}

double gbs_pathloss_db(double dist_m, double shadow_db,
                       const ScenarioConfig& cfg) {
  const double d = std::max(dist_m, cfg.d0_m);
  return fspl_db(cfg.d0_m, cfg.carrier_hz) +
         10.0 * cfg.kappa_gbs * std::log10(d / cfg.d0_m) + shadow_db;
}

std::vector<LinkReport> evaluate_links(const WorldState& world,
                                       const ScenarioConfig& cfg) {
  const int n = static_cast<int>(world.uav_pos.size());
  const int m = static_cast<int>(world.users.positions.size());
  const int nodes = n + 1;
  const Vec3 gbs{cfg.gbs_x_m, cfg.gbs_y_m, cfg.gbs_h_m};

  std::vector<double> tx_mw(nodes), gain_dbi(nodes);
  tx_mw[0] = dbm_to_mw(cfg.p_gbs_dbm);
  gain_dbi[0] = cfg.g_gbs_dbi;
  for (int k = 1; k < nodes; ++k) {
    tx_mw[k] = dbm_to_mw(cfg.p_uav_dbm);
    gain_dbi[k] = cfg.g_uav_dbi;
  }

  std::vector<LinkReport> reports(m);
  std::vector<double> rx_mw(static_cast<std::size_t>(m) * nodes);
  std::vector<double> plos_uav(static_cast<std::size_t>(m) * nodes, 0.0);

  // pass 1: losses, received powers, association
  for (int u = 0; u < m; ++u) {
    auto& rep = reports[u];
    rep.pathloss_db.resize(nodes);
    const Vec2& pos = world.users.positions[u];
    for (int k = 0; k < nodes; ++k) {
      double loss;
      if (k == 0) {
        const double d = dist3d(gbs, Vec3{pos.x, pos.y, 0.0});
        loss = gbs_pathloss_db(d, world.shadow_db(u, 0), cfg);
      } else {
        const LinkGeometry geom = link_geometry(world.uav_pos[k - 1], pos);
        loss = a2g_pathloss_db(geom, cfg);
        plos_uav[static_cast<std::size_t>(u) * nodes + k] =
            p_los(geom.elevation_deg, cfg.a_env, cfg.b_env);
      }
      rep.pathloss_db[k] = loss;
      const double g = db_to_linear(gain_dbi[k] - loss);
      rx_mw[static_cast<std::size_t>(u) * nodes + k] = tx_mw[k] * g;
    }
    int best = 0;
    for (int k = 1; k < nodes; ++k)
      if (rx_mw[static_cast<std::size_t>(u) * nodes + k] >
          rx_mw[static_cast<std::size_t>(u) * nodes + best])
        best = k;  // strict >: ties stay at the lowest id
    rep.serving_node = best;
    rep.p_los = best == 0
                    ? 0.0
                    : plos_uav[static_cast<std::size_t>(u) * nodes + best];
  }

  std::vector<int> counts(nodes, 0);
  for (const auto& rep : reports) counts[rep.serving_node]++;

  // pass 2: SINR and rate over the equal intra-cell bandwidth split
  const double n0_mw_per_hz = dbm_to_mw(cfg.noise_dbm_per_hz);
  for (int u = 0; u < m; ++u) {
    auto& rep = reports[u];
    const int k = rep.serving_node;
    const double sub_band_hz = cfg.bandwidth_hz / counts[k];
    const double noise_mw = n0_mw_per_hz * sub_band_hz;
    const double signal = rx_mw[static_cast<std::size_t>(u) * nodes + k];
    double interference = 0;
    for (int j = 0; j < nodes; ++j)
      if (j != k) interference += rx_mw[static_cast<std::size_t>(u) * nodes + j];
    rep.sinr_linear = signal / (noise_mw + interference);
    rep.rate_bps = sub_band_hz * std::log2(1.0 + rep.sinr_linear);
  }
  return reports;
}

std::vector<int> association_counts(const std::vector<LinkReport>& links,
                                    int n_uavs) {
  std::vector<int> counts(n_uavs + 1, 0);
  for (const auto& rep : links) counts[rep.serving_node]++;
  return counts;
}

}  // namespace aeroswarm
