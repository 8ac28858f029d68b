#pragma once
// RF physics: terrestrial GBS path loss, probabilistic LoS/NLoS air-to-ground
// loss, strongest-power association, SINR and per-user achievable rate.

#include <vector>

#include "aeroswarm/scenario.hpp"
#include "aeroswarm/world.hpp"

namespace aeroswarm {

struct LinkGeometry {
  double horizontal_dist_m = 0;
  double altitude_m = 0;
  double elevation_deg = 90;  // r = 0 maps to 90
  double dist_3d_m = 0;
};

LinkGeometry link_geometry(const Vec3& uav, const Vec2& user);

struct LinkReport {
  int serving_node = 0;  // 0 = GBS, 1..N = UAV
  double sinr_linear = 0;
  double rate_bps = 0;
  std::vector<double> pathloss_db;  // per candidate node, size N+1
  double p_los = 0;                 // of the serving link; 0 for the GBS
};

double fspl_db(double dist_m, double freq_hz);  // throws on non-positive args
double p_los(double theta_deg, double a, double b);
double a2g_pathloss_db(const LinkGeometry& geom, const ScenarioConfig& cfg);
double gbs_pathloss_db(double dist_m, double shadow_db,
                       const ScenarioConfig& cfg);

inline double dbm_to_mw(double dbm) { return std::pow(10.0, dbm / 10.0); }
inline double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }

// Strongest received power wins (ties -> lowest node id); SINR counts every
// other node at full transmit power; rate uses an equal intra-cell bandwidth
// split with noise over the allocated sub-band.
std::vector<LinkReport> evaluate_links(const WorldState& world,
                                       const ScenarioConfig& cfg);

// per-node association counts from a link report list, size N+1
std::vector<int> association_counts(const std::vector<LinkReport>& links,
                                    int n_uavs);

}  // namespace aeroswarm
