#include "mec/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>

namespace mec {

void CellGeometry::validate() const {
  const int k = n_zones();
  if (k < 1) throw std::invalid_argument("geometry needs at least one zone");
  if (static_cast<int>(zone_edges_m.size()) != k + 1)
    throw std::invalid_argument("zone edges must have K+1 entries");
  if (zone_edges_m.front() != 0.0 || std::abs(zone_edges_m.back() - radius_m) > 1e-9 * radius_m)
    throw std::invalid_argument("zone edges must span [0, R]");
  for (int i = 0; i < k; ++i)
    if (!(zone_edges_m[i] < zone_edges_m[i + 1]))
      throw std::invalid_argument("zone edges must be strictly increasing");
  for (double r : zone_rates_bps)
    if (!(r > 0)) throw std::invalid_argument("zone rates must be positive");
}

std::vector<double> CellGeometry::equal_width_edges(double radius_m, int n_zones) {
  std::vector<double> edges(n_zones + 1);
  for (int k = 0; k <= n_zones; ++k) edges[k] = radius_m * k / n_zones;
  edges.back() = radius_m;
  return edges;
}

std::vector<double> default_rate_table() {
  return {200e3, 170e3, 140e3, 115e3, 95e3, 75e3, 58e3, 42e3, 30e3, 20e3};
}

CellGeometry default_geometry() {
  CellGeometry g;
  g.radius_m = 500.0;
  g.zone_rates_bps = default_rate_table();
  g.zone_edges_m = CellGeometry::equal_width_edges(g.radius_m, g.n_zones());
  return g;
}

double pathloss_db(double distance_m, const RadioConstants& c) {
  return c.pathloss_a_db + c.pathloss_b_db * std::log10(distance_m);
}

double dbm_to_watts(double dbm) { return std::pow(10.0, (dbm - 30.0) / 10.0); }

double tx_power_dbm(double pathloss, const RadioConstants& c) {
  return std::min(c.p_cmax_dbm, c.p0_dbm + c.pathloss_alpha * pathloss);
}

Placement place_devices(const CellGeometry& geo, int n_devices, std::uint64_t seed) {
  if (n_devices < 1) throw std::invalid_argument("need at least one device");
  geo.validate();
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  Placement out;
  out.radius_m.reserve(n_devices);
  out.zone.reserve(n_devices);
  for (int i = 0; i < n_devices; ++i) {
    const double r = geo.radius_m * std::sqrt(unit(rng));
    auto it = std::upper_bound(geo.zone_edges_m.begin() + 1, geo.zone_edges_m.end() - 1, r);
    out.radius_m.push_back(r);
    out.zone.push_back(static_cast<int>(it - (geo.zone_edges_m.begin() + 1)));
  }
  return out;
}

DeviceParams derive_device_params(int zone, const CellGeometry& geo, const RadioConstants& c,
                                  double cpu_hz) {
  if (zone < 0 || zone >= geo.n_zones()) throw std::invalid_argument("zone out of range");
  DeviceParams d;
  d.tx_rate = geo.zone_rates_bps[zone] / c.packet_bits;
  d.tx_power = dbm_to_watts(tx_power_dbm(pathloss_db(geo.zone_midpoint(zone), c), c));
  d.proc_rate = cpu_hz / (c.cycles_per_bit * c.packet_bits);
  d.proc_power = c.switched_capacitance * cpu_hz * cpu_hz * cpu_hz;
  if (!(d.tx_rate > 0) || !(d.proc_rate > 0) || !(d.tx_power > 0) || !(d.proc_power > 0))
    throw std::invalid_argument("derived device parameters must be positive");
  return d;
}

ScenarioParams build_scenario(const ScenarioConfig& cfg, int n_devices, std::uint64_t seed) {
  const auto placement = place_devices(cfg.geometry, n_devices, seed);
  // CPU speeds draw from their own stream, independent of placement.
  std::mt19937_64 cpu_rng(seed ^ 0x9e3779b97f4a7c15ULL);
  std::uniform_real_distribution<double> cpu(cfg.radio.cpu_min_hz, cfg.radio.cpu_max_hz);

  ScenarioParams p;
  p.n_devices = n_devices;
  p.tx_cap = cfg.tx_cap;
  p.proc_cap = cfg.proc_cap;
  for (int i = 0; i < n_devices; ++i) {
    const auto d = derive_device_params(placement.zone[i], cfg.geometry, cfg.radio, cpu(cpu_rng));
    p.arrival_rates.push_back(cfg.arrival_rate);
    p.tx_rates.push_back(d.tx_rate);
    p.tx_powers.push_back(d.tx_power);
    p.proc_rates.push_back(d.proc_rate);
    p.proc_powers.push_back(d.proc_power);
    p.delay_weights.push_back(cfg.delay_weight);
    p.power_weights.push_back(cfg.power_weight);
  }
  p.validate();
  return p;
}

}  // namespace mec
