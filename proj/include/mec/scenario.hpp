#pragma once

#include <cstdint>
#include <vector>

#include "mec/params.hpp"

namespace mec {

/// Circular cell split into K annular zones around the base station.
struct CellGeometry {
  double radius_m = 500.0;
  std::vector<double> zone_edges_m;  // d_0 = 0 < d_1 < ... < d_K = radius
  std::vector<double> zone_rates_bps;  // r_k, one per zone

  int n_zones() const { return static_cast<int>(zone_rates_bps.size()); }
  double zone_midpoint(int zone) const {
    return 0.5 * (zone_edges_m[zone] + zone_edges_m[zone + 1]);
  }
  void validate() const;

  /// Equal-width annuli d_k = kR/K.
  static std::vector<double> equal_width_edges(double radius_m, int n_zones);
};

/// Illustrative uplink rate table (bit/s), nearest zone first. These values are
/// placeholders spanning typical narrowband uplink rates; they are not taken
/// from an MCS table and should be replaced for quantitative studies.
std::vector<double> default_rate_table();

CellGeometry default_geometry();

struct RadioConstants {
  double packet_bits = 1e4;          // l_p
  double p_cmax_dbm = 23.0;
  double p0_dbm = -100.0;            // open-loop target
  double pathloss_alpha = 1.0;       // open-loop compensation factor
  double pathloss_a_db = 15.3;       // PL = a + b log10(d[m])
  double pathloss_b_db = 37.6;
  double cycles_per_bit = 1e5;       // X
  double switched_capacitance = 1e-28;  // kappa
  double cpu_min_hz = 1e9;
  double cpu_max_hz = 3e9;
};

struct DeviceParams {
  double tx_rate;     // packets/s
  double tx_power;    // W
  double proc_rate;   // packets/s
  double proc_power;  // W
};

struct Placement {
  std::vector<double> radius_m;
  std::vector<int> zone;  // 0-based
};

double pathloss_db(double distance_m, const RadioConstants& c);
double dbm_to_watts(double dbm);
/// Open-loop power control: min(P_CMAX, P0 + alpha * PL), returned in dBm.
double tx_power_dbm(double pathloss, const RadioConstants& c);

/// Area-uniform placement in the disk; zone is the annulus containing the radius.
Placement place_devices(const CellGeometry& geo, int n_devices, std::uint64_t seed);

/// Throws std::invalid_argument if the resulting rates are not positive.
DeviceParams derive_device_params(int zone, const CellGeometry& geo, const RadioConstants& c,
                                  double cpu_hz);

struct ScenarioConfig {
  CellGeometry geometry = default_geometry();
  RadioConstants radio;
  int tx_cap = 7;
  int proc_cap = 7;
  double delay_weight = 0.5;  // omega'
  double power_weight = 0.5;  // gamma'
  double arrival_rate = 1.0;  // lambda, same for every device
};

/// Places `n_devices`, draws CPU speeds and derives all per-device parameters.
/// The result depends only on (config, n_devices, seed).
ScenarioParams build_scenario(const ScenarioConfig& cfg, int n_devices, std::uint64_t seed);

}  // namespace mec
