#pragma once

#include <numeric>
#include <vector>

namespace mec {

/// Per-device rates, powers and weights of one simulated cell.
///
/// Vectors are indexed by device (0-based); device ids that appear in events
/// and scheduling decisions are 1-based, with 0 meaning "none".
struct ScenarioParams {
  int n_devices = 0;
  std::vector<double> arrival_rates;  // packets/s
  std::vector<double> tx_rates;       // packets/s
  std::vector<double> tx_powers;      // W
  std::vector<double> proc_rates;     // packets/s
  std::vector<double> proc_powers;    // W
  int tx_cap = 7;                     // M
  int proc_cap = 7;                   // M^loc
  std::vector<double> delay_weights;  // omega'
  std::vector<double> power_weights;  // gamma'

  double total_arrival_rate() const {
    return std::accumulate(arrival_rates.begin(), arrival_rates.end(), 0.0);
  }

  /// Objective weight on the average delay of device `n` (0-based).
  double delay_weight(int n) const {
    return delay_weights[n] * arrival_rates[n] / total_arrival_rate();
  }

  /// Objective weight on the average power of device `n` (0-based).
  double power_weight(int n) const { return power_weights[n] / n_devices; }

  /// Throws std::invalid_argument when sizes or signs are inconsistent.
  void validate() const;
};

/// Homogeneous parameters, handy for tests and small oracles.
ScenarioParams uniform_params(int n_devices, double arrival, double tx_rate, double tx_power,
                              double proc_rate, double proc_power, int tx_cap, int proc_cap,
                              double delay_weight = 0.5, double power_weight = 0.5);

}  // namespace mec
