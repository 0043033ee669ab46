#pragma once

// Invariant suites shared by the `check` verb and the acceptance binary.

#include <cstdint>
#include <string>

#include "mec/params.hpp"

namespace mec::oracle {

struct CheckResult {
  bool ok = true;
  std::string detail;
};

/// Random walks under uniformly random eligible actions over random small
/// scenarios: validity of every state, distributions summing to 1 within 1e-12,
/// sojourn rate equal to the sum of event rates.
CheckResult fuzz_transitions(std::uint64_t seed, std::uint64_t transitions);

/// Global/local commutation on random valid states: decomposition round trip,
/// post-decision map and every possible event transition.
CheckResult fuzz_commutation(std::uint64_t seed, std::uint64_t states);

struct QueueingReport {
  double simulated_delay = 0.0;
  double closed_form_delay = 0.0;
  double relative_error = 0.0;
  double seconds = 0.0;
};

/// One device that always offloads when it can: the transmission queue is
/// M/M/1/K with K = tx_cap.
QueueingReport queueing_check(double lambda, double mu, int capacity, std::uint64_t epochs,
                              std::uint64_t seed);

/// Runs the TD learner for `epochs` and bit-compares parameters before and
/// after every update: exactly the N active node values and f-weight columns
/// may change (node values start nonzero so every active entry moves).
CheckResult sparse_update_check(const ScenarioParams& p, std::uint64_t epochs, std::uint64_t seed);

}  // namespace mec::oracle
