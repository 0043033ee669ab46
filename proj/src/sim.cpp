#include "mec/sim.hpp"

#include <cmath>
#include <istream>
#include <ostream>
#include <stdexcept>

#include "mec/checkpoint.hpp"

namespace mec {

double Metrics::mean_delay(int n, const ScenarioParams& p) const {
  if (elapsed <= 0.0) return 0.0;
  const auto& d = devices.at(n);
  return (d.tx_area + d.proc_area) / elapsed / p.arrival_rates[n];
}

double Metrics::mean_tx_queue(int n) const {
  return elapsed > 0.0 ? devices.at(n).tx_area / elapsed : 0.0;
}

double Metrics::mean_power(int n, const ScenarioParams& p) const {
  if (elapsed <= 0.0) return 0.0;
  const auto& d = devices.at(n);
  return (p.tx_powers[n] * d.tx_busy + p.proc_powers[n] * d.proc_busy) / elapsed;
}

double Metrics::drop_rate(int n) const {
  const auto& d = devices.at(n);
  return d.arrivals ? static_cast<double>(d.drops) / static_cast<double>(d.arrivals) : 0.0;
}

double weighted_objective(const Metrics& m, const ScenarioParams& p) {
  if (m.elapsed <= 0.0) return 0.0;
  double j = 0.0;
  for (int n = 0; n < p.n_devices; ++n)
    j += p.delay_weight(n) * m.mean_delay(n, p) + p.power_weight(n) * m.mean_power(n, p);
  return j;
}

double cost_rate_average(const Metrics& m) {
  return m.elapsed > 0.0 ? m.cost_integral / m.elapsed : 0.0;
}

int sample_event(const std::vector<EventProbability>& dist, double u) {
  if (dist.empty()) throw std::logic_error("no possible event");
  double acc = 0.0;
  for (const auto& e : dist) {
    acc += e.probability;
    if (u < acc) return e.event;
  }
  return dist.back().event;
}

Simulation::Simulation(ScenarioParams params, Policy& policy, std::uint64_t seed)
    : params_(std::move(params)),
      policy_(policy),
      rng_(seed),
      window_(params_.n_devices),
      lifetime_(params_.n_devices) {
  params_.validate();
  const int n_dev = params_.n_devices;
  state_.tx_queues.assign(n_dev, 0);
  state_.proc_queues.assign(n_dev, 0);
  std::discrete_distribution<int> first(params_.arrival_rates.begin(),
                                        params_.arrival_rates.end());
  state_.event = first(rng_) + 1;
}

void Simulation::accumulate(Metrics& m, const PostDecisionState& post, double tau,
                            double cost) const {
  m.elapsed += tau;
  m.cost_integral += cost * tau;
  ++m.epochs;
  for (int n = 0; n < params_.n_devices; ++n) {
    auto& d = m.devices[n];
    d.tx_area += post.tx_queues[n] * tau;
    d.proc_area += post.proc_queues[n] * tau;
    if (post.scheduled == n + 1) d.tx_busy += tau;
    if (post.proc_queues[n] > 0) d.proc_busy += tau;
  }
}

void Simulation::step() {
  const bool in_window = clock_.epoch >= warmup_;
  const auto decision = policy_.decide(state_, rng_);
  if (!is_eligible(state_, decision.action, params_))
    throw std::logic_error("policy " + policy_.name() + " chose an ineligible action in " +
                           to_string(state_));
  const auto post = post_decision(state_, decision.action);
  policy_.observe(post, clock_.last_sojourn);

  if (state_.event > 0) {
    const int n = state_.event - 1;
    for (Metrics* m : {&lifetime_, in_window ? &window_ : nullptr}) {
      if (!m) continue;
      auto& d = m->devices[n];
      ++d.arrivals;
      if (decision.action.offload == -1) ++d.drops;
      if (decision.action.offload == 1) ++d.offloaded;
    }
  }

  const double beta = sojourn_rate(post, params_);
  const double tau = std::exponential_distribution<double>(beta)(rng_);
  const double cost = reward_rate(post, params_);
  accumulate(lifetime_, post, tau, cost);
  if (in_window) accumulate(window_, post, tau, cost);

  const auto dist = transition_distribution(post, params_);
  const double u = std::uniform_real_distribution<double>(0.0, 1.0)(rng_);
  const int event = sample_event(dist, u);
  if (event == 0) {
    const int n = post.scheduled - 1;
    ++lifetime_.devices[n].tx_departures;
    if (in_window) ++window_.devices[n].tx_departures;
  } else if (event < 0) {
    const int n = -event - 1;
    ++lifetime_.devices[n].proc_departures;
    if (in_window) ++window_.devices[n].proc_departures;
  }

  if (trace_) trace_({clock_.epoch, clock_.time, state_, decision, post, tau, event});
  state_ = next_state(post, event, params_);
  ++clock_.epoch;
  clock_.time += tau;
  clock_.last_sojourn = tau;
}

void Simulation::run(std::uint64_t epochs) {
  for (std::uint64_t i = 0; i < epochs; ++i) step();
}

bool Simulation::conserved() const {
  for (int n = 0; n < params_.n_devices; ++n) {
    const auto& d = lifetime_.devices[n];
    const std::uint64_t queued = state_.tx_queues[n] + state_.proc_queues[n];
    if (d.arrivals - d.drops != d.tx_departures + d.proc_departures + queued) return false;
  }
  return true;
}

namespace {

void write_metrics(std::ostream& os, const char* key, const Metrics& m) {
  os << key << ' ' << m.devices.size() << ' ' << m.epochs << ' ';
  ckpt::write_double(os, m.elapsed);
  os << ' ';
  ckpt::write_double(os, m.cost_integral);
  os << '\n';
  for (const auto& d : m.devices) {
    for (double v : {d.tx_area, d.proc_area, d.tx_busy, d.proc_busy}) {
      ckpt::write_double(os, v);
      os << ' ';
    }
    os << d.arrivals << ' ' << d.drops << ' ' << d.offloaded << ' ' << d.tx_departures << ' '
       << d.proc_departures << '\n';
  }
}

Metrics read_metrics(std::istream& is, const char* key) {
  ckpt::expect_key(is, key);
  std::size_t n = 0;
  is >> n;
  Metrics m(static_cast<int>(n));
  is >> m.epochs;
  m.elapsed = ckpt::read_double(is);
  m.cost_integral = ckpt::read_double(is);
  for (auto& d : m.devices) {
    d.tx_area = ckpt::read_double(is);
    d.proc_area = ckpt::read_double(is);
    d.tx_busy = ckpt::read_double(is);
    d.proc_busy = ckpt::read_double(is);
    is >> d.arrivals >> d.drops >> d.offloaded >> d.tx_departures >> d.proc_departures;
  }
  return m;
}

}  // namespace

void Simulation::save(std::ostream& os) const {
  os << "mecrl-sim 1\nrng " << rng_ << "\nstate " << state_.n_devices();
  for (int v : state_.tx_queues) os << ' ' << v;
  for (int v : state_.proc_queues) os << ' ' << v;
  os << ' ' << state_.event << ' ' << state_.scheduled_prev << "\nclock " << clock_.epoch << ' ';
  ckpt::write_double(os, clock_.time);
  os << ' ';
  ckpt::write_double(os, clock_.last_sojourn);
  os << "\nwarmup " << warmup_ << '\n';
  write_metrics(os, "window", window_);
  write_metrics(os, "lifetime", lifetime_);
}

void Simulation::load(std::istream& is) {
  ckpt::expect_key(is, "mecrl-sim");
  int version = 0;
  is >> version;
  if (version != 1) throw std::runtime_error("unsupported simulation checkpoint");
  ckpt::expect_key(is, "rng");
  Rng rng;
  is >> rng;
  ckpt::expect_key(is, "state");
  int n = 0;
  is >> n;
  if (n != params_.n_devices) throw std::runtime_error("checkpoint does not match the scenario");
  GlobalState s;
  s.tx_queues.resize(n);
  s.proc_queues.resize(n);
  for (auto& v : s.tx_queues) is >> v;
  for (auto& v : s.proc_queues) is >> v;
  is >> s.event >> s.scheduled_prev;
  ckpt::expect_key(is, "clock");
  SimClock c;
  is >> c.epoch;
  c.time = ckpt::read_double(is);
  c.last_sojourn = ckpt::read_double(is);
  ckpt::expect_key(is, "warmup");
  std::uint64_t warmup = 0;
  is >> warmup;
  auto window = read_metrics(is, "window");
  auto lifetime = read_metrics(is, "lifetime");
  if (!is || !is_valid(s, params_)) throw std::runtime_error("simulation checkpoint is corrupt");
  rng_ = rng;
  state_ = std::move(s);
  clock_ = c;
  warmup_ = warmup;
  window_ = std::move(window);
  lifetime_ = std::move(lifetime);
}

RunResult run(const ScenarioParams& params, Policy& policy, std::uint64_t horizon,
              std::uint64_t seed, const SimOptions& opts) {
  if (horizon == 0) throw std::invalid_argument("horizon must be positive");
  if (opts.warmup_fraction < 0.0 || opts.warmup_fraction >= 1.0)
    throw std::invalid_argument("warmup fraction must lie in [0, 1)");
  Simulation sim(params, policy, seed);
  sim.set_warmup(static_cast<std::uint64_t>(opts.warmup_fraction * static_cast<double>(horizon)));
  sim.run(horizon);
  return {sim.window(), sim.lifetime(), sim.state(), sim.clock(), sim.conserved()};
}

}  // namespace mec
