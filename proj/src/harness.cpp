#include "mec/harness.hpp"

#include <chrono>
#include <exception>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include "mec/baselines.hpp"
#include "mec/ico.hpp"

namespace mec {

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) {
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (stream + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

AgentOptions agent_options(const ExperimentConfig& cfg) {
  AgentOptions o;
  o.exploration = cfg.exploration;
  o.steps = cfg.steps;
  o.parallel_candidates = cfg.parallel_candidates;
  return o;
}

std::unique_ptr<LearningAgent> make_learner(const std::string& name, const ScenarioParams& p,
                                            const ExperimentConfig& cfg, std::uint64_t seed) {
  const auto init = derive_seed(seed, kInitStream);
  if (name == "icfmo")
    return std::make_unique<IcfmoAgent>(IcfmoAgent::random_init(p, init, agent_options(cfg), cfg.eta));
  if (name == "ico")
    return std::make_unique<IcoAgent>(IcoAgent::random_init(p, init, agent_options(cfg), cfg.eta));
  throw std::invalid_argument("not a learning policy: " + name);
}

std::unique_ptr<Policy> make_baseline(const std::string& name, const ScenarioParams& p) {
  if (name == "qa") return std::make_unique<QaPolicy>(p);
  if (name == "mumto") return std::make_unique<MumtoPolicy>(p);
  throw std::invalid_argument("not a baseline policy: " + name);
}

ResultRow summarize(const Metrics& m, const ScenarioParams& p) {
  ResultRow r;
  r.n_devices = p.n_devices;
  std::uint64_t arrivals = 0, drops = 0;
  for (int n = 0; n < p.n_devices; ++n) {
    r.delay_weights.push_back(p.delay_weight(n));
    r.power_weights.push_back(p.power_weight(n));
    r.device_delays.push_back(m.mean_delay(n, p));
    r.device_powers.push_back(m.mean_power(n, p));
    r.mean_delay += r.device_delays.back() / p.n_devices;
    r.mean_power += r.device_powers.back() / p.n_devices;
    arrivals += m.devices[n].arrivals;
    drops += m.devices[n].drops;
  }
  r.objective = weighted_objective(m, p);
  r.drop_rate = arrivals ? static_cast<double>(drops) / static_cast<double>(arrivals) : 0.0;
  return r;
}

namespace {

std::string point_tag(const std::string& policy, int n, double lambda, std::uint64_t seed) {
  std::ostringstream os;
  os << policy << ".N" << n << ".l" << lambda << ".s" << seed;
  return os.str();
}

}  // namespace

ResultRow evaluate_point(const ExperimentConfig& cfg, const std::string& policy, int n_devices,
                         double arrival_rate, std::uint64_t seed) {
  const auto start = std::chrono::steady_clock::now();
  const auto params = make_scenario(cfg, n_devices, arrival_rate, seed);
  const SimOptions opts{cfg.warmup_fraction};
  const auto eval_seed = derive_seed(seed, kEvalStream);

  RunResult eval;
  std::uint64_t epochs = cfg.eval_epochs;
  bool conserved = true;
  if (is_learning_policy(policy)) {
    auto agent = make_learner(policy, params, cfg, seed);
    Simulation train(params, *agent, derive_seed(seed, kTrainStream));
    train.run(cfg.horizon);
    conserved = train.conserved();
    if (cfg.checkpoints) {
      std::filesystem::create_directories(cfg.out_dir);
      std::ofstream os(std::filesystem::path(cfg.out_dir) /
                       ("checkpoint." + point_tag(policy, n_devices, arrival_rate, seed) + ".txt"));
      agent->save(os);
    }
    agent->freeze();
    eval = run(params, *agent, cfg.eval_epochs, eval_seed, opts);
    epochs += cfg.horizon;
  } else {
    auto baseline = make_baseline(policy, params);
    eval = run(params, *baseline, cfg.eval_epochs, eval_seed, opts);
  }

  auto row = summarize(eval.window, params);
  row.policy = policy;
  row.arrival_rate = arrival_rate;
  row.seed = seed;
  row.epochs = epochs;
  row.conserved = conserved && eval.conserved;
  row.wall_clock_s =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return row;
}

std::vector<ResultRow> run_sweep(const ExperimentConfig& cfg) {
  cfg.validate();
  struct Point {
    std::string policy;
    int n;
    double lambda;
    std::uint64_t seed;
  };
  std::vector<Point> grid;
  for (const auto& pol : cfg.policies)
    for (int n : cfg.n_devices)
      for (double l : cfg.arrival_rates)
        for (auto s : cfg.seeds) grid.push_back({pol, n, l, s});

  std::vector<ResultRow> rows(grid.size());
  std::vector<std::exception_ptr> errors(grid.size());
  const long count = static_cast<long>(grid.size());
#pragma omp parallel for num_threads(cfg.workers) schedule(dynamic, 1)
  for (long i = 0; i < count; ++i) {
    try {
      const auto& g = grid[i];
      rows[i] = evaluate_point(cfg, g.policy, g.n, g.lambda, g.seed);
    } catch (...) {
      errors[i] = std::current_exception();
    }
  }
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
  return rows;
}

void write_results_csv(std::ostream& os, const std::vector<ResultRow>& rows) {
  os << "policy,n_devices,arrival_rate,seed,objective,mean_delay,mean_power,drop_rate,epochs,"
        "wall_clock_s\n";
  os << std::setprecision(17);
  for (const auto& r : rows)
    os << r.policy << ',' << r.n_devices << ',' << r.arrival_rate << ',' << r.seed << ','
       << r.objective << ',' << r.mean_delay << ',' << r.mean_power << ',' << r.drop_rate << ','
       << r.epochs << ',' << r.wall_clock_s << '\n';
}

void write_devices_csv(std::ostream& os, const std::vector<ResultRow>& rows) {
  os << "policy,n_devices,arrival_rate,seed,device,delay_weight,power_weight,delay,power\n";
  os << std::setprecision(17);
  for (const auto& r : rows)
    for (std::size_t n = 0; n < r.device_delays.size(); ++n)
      os << r.policy << ',' << r.n_devices << ',' << r.arrival_rate << ',' << r.seed << ','
         << n + 1 << ',' << r.delay_weights[n] << ',' << r.power_weights[n] << ','
         << r.device_delays[n] << ',' << r.device_powers[n] << '\n';
}

PostDecisionState empty_post(int n_devices) {
  PostDecisionState p;
  p.tx_queues.assign(n_devices, 0);
  p.proc_queues.assign(n_devices, 0);
  return p;
}

std::vector<TracePoint> convergence_trace(const ExperimentConfig& cfg, const std::string& policy,
                                          int n_devices, double arrival_rate, std::uint64_t seed) {
  if (!is_learning_policy(policy))
    throw std::invalid_argument("convergence traces need a learning policy, got " + policy);
  const auto params = make_scenario(cfg, n_devices, arrival_rate, seed);
  auto agent = make_learner(policy, params, cfg, seed);
  Simulation sim(params, *agent, derive_seed(seed, kTrainStream));
  const auto probe = empty_post(n_devices);

  std::vector<TracePoint> out;
  out.reserve(cfg.horizon / cfg.trace_stride + 1);
  out.push_back({0, agent->value(probe), 0.0});
  for (std::uint64_t done = 0; done < cfg.horizon;) {
    const auto step = std::min(cfg.trace_stride, cfg.horizon - done);
    sim.run(step);
    done += step;
    if (done % cfg.trace_stride == 0)
      out.push_back({done, agent->value(probe), cost_rate_average(sim.lifetime())});
  }
  return out;
}

void write_trace_csv(std::ostream& os, const std::vector<TracePoint>& trace) {
  os << "epoch,value,running_objective\n" << std::setprecision(17);
  for (const auto& t : trace) os << t.epoch << ',' << t.value << ',' << t.running_objective << '\n';
}

}  // namespace mec
