// mecsim: sweeps, convergence traces, invariant checks and protocol reports.

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <random>
#include <sstream>

#include "mec/auction.hpp"
#include "mec/harness.hpp"
#include "oracles/checks.hpp"
#include "oracles/gradient_check.hpp"
#include "oracles/rvi.hpp"

namespace fs = std::filesystem;
using namespace mec;

namespace {

struct CommonArgs {
  std::string config;
  std::string seeds;
  std::string out;
  int workers = 0;
  std::string policy;
};

void add_common(CLI::App* cmd, CommonArgs& a) {
  cmd->add_option("--config", a.config, "JSON experiment config (defaults apply when omitted)")
      ->check(CLI::ExistingFile);
  cmd->add_option("--seed", a.seeds, "comma-separated seed list, overrides sweep.seeds");
  cmd->add_option("--out", a.out, "output directory, overrides output.dir");
  cmd->add_option("--workers", a.workers, "parallel grid points, overrides sweep.workers")
      ->check(CLI::PositiveNumber);
  cmd->add_option("--policy", a.policy, "single policy: icfmo | ico | qa | mumto");
}

ExperimentConfig resolve(const CommonArgs& a) {
  ExperimentConfig cfg = a.config.empty() ? ExperimentConfig{} : load_config(a.config);
  if (!a.seeds.empty()) cfg.seeds = parse_seed_list(a.seeds);
  if (!a.out.empty()) cfg.out_dir = a.out;
  if (a.workers > 0) cfg.workers = a.workers;
  if (!a.policy.empty()) cfg.policies = {a.policy};
  cfg.validate();
  fs::create_directories(cfg.out_dir);
  return cfg;
}

std::ofstream open_out(const ExperimentConfig& cfg, const std::string& name) {
  std::ofstream os(fs::path(cfg.out_dir) / name);
  if (!os) throw std::runtime_error("cannot write " + (fs::path(cfg.out_dir) / name).string());
  return os;
}

int cmd_run(const ExperimentConfig& cfg) {
  const auto rows = run_sweep(cfg);
  auto results = open_out(cfg, "results.csv");
  write_results_csv(results, rows);
  auto devices = open_out(cfg, "devices.csv");
  write_devices_csv(devices, rows);
  int bad = 0;
  for (const auto& r : rows) {
    std::cout << r.policy << " N=" << r.n_devices << " lambda=" << r.arrival_rate
              << " seed=" << r.seed << " J=" << r.objective << '\n';
    if (!r.conserved) {
      std::cerr << "packet conservation violated for " << r.policy << " seed " << r.seed << '\n';
      ++bad;
    }
  }
  return bad ? 2 : 0;
}

int cmd_trace(const ExperimentConfig& cfg) {
  std::string policy;
  for (const auto& p : cfg.policies)
    if (is_learning_policy(p)) {
      policy = p;
      break;
    }
  if (policy.empty()) throw std::invalid_argument("trace needs icfmo or ico in the policy list");
  const auto trace =
      convergence_trace(cfg, policy, cfg.n_devices.front(), cfg.arrival_rates.front(), cfg.seeds.front());
  auto os = open_out(cfg, "trace.csv");
  write_trace_csv(os, trace);
  std::cout << policy << ": " << trace.size() << " samples, final running J "
            << trace.back().running_objective << '\n';
  return 0;
}

int report(const char* name, bool ok, const std::string& detail) {
  std::cout << (ok ? "PASS " : "FAIL ") << name << ": " << detail << '\n';
  return ok ? 0 : 1;
}

int cmd_check(const ExperimentConfig& cfg, std::uint64_t scale) {
  const auto seed = cfg.seeds.front();
  int failures = 0;
  auto r = oracle::fuzz_transitions(seed, 10 * scale);
  failures += report("transitions", r.ok, r.detail);
  r = oracle::fuzz_commutation(seed, scale);
  failures += report("commutation", r.ok, r.detail);

  const auto q = oracle::queueing_check(0.5, 1.0, 7, 10 * scale, seed);
  failures += report("queueing", q.relative_error < 0.05,
                     "simulated " + std::to_string(q.simulated_delay) + " s vs closed form " +
                         std::to_string(q.closed_form_delay) + " s");

  std::mt19937_64 rng(seed);
  double worst = 0.0;
  std::size_t compared = 0;
  for (int i = 0; i < 100; ++i) {
    const auto g = oracle::check_gradient(oracle::random_instance(2, 1, 1, rng));
    worst = std::max(worst, g.max_relative_error);
    compared += g.compared;
  }
  std::ostringstream grad;
  grad << "max relative error " << worst << " over " << compared << " parameters";
  failures += report("gradient", worst < 1e-5 && compared > 0, grad.str());

  const auto small = uniform_params(1, 1.0, 2.0, 0.2, 1.0, 0.5, 1, 1);
  const auto rvi = oracle::relative_value_iteration(oracle::enumerate_model(small));
  std::ostringstream opt;
  opt << "gain " << rvi.gain << ", residual " << rvi.residual;
  failures += report("rvi", rvi.residual < 1e-8, opt.str());

  for (int n : cfg.n_devices) {
    const auto p = make_scenario(cfg, n, cfg.arrival_rates.front(), seed);
    r = oracle::sparse_update_check(p, std::min<std::uint64_t>(scale, 10000), seed);
    failures += report("sparse-update", r.ok, "N=" + std::to_string(n) + " " + r.detail);
  }
  return failures ? 1 : 0;
}

int cmd_proto(const ExperimentConfig& cfg, std::uint64_t epochs) {
  std::vector<LogEntry> log;
  bool first = true;
  int failures = 0;
  for (int n : cfg.n_devices) {
    for (auto seed : cfg.seeds) {
      const auto p = make_scenario(cfg, n, cfg.arrival_rates.front(), seed);
      EquivalenceOptions opts;
      opts.epochs = epochs;
      opts.agent = agent_options(cfg);
      opts.init_seed = derive_seed(seed, kInitStream);
      if (first && cfg.message_log) opts.log = &log;
      first = false;
      const auto rep = equivalence_check(p, seed, opts);
      std::cout << "N=" << n << " seed=" << seed << " epochs=" << rep.epochs
                << (rep.equivalent ? " equivalent" : " DIVERGED");
      if (!rep.equivalent)
        std::cout << " at epoch " << *rep.divergence_epoch << " (" << rep.divergence_field << ")";
      std::cout << " learning_round_bytes=" << 4 * learning_round_words(n)
                << " decision_round_bytes=" << 4 * decision_round_words(n)
                << " total_bytes=" << rep.total_bytes
                << (rep.overhead_exact ? "" : " OVERHEAD-MISMATCH") << '\n';
      if (!rep.equivalent || !rep.overhead_exact) ++failures;
    }
  }
  if (cfg.message_log) {
    auto os = open_out(cfg, "messages.csv");
    write_messages_csv(os, log);
  }
  return failures ? 1 : 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Edge-offloading CTMDP simulator and learners"};
  app.require_subcommand(1);
  CommonArgs run_args, trace_args, check_args, proto_args;
  auto* run_cmd = app.add_subcommand("run", "train and evaluate the policy grid; writes results.csv");
  add_common(run_cmd, run_args);
  auto* trace_cmd = app.add_subcommand("trace", "convergence trace of a learner; writes trace.csv");
  add_common(trace_cmd, trace_args);
  auto* check_cmd = app.add_subcommand("check", "invariant suite; nonzero exit on any violation");
  add_common(check_cmd, check_args);
  std::uint64_t check_scale = 100000;
  check_cmd->add_option("--scale", check_scale, "fuzz size (states); transitions use 10x");
  auto* proto_cmd =
      app.add_subcommand("proto", "distributed vs centralized equivalence; writes messages.csv");
  add_common(proto_cmd, proto_args);
  std::uint64_t proto_epochs = 10000;
  proto_cmd->add_option("--epochs", proto_epochs, "epochs per equivalence run");

  CLI11_PARSE(app, argc, argv);
  try {
    if (*run_cmd) return cmd_run(resolve(run_args));
    if (*trace_cmd) return cmd_trace(resolve(trace_args));
    if (*check_cmd) return cmd_check(resolve(check_args), check_scale);
    if (*proto_cmd) return cmd_proto(resolve(proto_args), proto_epochs);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 3;
  }
  return 0;
}
