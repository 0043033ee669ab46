// Acceptance suite: one PASS/FAIL line per criterion.
//
// Exit status is nonzero when a criterion fails, unless that criterion is
// listed with --known-red; a known-red criterion that passes is reported too.

#include <CLI11.hpp>

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <functional>
#include <iostream>
#include <set>
#include <sstream>

#include "mec/auction.hpp"
#include "mec/baselines.hpp"
#include "mec/harness.hpp"
#include "oracles/checks.hpp"
#include "oracles/gradient_check.hpp"
#include "oracles/rvi.hpp"

using namespace mec;

namespace {

struct Outcome {
  bool pass;
  std::string detail;
};

std::string fmt(const char* f, double a) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, a);
  return buf;
}

double median3(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  return v[v.size() / 2];
}

Outcome queueing() {
  const auto q = oracle::queueing_check(0.5, 1.0, 7, 1000000, 11);
  std::ostringstream os;
  os << "simulated " << q.simulated_delay << " s, closed form " << q.closed_form_delay
     << " s, rel err " << q.relative_error << ", " << q.seconds << " s wall";
  return {q.relative_error < 0.05 && q.seconds < 60.0, os.str()};
}

Outcome algebra() {
  const auto t = oracle::fuzz_transitions(21, 1000000);
  const auto c = oracle::fuzz_commutation(22, 100000);
  return {t.ok && c.ok, "transitions: " + t.detail + "; commutation: " + c.detail};
}

Outcome gradient() {
  std::mt19937_64 rng(31);
  double worst = 0.0;
  std::size_t compared = 0;
  for (int i = 0; i < 100; ++i) {
    const auto r = oracle::check_gradient(oracle::random_instance(2, 1, 1, rng));
    worst = std::max(worst, r.max_relative_error);
    compared += r.compared;
  }
  std::ostringstream os;
  os << "max relative error " << worst << " over " << compared << " parameters";
  return {worst < 1e-5 && compared > 0, os.str()};
}

Outcome sparse() {
  ExperimentConfig cfg;
  bool ok = true;
  std::string detail;
  for (int n : {1, 3}) {
    const auto r = oracle::sparse_update_check(make_scenario(cfg, n, 1.0, 41), 10000, 41);
    ok = ok && r.ok;
    detail += "N=" + std::to_string(n) + ": " + r.detail + "; ";
  }
  return {ok, detail};
}

Outcome equivalence() {
  ExperimentConfig cfg;
  bool ok = true;
  std::ostringstream os;
  for (int n : {1, 3, 10}) {
    for (std::uint64_t seed : {1, 2, 3}) {
      EquivalenceOptions opts;
      opts.epochs = 100000;
      opts.agent = agent_options(cfg);
      opts.init_seed = derive_seed(seed, kInitStream);
      const auto r = equivalence_check(make_scenario(cfg, n, 1.0, seed), seed, opts);
      if (!r.equivalent || !r.overhead_exact || r.epochs != opts.epochs) {
        ok = false;
        os << "N=" << n << " seed " << seed << " diverged";
        if (r.divergence_epoch) os << " at epoch " << *r.divergence_epoch << " (" << r.divergence_field << ")";
        os << "; ";
      }
    }
    os << "N=" << n << " " << 4 * learning_round_words(n) << " B/learning round; ";
  }
  if (ok) os << "9 runs bit-exact over 1e5 epochs";
  return {ok, os.str()};
}

// Greedy gain of the trained agent, computed exactly on the enumerated chain.
Outcome small_optimality() {
  ExperimentConfig cfg;
  cfg.scenario.tx_cap = 1;
  cfg.scenario.proc_cap = 1;
  std::vector<double> rel;
  std::ostringstream os;
  for (std::uint64_t seed : {1, 2, 3}) {
    const auto p = make_scenario(cfg, 1, 1.0, seed);
    const auto model = oracle::enumerate_model(p);
    const auto opt = oracle::relative_value_iteration(model);
    auto agent = make_learner("icfmo", p, cfg, seed);
    Simulation sim(p, *agent, derive_seed(seed, kTrainStream));
    sim.run(2000000);
    const double g =
        oracle::policy_gain(model, [&](const GlobalState& s) { return agent->greedy(s).action; });
    rel.push_back(std::abs(g - opt.gain) / opt.gain);
    os << "seed " << seed << " theta* " << opt.gain << " icfmo " << g << "; ";
  }
  const double med = median3(rel);
  os << "median rel err " << med;
  return {med <= 0.05, os.str()};
}

Outcome beats_baselines() {
  ExperimentConfig cfg;
  int wins = 0;
  std::ostringstream os;
  for (std::uint64_t seed : {1, 2, 3}) {
    const double ic = evaluate_point(cfg, "icfmo", 2, 1.0, seed).objective;
    const double qa = evaluate_point(cfg, "qa", 2, 1.0, seed).objective;
    const double mu = evaluate_point(cfg, "mumto", 2, 1.0, seed).objective;
    if (ic < qa && ic < mu) ++wins;
    // Exact optimum for context: no policy can beat it.
    const auto opt = oracle::relative_value_iteration(
        oracle::enumerate_model(make_scenario(cfg, 2, 1.0, seed)), 1e-10);
    os << "seed " << seed << " J icfmo " << ic << " qa " << qa << " mumto " << mu << " optimum "
       << opt.gain << "; ";
  }
  os << wins << "/3 seeds below both";
  return {wins >= 2, os.str()};
}

Outcome qa_trend() {
  ExperimentConfig cfg;
  std::vector<double> mean;
  std::ostringstream os;
  for (int n : {2, 10, 20}) {
    double sum = 0.0;
    for (std::uint64_t seed : {1, 2, 3}) sum += evaluate_point(cfg, "qa", n, 1.0, seed).objective;
    mean.push_back(sum / 3.0);
    os << "N=" << n << " J " << mean.back() << "; ";
  }
  const bool up = mean[0] < mean[1] && mean[1] < mean[2];
  os << (up ? "increasing" : "not increasing");
  return {up, os.str()};
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"acceptance criteria"};
  std::vector<int> known_red;
  std::vector<int> only;
  app.add_option("--known-red", known_red, "criteria expected to fail; their FAIL does not set the exit code");
  app.add_option("--only", only, "run a subset of criteria");
  CLI11_PARSE(app, argc, argv);

  const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria{
      {"queueing oracle", queueing},
      {"ctmdp algebra", algebra},
      {"gradient fidelity", gradient},
      {"sparse update", sparse},
      {"distributed equivalence", equivalence},
      {"small-instance optimality", small_optimality},
      {"icfmo below baselines", beats_baselines},
      {"qa trend over N", qa_trend},
  };
  const std::set<int> red(known_red.begin(), known_red.end());
  int unexpected = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const int id = static_cast<int>(i) + 1;
    if (!only.empty() && std::find(only.begin(), only.end(), id) == only.end()) continue;
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    std::cout << (o.pass ? "PASS" : "FAIL") << ' ' << id << ' ' << criteria[i].first << ": "
              << o.detail << fmt(" [%.1f s]", secs);
    if (red.count(id)) std::cout << (o.pass ? " (listed known-red, now passing)" : " (known red)");
    std::cout << std::endl;
    if (!o.pass && !red.count(id)) ++unexpected;
  }
  return unexpected ? 1 : 0;
}
