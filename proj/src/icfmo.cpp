#include "mec/icfmo.hpp"

#include <istream>
#include <ostream>
#include <stdexcept>

#include "mec/checkpoint.hpp"

namespace mec {

LearningAgent::LearningAgent(ScenarioParams params, AgentOptions opts)
    : params_(std::move(params)),
      space_(params_),
      learner_(LearnerState::empty(params_.n_devices, space_.size())),
      opts_(opts) {
  params_.validate();
}

PolicyDecision LearningAgent::greedy(const GlobalState& s) const {
  const auto candidates = eligible_actions(s, params_);
  std::vector<double> scores(candidates.size());
  const long count = static_cast<long>(candidates.size());
  if (opts_.parallel_candidates && count > 1) {
#pragma omp parallel for schedule(dynamic, 1)
    for (long i = 0; i < count; ++i) scores[i] = score(post_decision(s, candidates[i]));
  } else {
    for (long i = 0; i < count; ++i) scores[i] = score(post_decision(s, candidates[i]));
  }
  return decide_by_scores(candidates, scores);
}

PolicyDecision LearningAgent::decide(const GlobalState& s, Rng& rng) {
  return epsilon_greedy(learner_.epoch, rng, greedy(s), s, params_, opts_.exploration);
}

void LearningAgent::observe(const PostDecisionState& post, double prev_sojourn) {
  if (!opts_.learning) return;
  if (prev_) last_update_ = learn(*prev_, post, prev_sojourn);
  register_visit(learner_, encode(post, space_), space_.size());
  prev_ = post;
}

namespace {

void write_ints(std::ostream& os, const char* key, const std::vector<int>& v) {
  os << key << ' ' << v.size();
  for (int x : v) os << ' ' << x;
  os << '\n';
}

std::vector<int> read_ints(std::istream& is, const char* key) {
  ckpt::expect_key(is, key);
  std::size_t n = 0;
  is >> n;
  std::vector<int> v(n);
  for (auto& x : v) is >> x;
  return v;
}

}  // namespace

void LearningAgent::save_common(std::ostream& os) const {
  os << "agent-prev " << (prev_ ? 1 : 0) << '\n';
  if (prev_) {
    write_ints(os, "tx", prev_->tx_queues);
    write_ints(os, "proc", prev_->proc_queues);
    os << "event " << prev_->event << " scheduled " << prev_->scheduled << " scheduled_prev "
       << prev_->scheduled_prev << '\n';
  }
}

void LearningAgent::load_common(std::istream& is) {
  ckpt::expect_key(is, "agent-prev");
  int has = 0;
  is >> has;
  prev_.reset();
  last_update_.reset();
  if (has) {
    PostDecisionState p;
    p.tx_queues = read_ints(is, "tx");
    p.proc_queues = read_ints(is, "proc");
    ckpt::expect_key(is, "event");
    is >> p.event;
    ckpt::expect_key(is, "scheduled");
    is >> p.scheduled;
    ckpt::expect_key(is, "scheduled_prev");
    is >> p.scheduled_prev;
    prev_ = std::move(p);
  }
  if (!is) throw std::runtime_error("agent checkpoint truncated");
}

IcfmoAgent::IcfmoAgent(ScenarioParams params, NetParams net, AgentOptions opts)
    : LearningAgent(std::move(params), opts), net_(std::move(net)) {
  if (net_.n_devices != params_.n_devices || net_.local_states != space_.size())
    throw std::invalid_argument("network shape does not match the scenario");
}

IcfmoAgent IcfmoAgent::random_init(ScenarioParams params, std::uint64_t seed, AgentOptions opts,
                                   double eta) {
  std::mt19937_64 rng(seed);
  const int d = LocalStateSpace(params).size();
  auto net = NetParams::initialized(params.n_devices, d, rng, eta);
  return IcfmoAgent(std::move(params), std::move(net), opts);
}

std::vector<double> IcfmoAgent::local_bids(const PostDecisionState& post) const {
  const auto active = encode(post, space_);
  const auto trace = forward(active, net_);
  const double beta = sojourn_rate(post, params_);
  std::vector<double> bids(params_.n_devices);
  for (int n = 0; n < params_.n_devices; ++n)
    bids[n] = local_bid(n, trace, local_reward(post, n, params_, beta), learner_.avg_reward[n], beta);
  return bids;
}

double IcfmoAgent::score(const PostDecisionState& post) const {
  double total = 0.0;
  for (double b : local_bids(post)) total += b;
  return total;
}

double IcfmoAgent::value(const PostDecisionState& post) const {
  return forward(encode(post, space_), net_).value;
}

TdResult IcfmoAgent::learn(const PostDecisionState& prev, const PostDecisionState& next,
                           double prev_sojourn) {
  const int n_dev = params_.n_devices;
  const auto prev_active = encode(prev, space_);
  const auto next_active = encode(next, space_);
  const double next_beta = sojourn_rate(next, params_);
  const double prev_beta = sojourn_rate(prev, params_);
  std::vector<double> next_rewards(n_dev), prev_rewards(n_dev);
  for (int n = 0; n < n_dev; ++n) {
    next_rewards[n] = local_reward(next, n, params_, next_beta);
    prev_rewards[n] = local_reward(prev, n, params_, prev_beta);
  }
  return td_update(net_, learner_,
                   {prev_active, next_active, next_rewards, next_beta, prev_rewards, prev_sojourn},
                   opts_.steps);
}

void IcfmoAgent::save(std::ostream& os) const {
  write_net_checkpoint(os, net_, learner_);
  save_common(os);
}

void IcfmoAgent::load(std::istream& is) {
  NetParams net;
  LearnerState learner;
  read_net_checkpoint(is, net, learner);
  if (net.n_devices != params_.n_devices || net.local_states != space_.size())
    throw std::runtime_error("checkpoint does not match the scenario");
  net_ = std::move(net);
  learner_ = std::move(learner);
  load_common(is);
}

}  // namespace mec
