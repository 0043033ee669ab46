#include "mec/ico.hpp"

#include <cmath>
#include <istream>
#include <ostream>
#include <stdexcept>

#include "mec/checkpoint.hpp"

namespace mec {

IcoParams IcoParams::zeros(int n_devices, int local_states, double eta) {
  if (n_devices < 1 || local_states < 1) throw std::invalid_argument("empty network shape");
  IcoParams p;
  p.n_devices = n_devices;
  p.local_states = local_states;
  p.c_weights.assign(local_states, 0.0);
  p.out_weights.assign(n_devices, 0.0);
  p.eta = eta;
  return p;
}

IcoParams IcoParams::initialized(int n_devices, int local_states, std::mt19937_64& rng,
                                 double eta) {
  auto p = zeros(n_devices, local_states, eta);
  std::uniform_real_distribution<double> conv(-0.1, 0.1);
  for (auto& w : p.c_weights) w = conv(rng);
  return p;
}

IcoTrace ico_forward(std::span<const int> active, const IcoParams& net) {
  if (static_cast<int>(active.size()) != net.n_devices)
    throw std::invalid_argument("input has wrong row count");
  IcoTrace t;
  t.active.assign(active.begin(), active.end());
  t.conv.resize(net.n_devices);
  t.features.resize(net.n_devices);
  for (int n = 0; n < net.n_devices; ++n) {
    if (active[n] < 0 || active[n] >= net.local_states)
      throw std::out_of_range("local state index out of range");
    t.conv[n] = net.c_weights[active[n]];
    t.features[n] = std::tanh(t.conv[n]);
    t.value += net.out_weights[n] * t.features[n];
  }
  if (!std::isfinite(t.value)) throw std::runtime_error("non-finite network output");
  return t;
}

TdResult ico_update(IcoParams& net, LearnerState& learner, const TdInputs& in,
                    const StepSchedule& sched) {
  const int n_dev = net.n_devices;
  if (learner.epoch < 1) throw std::logic_error("ico_update needs a previous post-decision state");
  const auto prev = ico_forward(in.prev_active, net);
  const auto next = ico_forward(in.new_active, net);

  TdResult r;
  r.node_errors.resize(n_dev);
  for (int n = 0; n < n_dev; ++n) {
    r.node_errors[n] = node_td_error(in.new_rewards[n], net.eta, next.features[n],
                                     net.out_weights[n], prev.features[n], net.out_weights[n],
                                     learner.avg_reward[n], in.new_beta);
    r.error += r.node_errors[n];
  }
  const double dv = r.error;
  r.steps = step_sizes(learner.epoch, 0, sched);
  const double eps = r.steps.epoch_eps;

  std::vector<double> out_step(n_dev), conv_step(n_dev);
  for (int n = 0; n < n_dev; ++n) {
    out_step[n] = eps * dv * prev.features[n];
    conv_step[n] = eps * dv * net.out_weights[n] * tanh_derivative(prev.conv[n]);
    if (!std::isfinite(out_step[n]) || !std::isfinite(conv_step[n]))
      throw std::runtime_error("non-finite TD increment");
  }
  for (int n = 0; n < n_dev; ++n) net.out_weights[n] += out_step[n];
  for (int n = 0; n < n_dev; ++n) net.c_weights[prev.active[n]] += conv_step[n];

  learner.time_total += in.prev_duration;
  for (int n = 0; n < n_dev; ++n) {
    learner.reward_totals[n] += in.prev_rewards[n];
    learner.avg_reward[n] = (1.0 - r.steps.alpha) * learner.avg_reward[n] +
                            r.steps.alpha * (learner.reward_totals[n] / learner.time_total);
  }
  return r;
}

IcoAgent::IcoAgent(ScenarioParams params, IcoParams net, AgentOptions opts)
    : LearningAgent(std::move(params), opts), net_(std::move(net)) {
  if (net_.n_devices != params_.n_devices || net_.local_states != space_.size())
    throw std::invalid_argument("network shape does not match the scenario");
}

IcoAgent IcoAgent::random_init(ScenarioParams params, std::uint64_t seed, AgentOptions opts,
                               double eta) {
  std::mt19937_64 rng(seed);
  const int d = LocalStateSpace(params).size();
  auto net = IcoParams::initialized(params.n_devices, d, rng, eta);
  return IcoAgent(std::move(params), std::move(net), opts);
}

double IcoAgent::score(const PostDecisionState& post) const {
  const auto trace = ico_forward(encode(post, space_), net_);
  const double beta = sojourn_rate(post, params_);
  double total = 0.0;
  for (int n = 0; n < params_.n_devices; ++n)
    total += node_bid(local_reward(post, n, params_, beta), trace.features[n],
                      net_.out_weights[n], learner_.avg_reward[n], beta);
  return total;
}

double IcoAgent::value(const PostDecisionState& post) const {
  return ico_forward(encode(post, space_), net_).value;
}

TdResult IcoAgent::learn(const PostDecisionState& prev, const PostDecisionState& next,
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
  return ico_update(net_, learner_,
                    {prev_active, next_active, next_rewards, next_beta, prev_rewards, prev_sojourn},
                    opts_.steps);
}

void IcoAgent::save(std::ostream& os) const {
  os << "mecrl-ico 1\nn_devices " << net_.n_devices << "\nlocal_states " << net_.local_states
     << "\neta ";
  ckpt::write_double(os, net_.eta);
  os << '\n';
  ckpt::write_doubles(os, "c_weights", net_.c_weights);
  ckpt::write_doubles(os, "out_weights", net_.out_weights);
  os << "visits " << learner_.visits.size();
  for (auto v : learner_.visits) os << ' ' << v;
  os << '\n';
  ckpt::write_doubles(os, "reward_totals", learner_.reward_totals);
  os << "time_total ";
  ckpt::write_double(os, learner_.time_total);
  os << '\n';
  ckpt::write_doubles(os, "avg_reward", learner_.avg_reward);
  os << "epoch " << learner_.epoch << '\n';
  save_common(os);
}

void IcoAgent::load(std::istream& is) {
  ckpt::expect_key(is, "mecrl-ico");
  int version = 0;
  is >> version;
  if (version != 1) throw std::runtime_error("unsupported checkpoint version");
  IcoParams net;
  ckpt::expect_key(is, "n_devices");
  is >> net.n_devices;
  ckpt::expect_key(is, "local_states");
  is >> net.local_states;
  ckpt::expect_key(is, "eta");
  net.eta = ckpt::read_double(is);
  net.c_weights = ckpt::read_doubles(is, "c_weights");
  net.out_weights = ckpt::read_doubles(is, "out_weights");
  LearnerState l;
  ckpt::expect_key(is, "visits");
  std::size_t count = 0;
  is >> count;
  l.visits.resize(count);
  for (auto& v : l.visits) is >> v;
  l.reward_totals = ckpt::read_doubles(is, "reward_totals");
  ckpt::expect_key(is, "time_total");
  l.time_total = ckpt::read_double(is);
  l.avg_reward = ckpt::read_doubles(is, "avg_reward");
  ckpt::expect_key(is, "epoch");
  is >> l.epoch;
  if (!is || net.n_devices != params_.n_devices || net.local_states != space_.size() ||
      net.c_weights.size() != static_cast<std::size_t>(net.local_states) ||
      net.out_weights.size() != static_cast<std::size_t>(net.n_devices))
    throw std::runtime_error("checkpoint does not match the scenario");
  net_ = std::move(net);
  learner_ = std::move(l);
  load_common(is);
}

}  // namespace mec
