#include "mec/value_net.hpp"

#include <cmath>
#include <numeric>
#include <stdexcept>

namespace mec {

NetParams NetParams::zeros(int n_devices, int local_states, double eta) {
  if (n_devices < 1 || local_states < 1) throw std::invalid_argument("empty network shape");
  if (!(eta > 0.0 && eta <= 1.0)) throw std::invalid_argument("eta must lie in (0, 1]");
  NetParams p;
  p.n_devices = n_devices;
  p.local_states = local_states;
  const auto cols = static_cast<std::size_t>(n_devices) * local_states;
  p.c_weights.assign(local_states, 0.0);
  p.f_weights.assign(cols * n_devices, 0.0);
  p.node_values.assign(cols, 0.0);
  p.eta = eta;
  return p;
}

NetParams NetParams::initialized(int n_devices, int local_states, std::mt19937_64& rng,
                                 double eta) {
  auto p = zeros(n_devices, local_states, eta);
  std::uniform_real_distribution<double> conv(-0.1, 0.1);
  const double bound = 1.0 / std::sqrt(static_cast<double>(n_devices));
  std::uniform_real_distribution<double> fc(-bound, bound);
  for (auto& w : p.c_weights) w = conv(rng);
  for (auto& w : p.f_weights) w = fc(rng);
  return p;
}

LearnerState LearnerState::empty(int n_devices, int local_states) {
  LearnerState s;
  s.visits.assign(static_cast<std::size_t>(n_devices) * local_states, 0);
  s.reward_totals.assign(n_devices, 0.0);
  s.avg_reward.assign(n_devices, 0.0);
  return s;
}

double LearnerState::theta() const {
  return std::accumulate(avg_reward.begin(), avg_reward.end(), 0.0);
}

double StepSchedule::epsilon(std::uint64_t m) {
  const double x = static_cast<double>(m) + 1.0;
  return std::log(x) / x;
}

double StepSchedule::alpha(std::uint64_t k) const {
  if (fixed_alpha) return *fixed_alpha;
  return alpha_numerator / (alpha_offset + static_cast<double>(k));
}

StepSizes step_sizes(std::uint64_t k, std::uint64_t visits, const StepSchedule& sched) {
  return {StepSchedule::epsilon(visits), StepSchedule::epsilon(k), sched.alpha(k)};
}

std::vector<int> encode(std::span<const LocalState> locals, const LocalStateSpace& space) {
  std::vector<int> out;
  out.reserve(locals.size());
  for (const auto& l : locals) out.push_back(space.index(l));
  return out;
}

std::vector<int> encode(const PostDecisionState& post, const LocalStateSpace& space) {
  const auto locals = post_local_states(post);
  return encode(locals, space);
}

std::vector<double> dense_input(std::span<const int> active, int local_states) {
  std::vector<double> x(active.size() * local_states, 0.0);
  for (std::size_t n = 0; n < active.size(); ++n) {
    if (active[n] < 0 || active[n] >= local_states)
      throw std::out_of_range("local state index out of range");
    x[n * local_states + active[n]] = 1.0;
  }
  return x;
}

std::vector<int> decode_input(std::span<const double> dense, int n_devices, int local_states) {
  std::vector<int> out(n_devices, -1);
  for (int n = 0; n < n_devices; ++n) {
    for (int j = 0; j < local_states; ++j) {
      const double v = dense[static_cast<std::size_t>(n) * local_states + j];
      if (v == 1.0) {
        if (out[n] != -1) throw std::invalid_argument("input row is not one-hot");
        out[n] = j;
      } else if (v != 0.0) {
        throw std::invalid_argument("input entries must be 0 or 1");
      }
    }
    if (out[n] == -1) throw std::invalid_argument("input row is not one-hot");
  }
  return out;
}

double node_preactivation(std::span<const double> conv, std::span<const double> f_column) {
  double z = 0.0;
  for (std::size_t m = 0; m < conv.size(); ++m) z += conv[m] * f_column[m];
  return z;
}

double tanh_derivative(double z) {
  const double t = std::tanh(z);
  return 1.0 - t * t;
}

double node_bid(double reward, double feature, double value, double theta, double beta) {
  return reward + feature * value - theta / beta;
}

double node_td_error(double reward, double eta, double new_feature, double new_value,
                     double prev_feature, double prev_value, double theta, double beta) {
  return reward + eta * new_feature * new_value - prev_feature * prev_value - theta / beta;
}

ForwardTrace forward(std::span<const int> active, const NetParams& net) {
  const int n_dev = net.n_devices;
  if (static_cast<int>(active.size()) != n_dev) throw std::invalid_argument("input has wrong row count");
  ForwardTrace t;
  t.active.assign(active.begin(), active.end());
  t.conv.resize(n_dev);
  t.preact.resize(n_dev);
  t.features.resize(n_dev);
  t.values.resize(n_dev);
  for (int n = 0; n < n_dev; ++n) {
    if (active[n] < 0 || active[n] >= net.local_states)
      throw std::out_of_range("local state index out of range");
    t.conv[n] = net.c_weights[active[n]];
  }
  for (int n = 0; n < n_dev; ++n) {
    t.preact[n] = node_preactivation(t.conv, net.f_column(n, active[n]));
    t.features[n] = std::tanh(t.preact[n]);
    t.values[n] = net.node_value(n, active[n]);
    t.value += t.features[n] * t.values[n];
  }
  if (!std::isfinite(t.value)) throw std::runtime_error("non-finite network output");
  return t;
}

double local_bid(int n, const ForwardTrace& trace, double reward, double theta, double beta) {
  return node_bid(reward, trace.features[n], trace.values[n], theta, beta);
}

TdResult td_update(NetParams& net, LearnerState& learner, const TdInputs& in,
                   const StepSchedule& sched) {
  const int n_dev = net.n_devices;
  if (learner.epoch < 1) throw std::logic_error("td_update needs a previous post-decision state");
  const auto prev = forward(in.prev_active, net);
  const auto next = forward(in.new_active, net);

  TdResult r;
  r.node_errors.resize(n_dev);
  for (int n = 0; n < n_dev; ++n) {
    r.node_errors[n] = node_td_error(in.new_rewards[n], net.eta, next.features[n], next.values[n],
                                     prev.features[n], prev.values[n], learner.avg_reward[n],
                                     in.new_beta);
    r.error += r.node_errors[n];
  }
  const double dv = r.error;
  const std::uint64_t k = learner.epoch;
  r.steps = step_sizes(k, 0, sched);

  // Frozen snapshot of every increment before anything is written.
  std::vector<double> visit_eps(n_dev), value_step(n_dev), fc_delta(n_dev);
  std::vector<double> conv_grad(n_dev, 0.0);
  for (int n = 0; n < n_dev; ++n) {
    visit_eps[n] = StepSchedule::epsilon(learner.visits[net.column(n, prev.active[n])]);
    value_step[n] = visit_eps[n] * prev.features[n] * dv;
    fc_delta[n] = dv * prev.values[n] * tanh_derivative(prev.preact[n]);
  }
  for (int n = 0; n < n_dev; ++n) {
    const auto col = net.f_column(n, prev.active[n]);
    for (int m = 0; m < n_dev; ++m) conv_grad[m] += fc_delta[n] * col[m];
  }
  for (int n = 0; n < n_dev; ++n)
    if (!std::isfinite(conv_grad[n]) || !std::isfinite(value_step[n]) ||
        !std::isfinite(fc_delta[n]))
      throw std::runtime_error("non-finite TD increment");

  for (int n = 0; n < n_dev; ++n) net.node_values[net.column(n, prev.active[n])] += value_step[n];
  for (int n = 0; n < n_dev; ++n) {
    auto col = net.f_column(n, prev.active[n]);
    const double scale = visit_eps[n] * fc_delta[n];
    for (int m = 0; m < n_dev; ++m) col[m] += scale * prev.conv[m];
  }
  for (int m = 0; m < n_dev; ++m) net.c_weights[prev.active[m]] += r.steps.epoch_eps * conv_grad[m];

  learner.time_total += in.prev_duration;
  for (int n = 0; n < n_dev; ++n) {
    learner.reward_totals[n] += in.prev_rewards[n];
    learner.avg_reward[n] = (1.0 - r.steps.alpha) * learner.avg_reward[n] +
                            r.steps.alpha * (learner.reward_totals[n] / learner.time_total);
  }
  return r;
}

void register_visit(LearnerState& learner, std::span<const int> active, int local_states) {
  for (std::size_t n = 0; n < active.size(); ++n)
    ++learner.visits[n * local_states + active[n]];
  ++learner.epoch;
}

}  // namespace mec
