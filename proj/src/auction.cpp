#include "mec/auction.hpp"

#include <bit>
#include <cmath>
#include <ostream>
#include <stdexcept>

#include "mec/sim.hpp"

namespace mec {

const char* to_string(MessageKind k) {
  switch (k) {
    case MessageKind::ConvBroadcast: return "conv_broadcast";
    case MessageKind::BidSubmit: return "bid_submit";
    case MessageKind::ActionNotify: return "action_notify";
    case MessageKind::DeltaVSubmit: return "delta_v_submit";
    case MessageKind::DeltaVBroadcast: return "delta_v_broadcast";
    case MessageKind::DeltaCSubmit: return "delta_c_submit";
  }
  return "unknown";
}

const char* to_string(Direction d) { return d == Direction::Downlink ? "down" : "up"; }

int message_words(MessageKind kind, int n_devices) {
  switch (kind) {
    case MessageKind::ConvBroadcast: return n_devices + 1;
    case MessageKind::BidSubmit: return 2;
    case MessageKind::ActionNotify:
    case MessageKind::DeltaVSubmit:
    case MessageKind::DeltaVBroadcast:
    case MessageKind::DeltaCSubmit: return 1;
  }
  throw std::invalid_argument("unknown message kind");
}

int round_words(MessageKind kind, int n_devices) {
  switch (kind) {
    case MessageKind::ConvBroadcast: return n_devices + 1;
    case MessageKind::BidSubmit: return 2 * n_devices;
    case MessageKind::ActionNotify: return 1;
    case MessageKind::DeltaVSubmit: return n_devices;
    case MessageKind::DeltaVBroadcast: return 1;
    case MessageKind::DeltaCSubmit: return n_devices;
  }
  throw std::invalid_argument("unknown message kind");
}

int learning_round_words(int n_devices) { return 5 * n_devices + 3; }
int decision_round_words(int n_devices) { return 3 * n_devices + 2; }

void MessageBus::begin_round(std::uint64_t epoch) {
  if (head_ != queue_.size()) throw std::logic_error("undelivered messages at round start");
  queue_.clear();
  head_ = 0;
  epoch_ = epoch;
  round_words_ = 0;
}

void MessageBus::post(ProtocolMessage m) {
  if (m.size_words != message_words(m.kind, n_devices_))
    throw std::invalid_argument(std::string("wrong charged size for ") + to_string(m.kind));
  round_words_ += m.size_words;
  total_words_ += m.size_words;
  if (log_)
    log_->push_back({epoch_, m.kind, m.direction, m.device, m.size_words, 4 * total_words_});
  queue_.push_back(std::move(m));
}

ProtocolMessage MessageBus::take(MessageKind kind, int device) {
  if (head_ >= queue_.size()) throw std::logic_error("message bus is empty");
  auto& m = queue_[head_];
  if (m.kind != kind || m.device != device)
    throw std::logic_error(std::string("expected ") + to_string(kind) + ", got " +
                           to_string(m.kind));
  ++head_;
  return std::move(m);
}

void write_messages_csv(std::ostream& os, const std::vector<LogEntry>& log) {
  os << "epoch,kind,direction,payload_words,cumulative_bytes\n";
  for (const auto& e : log)
    os << e.epoch << ',' << to_string(e.kind) << ',' << to_string(e.direction) << ',' << e.words
       << ',' << e.cumulative_bytes << '\n';
}

// ---------------------------------------------------------------------------

DeviceActor::DeviceActor(int n, const ScenarioParams& p, const NetParams& net,
                         const LearnerState& learner, const StepSchedule& steps)
    : n_(n),
      n_devices_(p.n_devices),
      space_(p),
      cost_(DeviceCostParams::of(p, n)),
      eta_(net.eta),
      steps_(steps),
      avg_reward_(learner.avg_reward.at(n)),
      epoch_(learner.epoch) {
  const auto d = static_cast<std::size_t>(net.local_states);
  const auto width = static_cast<std::size_t>(n_devices_);
  values_.assign(net.node_values.begin() + n * d, net.node_values.begin() + (n + 1) * d);
  f_cols_.assign(net.f_weights.begin() + n * d * width, net.f_weights.begin() + (n + 1) * d * width);
  visits_.assign(learner.visits.begin() + n * d, learner.visits.begin() + (n + 1) * d);
  reward_total_ = learner.reward_totals.at(n);
  time_total_ = learner.time_total;
}

void DeviceActor::check_epoch(const ProtocolMessage& m) const {
  if (m.epoch != epoch_)
    throw std::runtime_error("device " + std::to_string(id()) + " is out of sync: epoch " +
                             std::to_string(epoch_) + " received " + std::to_string(m.epoch));
}

ProtocolMessage DeviceActor::bid(const ProtocolMessage& conv, const LocalState& local) {
  check_epoch(conv);
  const auto& x = conv.payload;
  if (x.size() < 2) throw std::invalid_argument("malformed conv broadcast");
  const auto k = static_cast<std::size_t>(x[0]);
  const bool has_prev = x[1] != 0.0;
  const std::size_t stride = 3 + n_devices_;
  if (x.size() != 2 + k * stride + (has_prev ? n_devices_ : 0))
    throw std::invalid_argument("malformed conv broadcast");

  candidates_.clear();
  std::vector<double> bids(k);
  for (std::size_t i = 0; i < k; ++i) {
    const double* c = x.data() + 2 + i * stride;
    const JointAction a{static_cast<int>(c[0]), static_cast<int>(c[1])};
    const double beta = c[2];
    const std::span<const double> conv_vec(c + 3, n_devices_);
    const auto post = post_decision_local(local, a, n_);
    const int idx = space_.index(post);
    const double feature = std::tanh(node_preactivation(conv_vec, column(idx)));
    const double value = values_[idx];
    const double reward = local_reward(post, cost_, beta);
    bids[i] = node_bid(reward, feature, value, avg_reward_, beta);
    candidates_.push_back({idx, reward, beta, feature, value});
  }
  if (has_prev)
    prev_conv_.assign(x.end() - n_devices_, x.end());
  else
    prev_conv_.clear();
  return {MessageKind::BidSubmit, Direction::Uplink, id(), epoch_, std::move(bids),
          message_words(MessageKind::BidSubmit, n_devices_)};
}

void DeviceActor::notify(const ProtocolMessage& action) {
  check_epoch(action);
  const auto i = static_cast<std::size_t>(action.payload.at(0));
  current_ = candidates_.at(i);
}

ProtocolMessage DeviceActor::td_error() {
  if (!prev_ || !current_ || prev_conv_.size() != static_cast<std::size_t>(n_devices_))
    throw std::logic_error("TD error requested without a previous post-decision state");
  const double z = node_preactivation(prev_conv_, column(prev_->index));
  const double e = node_td_error(current_->reward, eta_, current_->feature, current_->value,
                                 std::tanh(z), values_[prev_->index], avg_reward_, current_->beta);
  node_error_ = e;
  return {MessageKind::DeltaVSubmit, Direction::Uplink, id(), epoch_, {e},
          message_words(MessageKind::DeltaVSubmit, n_devices_)};
}

ProtocolMessage DeviceActor::apply_update(const ProtocolMessage& delta, double prev_sojourn) {
  check_epoch(delta);
  if (!node_error_) throw std::logic_error("update before TD error");
  const double dv = delta.payload.at(0);
  const int j = prev_->index;
  // Previous post-decision state re-evaluated under the current parameters.
  const double preact = node_preactivation(prev_conv_, column(j));
  const double feature = std::tanh(preact);

  const double visit_eps = StepSchedule::epsilon(visits_[j]);
  const double value_step = visit_eps * feature * dv;
  const double fc_delta = dv * values_[j] * tanh_derivative(preact);
  const auto col_in = column(j);
  std::vector<double> grad(n_devices_);
  for (int m = 0; m < n_devices_; ++m) grad[m] = fc_delta * col_in[m];
  if (!std::isfinite(value_step) || !std::isfinite(fc_delta))
    throw std::runtime_error("non-finite TD increment");

  values_[j] += value_step;
  double* col = f_cols_.data() + static_cast<std::size_t>(j) * n_devices_;
  const double scale = visit_eps * fc_delta;
  for (int m = 0; m < n_devices_; ++m) col[m] += scale * prev_conv_[m];

  const double alpha = steps_.alpha(epoch_);
  time_total_ += prev_sojourn;
  reward_total_ += prev_->reward;
  avg_reward_ = (1.0 - alpha) * avg_reward_ + alpha * (reward_total_ / time_total_);
  node_error_.reset();
  return {MessageKind::DeltaCSubmit, Direction::Uplink, id(), epoch_, std::move(grad),
          message_words(MessageKind::DeltaCSubmit, n_devices_)};
}

void DeviceActor::finish_round() {
  if (!current_) throw std::logic_error("round finished without an action");
  ++visits_[current_->index];
  ++epoch_;
  prev_ = current_;
  current_.reset();
}

// ---------------------------------------------------------------------------

BsActor::BsActor(ScenarioParams p, std::vector<double> c_weights, AgentOptions opts)
    : params_(std::move(p)), space_(params_), c_weights_(std::move(c_weights)), opts_(opts) {
  if (static_cast<int>(c_weights_.size()) != space_.size())
    throw std::invalid_argument("conv weights do not match the local state space");
}

ProtocolMessage BsActor::broadcast_conv(const GlobalState& s) {
  const int n_dev = params_.n_devices;
  state_ = s;
  candidates_ = eligible_actions(s, params_);
  posts_.clear();
  std::vector<double> x{static_cast<double>(candidates_.size()), prev_active_ ? 1.0 : 0.0};
  x.reserve(2 + candidates_.size() * (3 + n_dev) + n_dev);
  for (const auto& a : candidates_) {
    posts_.push_back(post_decision(s, a));
    const auto active = encode(posts_.back(), space_);
    x.push_back(a.offload);
    x.push_back(a.schedule);
    x.push_back(sojourn_rate(posts_.back(), params_));
    for (int m = 0; m < n_dev; ++m) x.push_back(c_weights_[active[m]]);
  }
  if (prev_active_)
    for (int m = 0; m < n_dev; ++m) x.push_back(c_weights_[(*prev_active_)[m]]);
  return {MessageKind::ConvBroadcast, Direction::Downlink, 0, epoch_, std::move(x),
          message_words(MessageKind::ConvBroadcast, n_dev)};
}

ProtocolMessage BsActor::arbitrate(const std::vector<ProtocolMessage>& bids, Rng& rng) {
  const std::size_t k = candidates_.size();
  if (bids.size() != static_cast<std::size_t>(params_.n_devices))
    throw std::invalid_argument("missing bid messages");
  std::vector<double> scores(k, 0.0);
  for (const auto& b : bids) {
    if (b.payload.size() != k)
      throw std::invalid_argument("malformed bid count from device " + std::to_string(b.device));
  }
  for (std::size_t i = 0; i < k; ++i)
    for (const auto& b : bids) scores[i] += b.payload[i];

  decision_ = epsilon_greedy(epoch_, rng, decide_by_scores(candidates_, scores), state_, params_,
                             opts_.exploration);
  chosen_ = k;
  for (std::size_t i = 0; i < k; ++i)
    if (candidates_[i] == decision_.action) chosen_ = i;
  if (chosen_ == k) throw std::logic_error("arbiter picked a non-candidate action");
  chosen_active_ = encode(posts_[chosen_], space_);
  return {MessageKind::ActionNotify,
          Direction::Downlink,
          0,
          epoch_,
          {static_cast<double>(chosen_), static_cast<double>(decision_.action.offload),
           static_cast<double>(decision_.action.schedule)},
          message_words(MessageKind::ActionNotify, params_.n_devices)};
}

ProtocolMessage BsActor::broadcast_delta(const std::vector<ProtocolMessage>& errors) {
  last_node_errors_.assign(errors.size(), 0.0);
  double total = 0.0;
  for (std::size_t n = 0; n < errors.size(); ++n) {
    last_node_errors_[n] = errors[n].payload.at(0);
    total += last_node_errors_[n];
  }
  last_error_ = total;
  return {MessageKind::DeltaVBroadcast, Direction::Downlink, 0, epoch_, {total},
          message_words(MessageKind::DeltaVBroadcast, params_.n_devices)};
}

void BsActor::apply_conv_update(const std::vector<ProtocolMessage>& grads) {
  const int n_dev = params_.n_devices;
  if (!prev_active_) throw std::logic_error("conv update without a previous post-decision state");
  std::vector<double> conv_grad(n_dev, 0.0);
  for (const auto& g : grads) {
    if (g.payload.size() != static_cast<std::size_t>(n_dev))
      throw std::invalid_argument("malformed gradient message");
    for (int m = 0; m < n_dev; ++m) conv_grad[m] += g.payload[m];
  }
  for (int m = 0; m < n_dev; ++m)
    if (!std::isfinite(conv_grad[m])) throw std::runtime_error("non-finite TD increment");
  const double eps = StepSchedule::epsilon(epoch_);
  for (int m = 0; m < n_dev; ++m) c_weights_[(*prev_active_)[m]] += eps * conv_grad[m];
}

void BsActor::finish_round() {
  prev_active_ = chosen_active_;
  ++epoch_;
}

// ---------------------------------------------------------------------------

DistributedAgent::DistributedAgent(ScenarioParams p, const NetParams& init, AgentOptions opts)
    : params_(std::move(p)),
      opts_(opts),
      eta_(init.eta),
      bs_(params_, init.c_weights, opts),
      bus_(params_.n_devices) {
  params_.validate();
  const auto learner = LearnerState::empty(params_.n_devices, init.local_states);
  if (init.n_devices != params_.n_devices || init.local_states != LocalStateSpace(params_).size())
    throw std::invalid_argument("network shape does not match the scenario");
  for (int n = 0; n < params_.n_devices; ++n)
    devices_.emplace_back(n, params_, init, learner, opts.steps);
}

PolicyDecision DistributedAgent::decide(const GlobalState& s, Rng& rng) {
  const int n_dev = params_.n_devices;
  bus_.begin_round(bs_.epoch());
  state_ = s;

  bus_.post(bs_.broadcast_conv(s));
  const auto conv = bus_.take(MessageKind::ConvBroadcast, 0);
  for (int n = 0; n < n_dev; ++n) bus_.post(devices_[n].bid(conv, local_state(s, n)));
  std::vector<ProtocolMessage> bids;
  for (int n = 0; n < n_dev; ++n) bids.push_back(bus_.take(MessageKind::BidSubmit, n + 1));

  bus_.post(bs_.arbitrate(bids, rng));
  const auto action = bus_.take(MessageKind::ActionNotify, 0);
  for (auto& d : devices_) d.notify(action);

  last_round_ = {bs_.decision(), false, 0.0, bus_.round_words()};
  return bs_.decision();
}

void DistributedAgent::observe(const PostDecisionState& post, double prev_sojourn) {
  const int n_dev = params_.n_devices;
  if (!(post == bs_.chosen_post())) throw std::logic_error("post-decision state mismatch");
  if (!opts_.learning) return;
  if (bs_.has_previous()) {
    for (auto& d : devices_) bus_.post(d.td_error());
    std::vector<ProtocolMessage> errors;
    for (int n = 0; n < n_dev; ++n) errors.push_back(bus_.take(MessageKind::DeltaVSubmit, n + 1));

    bus_.post(bs_.broadcast_delta(errors));
    const auto delta = bus_.take(MessageKind::DeltaVBroadcast, 0);
    for (auto& d : devices_) bus_.post(d.apply_update(delta, prev_sojourn));
    std::vector<ProtocolMessage> grads;
    for (int n = 0; n < n_dev; ++n) grads.push_back(bus_.take(MessageKind::DeltaCSubmit, n + 1));
    bs_.apply_conv_update(grads);
    last_round_.learned = true;
    last_round_.error = bs_.last_error();
  }
  for (auto& d : devices_) d.finish_round();
  bs_.finish_round();
  last_round_.words = bus_.round_words();
}

NetParams DistributedAgent::assemble_net() const {
  const int d = LocalStateSpace(params_).size();
  auto net = NetParams::zeros(params_.n_devices, d, eta_);
  net.c_weights = bs_.c_weights();
  net.f_weights.clear();
  net.node_values.clear();
  for (const auto& dev : devices_) {
    net.f_weights.insert(net.f_weights.end(), dev.f_columns().begin(), dev.f_columns().end());
    net.node_values.insert(net.node_values.end(), dev.node_values().begin(),
                           dev.node_values().end());
  }
  return net;
}

LearnerState DistributedAgent::assemble_learner() const {
  LearnerState l;
  for (const auto& dev : devices_) {
    l.visits.insert(l.visits.end(), dev.visits().begin(), dev.visits().end());
    l.reward_totals.push_back(dev.reward_total());
    l.avg_reward.push_back(dev.avg_reward());
  }
  l.time_total = devices_.front().time_total();
  l.epoch = bs_.epoch();
  return l;
}

RoundOutcome epoch_round(DistributedAgent& agent, const GlobalState& s, Rng& rng,
                         double prev_sojourn) {
  const auto decision = agent.decide(s, rng);
  agent.observe(post_decision(s, decision.action), prev_sojourn);
  return agent.last_round();
}

// ---------------------------------------------------------------------------

namespace {

bool same_bits(double a, double b) {
  return std::bit_cast<std::uint64_t>(a) == std::bit_cast<std::uint64_t>(b);
}

bool same_bits(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i)
    if (!same_bits(a[i], b[i])) return false;
  return true;
}

// First mismatching field between the full parameter sets, empty if identical.
std::string full_mismatch(const IcfmoAgent& central, const DistributedAgent& dist) {
  const auto net = dist.assemble_net();
  const auto learner = dist.assemble_learner();
  if (!same_bits(net.c_weights, central.net().c_weights)) return "c_weights";
  if (!same_bits(net.f_weights, central.net().f_weights)) return "f_weights";
  if (!same_bits(net.node_values, central.net().node_values)) return "node_values";
  if (learner.visits != central.learner().visits) return "visits";
  if (!same_bits(learner.reward_totals, central.learner().reward_totals)) return "reward_totals";
  if (!same_bits(learner.avg_reward, central.learner().avg_reward)) return "avg_reward";
  for (const auto& d : dist.devices())
    if (!same_bits(d.time_total(), central.learner().time_total)) return "time_total";
  if (learner.epoch != central.learner().epoch) return "epoch";
  return {};
}

// Entries written by the latest TD step plus the shared state, empty if identical.
std::string touched_mismatch(const IcfmoAgent& central, const DistributedAgent& dist,
                             const std::vector<int>& touched) {
  const auto& net = central.net();
  if (!same_bits(dist.bs().c_weights(), net.c_weights)) return "c_weights";
  for (std::size_t n = 0; n < touched.size(); ++n) {
    const auto& dev = dist.devices()[n];
    const int j = touched[n];
    if (!same_bits(dev.node_values()[j], net.node_value(static_cast<int>(n), j)))
      return "node_values";
    const std::span<const double> col(dev.f_columns().data() + static_cast<std::size_t>(j) *
                                                                    net.n_devices,
                                      static_cast<std::size_t>(net.n_devices));
    if (!same_bits(col, net.f_column(static_cast<int>(n), j))) return "f_weights";
    if (!same_bits(dev.avg_reward(), central.learner().avg_reward[n])) return "avg_reward";
  }
  return {};
}

}  // namespace

EquivalenceReport equivalence_check(const ScenarioParams& p, std::uint64_t seed,
                                    const EquivalenceOptions& opts) {
  auto central = IcfmoAgent::random_init(p, opts.init_seed, opts.agent);
  DistributedAgent dist(p, central.net(), opts.agent);
  if (opts.perturb) opts.perturb(dist);
  if (opts.log) dist.bus().set_log(opts.log);

  Simulation sim_c(p, central, seed);
  Simulation sim_d(p, dist, seed);
  JointAction act_c, act_d;
  sim_c.set_trace([&](const EpochRecord& r) { act_c = r.decision.action; });
  sim_d.set_trace([&](const EpochRecord& r) { act_d = r.decision.action; });

  const int n_dev = p.n_devices;
  const auto learn_words = static_cast<std::uint64_t>(learning_round_words(n_dev));
  const auto decide_words = static_cast<std::uint64_t>(decision_round_words(n_dev));
  EquivalenceReport rep;
  auto diverge = [&](std::uint64_t e, std::string field) {
    rep.equivalent = false;
    rep.divergence_epoch = e;
    rep.divergence_field = std::move(field);
  };

  const LocalStateSpace space(p);
  for (std::uint64_t e = 0; e < opts.epochs; ++e) {
    std::vector<int> touched;
    if (central.previous_post()) touched = encode(*central.previous_post(), space);
    sim_c.step();
    sim_d.step();
    rep.epochs = e + 1;

    const auto& round = dist.last_round();
    const bool learned = round.learned;
    if (learned) ++rep.learning_rounds;
    if (round.words != (learned ? learn_words : decide_words)) rep.overhead_exact = false;

    if (!(act_c == act_d)) {
      diverge(e, "action");
      break;
    }
    if (opts.actions_only) continue;
    if (!(sim_c.state() == sim_d.state())) {
      diverge(e, "state");
      break;
    }
    if (learned) {
      const auto& upd = central.last_update();
      if (!upd || !same_bits(upd->error, round.error)) {
        diverge(e, "delta_v");
        break;
      }
      if (!same_bits(upd->node_errors, dist.bs().last_node_errors())) {
        diverge(e, "node_delta_v");
        break;
      }
      if (auto f = touched_mismatch(central, dist, touched); !f.empty()) {
        diverge(e, f);
        break;
      }
    }
    const bool full = opts.full_compare_every && (e + 1) % opts.full_compare_every == 0;
    if (full || e + 1 == opts.epochs) {
      if (auto f = full_mismatch(central, dist); !f.empty()) {
        diverge(e, f);
        break;
      }
    }
  }
  rep.total_bytes = dist.bus().total_bytes();
  return rep;
}

}  // namespace mec
