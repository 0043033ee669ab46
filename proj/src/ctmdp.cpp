#include "mec/ctmdp.hpp"

#include <algorithm>
#include <sstream>
#include <stdexcept>

namespace mec {

void ScenarioParams::validate() const {
  const auto n = static_cast<std::size_t>(n_devices);
  if (n_devices < 1) throw std::invalid_argument("scenario needs at least one device");
  for (const auto* v : {&arrival_rates, &tx_rates, &tx_powers, &proc_rates, &proc_powers,
                        &delay_weights, &power_weights}) {
    if (v->size() != n) throw std::invalid_argument("per-device vector has wrong length");
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (!(arrival_rates[i] > 0) || !(tx_rates[i] > 0) || !(proc_rates[i] > 0))
      throw std::invalid_argument("rates must be strictly positive");
    if (!(tx_powers[i] > 0) || !(proc_powers[i] > 0))
      throw std::invalid_argument("powers must be positive");
    if (delay_weights[i] < 0 || power_weights[i] < 0)
      throw std::invalid_argument("weights must be nonnegative");
  }
  if (tx_cap < 1 || proc_cap < 1) throw std::invalid_argument("queue caps must be >= 1");
}

ScenarioParams uniform_params(int n_devices, double arrival, double tx_rate, double tx_power,
                              double proc_rate, double proc_power, int tx_cap, int proc_cap,
                              double delay_weight, double power_weight) {
  const auto n = static_cast<std::size_t>(n_devices);
  ScenarioParams p;
  p.n_devices = n_devices;
  p.arrival_rates.assign(n, arrival);
  p.tx_rates.assign(n, tx_rate);
  p.tx_powers.assign(n, tx_power);
  p.proc_rates.assign(n, proc_rate);
  p.proc_powers.assign(n, proc_power);
  p.tx_cap = tx_cap;
  p.proc_cap = proc_cap;
  p.delay_weights.assign(n, delay_weight);
  p.power_weights.assign(n, power_weight);
  p.validate();
  return p;
}

int LocalStateSpace::index(const LocalState& s) const {
  if (s.tx_len < 0 || s.tx_len > tx_cap_ || s.proc_len < 0 || s.proc_len > proc_cap_)
    throw std::out_of_range("local state queue length out of range");
  const int code = static_cast<int>(s.event);
  return ((s.tx_len * (proc_cap_ + 1) + s.proc_len) * 4 + code) * 2 + (s.scheduled ? 1 : 0);
}

LocalState LocalStateSpace::decode(int index) const {
  if (index < 0 || index >= size()) throw std::out_of_range("local state index out of range");
  LocalState s;
  s.scheduled = (index % 2) == 1;
  index /= 2;
  s.event = static_cast<LocalEvent>(index % 4);
  index /= 4;
  s.proc_len = index % (proc_cap_ + 1);
  s.tx_len = index / (proc_cap_ + 1);
  return s;
}

namespace {

template <class State>
bool queues_valid(const State& s, const ScenarioParams& p) {
  if (s.n_devices() != p.n_devices || s.proc_queues.size() != s.tx_queues.size()) return false;
  for (int n = 0; n < p.n_devices; ++n) {
    if (s.tx_queues[n] < 0 || s.tx_queues[n] > p.tx_cap) return false;
    if (s.proc_queues[n] < 0 || s.proc_queues[n] > p.proc_cap) return false;
  }
  return true;
}

bool all_zero(const std::vector<int>& v) {
  return std::all_of(v.begin(), v.end(), [](int x) { return x == 0; });
}

}  // namespace

bool is_valid(const GlobalState& s, const ScenarioParams& p) {
  const int n = p.n_devices;
  if (!queues_valid(s, p)) return false;
  if (s.event < -n || s.event > n) return false;
  if (s.scheduled_prev < 0 || s.scheduled_prev > n) return false;
  if (s.event == 0 && s.scheduled_prev == 0) return false;
  // Reachability: the scheduled queue stays non-empty until its departure, and
  // nobody is scheduled only when every transmission queue is empty.
  if (s.scheduled_prev == 0 && !all_zero(s.tx_queues)) return false;
  if (s.scheduled_prev != 0 && s.event != 0 && s.tx_queues[s.scheduled_prev - 1] == 0) return false;
  return true;
}

bool is_valid(const PostDecisionState& s, const ScenarioParams& p) {
  const int n = p.n_devices;
  if (!queues_valid(s, p)) return false;
  if (s.event < -n || s.event > n) return false;
  if (s.scheduled < 0 || s.scheduled > n || s.scheduled_prev < 0 || s.scheduled_prev > n)
    return false;
  if ((s.scheduled == 0) != all_zero(s.tx_queues)) return false;
  if (s.scheduled != 0 && s.tx_queues[s.scheduled - 1] == 0) return false;
  return true;
}

std::vector<int> offload_action_space(const GlobalState& s, const ScenarioParams& p) {
  if (s.event <= 0) return {0};
  const int n = s.event - 1;
  const bool tx_full = s.tx_queues[n] >= p.tx_cap;
  const bool proc_full = s.proc_queues[n] >= p.proc_cap;
  if (tx_full && proc_full) return {-1};
  if (tx_full) return {0};
  if (proc_full) return {1};
  return {1, 0};
}

OffloadOutcome apply_offload(const GlobalState& s, int offload) {
  OffloadOutcome out{s.tx_queues, s.proc_queues, false};
  if (s.event <= 0) return out;
  const int n = s.event - 1;
  switch (offload) {
    case 1: ++out.tx_queues[n]; break;
    case 0: ++out.proc_queues[n]; break;
    case -1: out.dropped = true; break;
    default: throw std::invalid_argument("offload action must be -1, 0 or 1");
  }
  return out;
}

std::vector<int> schedule_action_space(const GlobalState& s, int offload, const ScenarioParams&) {
  const auto post = apply_offload(s, offload);
  if (all_zero(post.tx_queues)) return {0};
  const bool reschedule = s.event == 0 || (s.event > 0 && s.scheduled_prev == 0);
  if (!reschedule) return {s.scheduled_prev};
  std::vector<int> out;
  for (int n = 0; n < s.n_devices(); ++n)
    if (post.tx_queues[n] != 0) out.push_back(n + 1);
  return out;
}

std::vector<JointAction> eligible_actions(const GlobalState& s, const ScenarioParams& p) {
  std::vector<JointAction> out;
  for (int o : offload_action_space(s, p))
    for (int sched : schedule_action_space(s, o, p)) out.push_back({o, sched});
  return out;
}

bool is_eligible(const GlobalState& s, const JointAction& a, const ScenarioParams& p) {
  const auto acts = eligible_actions(s, p);
  return std::find(acts.begin(), acts.end(), a) != acts.end();
}

PostDecisionState post_decision(const GlobalState& s, const JointAction& a) {
  auto q = apply_offload(s, a.offload);
  return {std::move(q.tx_queues), std::move(q.proc_queues), s.event, a.schedule, s.scheduled_prev};
}

double sojourn_rate(const PostDecisionState& post, const ScenarioParams& p) {
  double beta = p.total_arrival_rate();
  if (post.scheduled != 0) beta += p.tx_rates[post.scheduled - 1];
  for (int n = 0; n < p.n_devices; ++n)
    if (post.proc_queues[n] != 0) beta += p.proc_rates[n];
  return beta;
}

double event_rate(const PostDecisionState& post, int event, const ScenarioParams& p) {
  const int n_dev = p.n_devices;
  if (event > 0 && event <= n_dev) return p.arrival_rates[event - 1];
  if (event == 0) return post.scheduled != 0 ? p.tx_rates[post.scheduled - 1] : 0.0;
  if (event < 0 && event >= -n_dev)
    return post.proc_queues[-event - 1] != 0 ? p.proc_rates[-event - 1] : 0.0;
  return 0.0;
}

std::vector<EventProbability> transition_distribution(const PostDecisionState& post,
                                                      const ScenarioParams& p) {
  const double beta = sojourn_rate(post, p);
  std::vector<EventProbability> out;
  out.reserve(2 * p.n_devices + 1);
  for (int n = 1; n <= p.n_devices; ++n) out.push_back({n, p.arrival_rates[n - 1] / beta});
  if (post.scheduled != 0) out.push_back({0, p.tx_rates[post.scheduled - 1] / beta});
  for (int n = 1; n <= p.n_devices; ++n)
    if (post.proc_queues[n - 1] != 0) out.push_back({-n, p.proc_rates[n - 1] / beta});
  return out;
}

GlobalState next_state(const PostDecisionState& post, int event, const ScenarioParams& p) {
  if (event_rate(post, event, p) <= 0.0)
    throw std::logic_error("event " + std::to_string(event) +
                           " has zero probability from " + to_string(post));
  GlobalState s{post.tx_queues, post.proc_queues, event, post.scheduled};
  if (event == 0) --s.tx_queues[post.scheduled - 1];
  if (event < 0) --s.proc_queues[-event - 1];
  return s;
}

double reward_rate(const PostDecisionState& post, const ScenarioParams& p) {
  double c = 0.0;
  for (int n = 0; n < p.n_devices; ++n) {
    const double queued = post.tx_queues[n] + post.proc_queues[n];
    double power = 0.0;
    if (post.scheduled == n + 1) power += p.tx_powers[n];
    if (post.proc_queues[n] != 0) power += p.proc_powers[n];
    c += p.delay_weight(n) / p.arrival_rates[n] * queued + p.power_weight(n) * power;
  }
  return c;
}

DeviceCostParams DeviceCostParams::of(const ScenarioParams& p, int n) {
  return {p.tx_powers[n], p.proc_powers[n], p.delay_weights[n], p.power_weights[n],
          p.total_arrival_rate(), p.n_devices};
}

double local_reward(const LocalState& post_local, const DeviceCostParams& c, double beta) {
  const double queued = post_local.tx_len + post_local.proc_len;
  double power = 0.0;
  if (post_local.scheduled) power += c.tx_power;
  if (post_local.proc_len != 0) power += c.proc_power;
  return c.delay_weight / (beta * c.total_arrival) * queued +
         c.power_weight / (beta * c.n_devices) * power;
}

double local_reward(const PostDecisionState& post, int n, const ScenarioParams& p, double beta) {
  const LocalState l{post.tx_queues[n], post.proc_queues[n], LocalEvent::None,
                     post.scheduled == n + 1};
  return local_reward(l, DeviceCostParams::of(p, n), beta);
}

double local_reward(const PostDecisionState& post, int n, const ScenarioParams& p) {
  return local_reward(post, n, p, sojourn_rate(post, p));
}

LocalEvent local_event(int global_event, int scheduled, int n) {
  const int id = n + 1;
  if (global_event == id) return LocalEvent::Arrival;
  if (global_event == 0 && scheduled == id) return LocalEvent::TxDeparture;
  if (global_event == -id) return LocalEvent::ProcDeparture;
  return LocalEvent::None;
}

LocalState local_state(const GlobalState& s, int n) {
  return {s.tx_queues[n], s.proc_queues[n], local_event(s.event, s.scheduled_prev, n),
          s.scheduled_prev == n + 1};
}

std::vector<LocalState> local_states(const GlobalState& s) {
  std::vector<LocalState> out;
  out.reserve(s.tx_queues.size());
  for (int n = 0; n < s.n_devices(); ++n) out.push_back(local_state(s, n));
  return out;
}

LocalState post_decision_local(const LocalState& local, const JointAction& a, int n) {
  LocalState out = local;
  if (local.event == LocalEvent::Arrival) {
    if (a.offload == 1) ++out.tx_len;
    if (a.offload == 0) ++out.proc_len;
  }
  out.scheduled = a.schedule == n + 1;
  return out;
}

std::vector<LocalState> post_local_states(const PostDecisionState& post) {
  std::vector<LocalState> out;
  out.reserve(post.tx_queues.size());
  for (int n = 0; n < post.n_devices(); ++n)
    out.push_back({post.tx_queues[n], post.proc_queues[n],
                   local_event(post.event, post.scheduled_prev, n), post.scheduled == n + 1});
  return out;
}

LocalState local_next(const LocalState& post_local, int n, int event) {
  LocalState out = post_local;
  out.event = local_event(event, post_local.scheduled ? n + 1 : 0, n);
  if (out.event == LocalEvent::TxDeparture) --out.tx_len;
  if (out.event == LocalEvent::ProcDeparture) --out.proc_len;
  return out;
}

GlobalState aggregate(std::span<const LocalState> locals) {
  GlobalState s;
  s.tx_queues.reserve(locals.size());
  s.proc_queues.reserve(locals.size());
  bool tx_departure = false;
  for (std::size_t i = 0; i < locals.size(); ++i) {
    const auto& l = locals[i];
    const int id = static_cast<int>(i) + 1;
    s.tx_queues.push_back(l.tx_len);
    s.proc_queues.push_back(l.proc_len);
    if (l.scheduled) s.scheduled_prev = id;
    switch (l.event) {
      case LocalEvent::Arrival: s.event = id; break;
      case LocalEvent::ProcDeparture: s.event = -id; break;
      case LocalEvent::TxDeparture: tx_departure = true; break;
      case LocalEvent::None: break;
    }
  }
  if (tx_departure) s.event = 0;
  return s;
}

namespace {
void print_vec(std::ostream& os, const std::vector<int>& v) {
  os << '(';
  for (std::size_t i = 0; i < v.size(); ++i) os << (i ? "," : "") << v[i];
  os << ')';
}
}  // namespace

std::string to_string(const GlobalState& s) {
  std::ostringstream os;
  os << "state{L=";
  print_vec(os, s.tx_queues);
  os << " Lloc=";
  print_vec(os, s.proc_queues);
  os << " e=" << s.event << " b=" << s.scheduled_prev << '}';
  return os.str();
}

std::string to_string(const PostDecisionState& s) {
  std::ostringstream os;
  os << "post{L=";
  print_vec(os, s.tx_queues);
  os << " Lloc=";
  print_vec(os, s.proc_queues);
  os << " e=" << s.event << " sched=" << s.scheduled << " b=" << s.scheduled_prev << '}';
  return os.str();
}

}  // namespace mec
