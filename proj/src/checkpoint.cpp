#include "mec/checkpoint.hpp"

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <istream>
#include <ostream>
#include <stdexcept>

namespace mec {

namespace ckpt {

void write_double(std::ostream& os, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%a", v);
  os << buf;
}

void write_doubles(std::ostream& os, const char* key, const std::vector<double>& v) {
  os << key << ' ' << v.size();
  for (double x : v) {
    os << ' ';
    write_double(os, x);
  }
  os << '\n';
}

double read_double(std::istream& is) {
  std::string tok;
  if (!(is >> tok)) throw std::runtime_error("checkpoint truncated");
  char* end = nullptr;
  const double v = std::strtod(tok.c_str(), &end);
  if (end != tok.c_str() + tok.size()) throw std::runtime_error("bad number in checkpoint: " + tok);
  return v;
}

void expect_key(std::istream& is, const char* key) {
  std::string tok;
  if (!(is >> tok) || tok != key)
    throw std::runtime_error(std::string("checkpoint: expected '") + key + "', got '" + tok + "'");
}

std::vector<double> read_doubles(std::istream& is, const char* key) {
  expect_key(is, key);
  std::size_t n = 0;
  if (!(is >> n)) throw std::runtime_error("checkpoint: missing length");
  std::vector<double> v(n);
  for (auto& x : v) x = read_double(is);
  return v;
}

}  // namespace ckpt

void write_net_checkpoint(std::ostream& os, const NetParams& net, const LearnerState& learner) {
  os << "mecrl-net 1\n";
  os << "n_devices " << net.n_devices << '\n';
  os << "local_states " << net.local_states << '\n';
  os << "eta ";
  ckpt::write_double(os, net.eta);
  os << '\n';
  ckpt::write_doubles(os, "c_weights", net.c_weights);
  ckpt::write_doubles(os, "f_weights", net.f_weights);
  ckpt::write_doubles(os, "node_values", net.node_values);
  os << "visits " << learner.visits.size();
  for (auto v : learner.visits) os << ' ' << v;
  os << '\n';
  ckpt::write_doubles(os, "reward_totals", learner.reward_totals);
  os << "time_total ";
  ckpt::write_double(os, learner.time_total);
  os << '\n';
  ckpt::write_doubles(os, "avg_reward", learner.avg_reward);
  os << "epoch " << learner.epoch << "\nend\n";
}

void read_net_checkpoint(std::istream& is, NetParams& net, LearnerState& learner) {
  ckpt::expect_key(is, "mecrl-net");
  int version = 0;
  if (!(is >> version) || version != 1) throw std::runtime_error("unsupported checkpoint version");
  NetParams n;
  LearnerState l;
  ckpt::expect_key(is, "n_devices");
  is >> n.n_devices;
  ckpt::expect_key(is, "local_states");
  is >> n.local_states;
  ckpt::expect_key(is, "eta");
  n.eta = ckpt::read_double(is);
  n.c_weights = ckpt::read_doubles(is, "c_weights");
  n.f_weights = ckpt::read_doubles(is, "f_weights");
  n.node_values = ckpt::read_doubles(is, "node_values");
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
  ckpt::expect_key(is, "end");
  if (!is) throw std::runtime_error("checkpoint truncated");

  const auto cols = static_cast<std::size_t>(n.n_devices) * n.local_states;
  if (n.n_devices < 1 || n.local_states < 1 ||
      n.c_weights.size() != static_cast<std::size_t>(n.local_states) ||
      n.f_weights.size() != cols * n.n_devices || n.node_values.size() != cols ||
      l.visits.size() != cols || l.reward_totals.size() != static_cast<std::size_t>(n.n_devices) ||
      l.avg_reward.size() != static_cast<std::size_t>(n.n_devices))
    throw std::runtime_error("checkpoint shapes are inconsistent");
  net = std::move(n);
  learner = std::move(l);
}

void save_net_checkpoint(const std::string& path, const NetParams& net, const LearnerState& learner) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot write " + path);
  write_net_checkpoint(os, net, learner);
}

void load_net_checkpoint(const std::string& path, NetParams& net, LearnerState& learner) {
  std::ifstream is(path);
  if (!is) throw std::runtime_error("cannot read " + path);
  read_net_checkpoint(is, net, learner);
}

}  // namespace mec
