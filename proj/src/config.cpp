#include "mec/config.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

namespace mec {

using nlohmann::json;

namespace {

const std::vector<std::string> kPolicies{"icfmo", "ico", "qa", "mumto"};

// Typed access to one JSON object that remembers which keys were consumed.
class Section {
 public:
  Section(const json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) throw ConfigError("config key '" + path_ + "': expected an object");
  }

  template <typename T>
  void read(const char* key, T& out) {
    seen_.insert(key);
    if (!j_.contains(key)) return;
    try {
      out = j_.at(key).get<T>();
    } catch (const json::exception& e) {
      throw ConfigError("config key '" + name(key) + "': " + type_hint<T>());
    }
  }

  bool has(const char* key) const { return j_.contains(key); }
  Section child(const char* key) {
    seen_.insert(key);
    static const json empty = json::object();
    return Section(j_.contains(key) ? j_.at(key) : empty, name(key));
  }
  std::string name(const char* key) const { return path_.empty() ? key : path_ + "." + key; }

  /// Rejects keys that no read() asked for.
  void finish() const {
    for (auto it = j_.begin(); it != j_.end(); ++it)
      if (!seen_.count(it.key())) throw ConfigError("config key '" + name(it.key().c_str()) + "': unknown key");
  }

 private:
  template <typename T>
  static std::string type_hint() {
    if constexpr (std::is_same_v<T, bool>) return "expected a boolean";
    else if constexpr (std::is_same_v<T, std::string>) return "expected a string";
    else if constexpr (std::is_arithmetic_v<T>) return "expected a number";
    else return "expected a list";
  }

  const json& j_;
  std::string path_;
  std::set<std::string> seen_;
};

void require(bool ok, const std::string& key, const std::string& what) {
  if (!ok) throw ConfigError("config key '" + key + "': " + what);
}

int line_of(const std::string& text, std::size_t byte, std::size_t& column) {
  int line = 1;
  std::size_t start = 0;
  for (std::size_t i = 0; i < std::min(byte, text.size()); ++i)
    if (text[i] == '\n') {
      ++line;
      start = i + 1;
    }
  column = byte - start;
  return line;
}

}  // namespace

bool is_policy_name(const std::string& name) {
  return std::find(kPolicies.begin(), kPolicies.end(), name) != kPolicies.end();
}

bool is_learning_policy(const std::string& name) { return name == "icfmo" || name == "ico"; }

void ExperimentConfig::validate() const {
  const auto& s = scenario;
  require(s.tx_cap >= 1, "scenario.tx_cap", "must be at least 1");
  require(s.proc_cap >= 1, "scenario.proc_cap", "must be at least 1");
  require(s.delay_weight >= 0, "scenario.delay_weight", "must be non-negative");
  require(s.power_weight >= 0, "scenario.power_weight", "must be non-negative");
  if (kind == ScenarioKind::Cell) {
    require(s.geometry.radius_m > 0, "scenario.radius_m", "must be positive");
    require(!s.geometry.zone_rates_bps.empty(), "scenario.zone_rates_bps", "must not be empty");
    for (double r : s.geometry.zone_rates_bps)
      require(r > 0, "scenario.zone_rates_bps", "rates must be positive");
    require(s.radio.packet_bits > 0, "scenario.packet_bits", "must be positive");
    require(s.radio.cycles_per_bit > 0, "scenario.cycles_per_bit", "must be positive");
    require(s.radio.switched_capacitance > 0, "scenario.kappa", "must be positive");
    require(s.radio.cpu_min_hz > 0 && s.radio.cpu_min_hz <= s.radio.cpu_max_hz,
            "scenario.cpu_min_hz", "must be positive and at most cpu_max_hz");
  } else {
    require(uniform.tx_rate > 0, "scenario.tx_rate", "must be positive");
    require(uniform.proc_rate > 0, "scenario.proc_rate", "must be positive");
    require(uniform.tx_power >= 0, "scenario.tx_power", "must be non-negative");
    require(uniform.proc_power >= 0, "scenario.proc_power", "must be non-negative");
  }
  require(!policies.empty(), "policy.names", "must not be empty");
  for (const auto& p : policies)
    require(is_policy_name(p), "policy.names", "unknown policy '" + p + "' (icfmo|ico|qa|mumto)");
  require(eta > 0 && eta <= 1, "policy.eta", "must lie in (0, 1]");
  require(horizon > 0, "learning.horizon", "must be positive");
  require(eval_epochs > 0, "learning.eval_epochs", "must be positive");
  require(exploration.g1 >= 0 && exploration.g2 > 0, "learning.g1", "G1 >= 0 and G2 > 0 required");
  require(steps.alpha_numerator > 0 && steps.alpha_offset >= steps.alpha_numerator,
          "learning.alpha_numerator", "need 0 < numerator <= offset");
  require(warmup_fraction >= 0 && warmup_fraction < 1, "learning.warmup_fraction",
          "must lie in [0, 1)");
  require(!n_devices.empty(), "sweep.n_devices", "must not be empty");
  for (int n : n_devices) require(n >= 1, "sweep.n_devices", "entries must be at least 1");
  require(!arrival_rates.empty(), "sweep.arrival_rates", "must not be empty");
  for (double l : arrival_rates) require(l > 0, "sweep.arrival_rates", "entries must be positive");
  require(!seeds.empty(), "sweep.seeds", "must not be empty");
  require(workers >= 1, "sweep.workers", "must be at least 1");
  require(!out_dir.empty(), "output.dir", "must not be empty");
  require(trace_stride >= 1, "output.trace_stride", "must be at least 1");
}

ExperimentConfig parse_config(const std::string& text) {
  json root;
  try {
    root = json::parse(text);
  } catch (const json::parse_error& e) {
    std::size_t col = 0;
    const int line = line_of(text, e.byte == 0 ? 0 : e.byte - 1, col);
    throw ConfigError("config syntax error at line " + std::to_string(line) + ", column " +
                      std::to_string(col + 1));
  }

  ExperimentConfig c;
  Section top(root, "");

  auto sc = top.child("scenario");
  std::string kind = "cell";
  sc.read("kind", kind);
  require(kind == "cell" || kind == "uniform", "scenario.kind", "must be 'cell' or 'uniform'");
  c.kind = kind == "cell" ? ScenarioKind::Cell : ScenarioKind::Uniform;
  auto& s = c.scenario;
  sc.read("tx_cap", s.tx_cap);
  sc.read("proc_cap", s.proc_cap);
  sc.read("delay_weight", s.delay_weight);
  sc.read("power_weight", s.power_weight);
  sc.read("radius_m", s.geometry.radius_m);
  sc.read("zone_rates_bps", s.geometry.zone_rates_bps);
  sc.read("packet_bits", s.radio.packet_bits);
  sc.read("p_cmax_dbm", s.radio.p_cmax_dbm);
  sc.read("p0_dbm", s.radio.p0_dbm);
  sc.read("pathloss_alpha", s.radio.pathloss_alpha);
  sc.read("pathloss_a_db", s.radio.pathloss_a_db);
  sc.read("pathloss_b_db", s.radio.pathloss_b_db);
  sc.read("cycles_per_bit", s.radio.cycles_per_bit);
  sc.read("kappa", s.radio.switched_capacitance);
  sc.read("cpu_min_hz", s.radio.cpu_min_hz);
  sc.read("cpu_max_hz", s.radio.cpu_max_hz);
  sc.read("tx_rate", c.uniform.tx_rate);
  sc.read("tx_power", c.uniform.tx_power);
  sc.read("proc_rate", c.uniform.proc_rate);
  sc.read("proc_power", c.uniform.proc_power);
  sc.finish();
  if (!s.geometry.zone_rates_bps.empty() && s.geometry.radius_m > 0)
    s.geometry.zone_edges_m =
        CellGeometry::equal_width_edges(s.geometry.radius_m, s.geometry.n_zones());

  auto pol = top.child("policy");
  pol.read("names", c.policies);
  pol.read("eta", c.eta);
  pol.read("parallel_candidates", c.parallel_candidates);
  pol.finish();

  auto lr = top.child("learning");
  lr.read("horizon", c.horizon);
  lr.read("eval_epochs", c.eval_epochs);
  lr.read("g1", c.exploration.g1);
  lr.read("g2", c.exploration.g2);
  lr.read("alpha_numerator", c.steps.alpha_numerator);
  lr.read("alpha_offset", c.steps.alpha_offset);
  lr.read("warmup_fraction", c.warmup_fraction);
  lr.finish();

  auto sw = top.child("sweep");
  sw.read("n_devices", c.n_devices);
  sw.read("arrival_rates", c.arrival_rates);
  sw.read("seeds", c.seeds);
  sw.read("workers", c.workers);
  sw.finish();

  auto out = top.child("output");
  out.read("dir", c.out_dir);
  out.read("trace_stride", c.trace_stride);
  out.read("checkpoints", c.checkpoints);
  out.read("message_log", c.message_log);
  out.finish();

  top.finish();
  c.validate();
  return c;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

ScenarioParams make_scenario(const ExperimentConfig& cfg, int n_devices, double arrival_rate,
                             std::uint64_t seed) {
  const auto& s = cfg.scenario;
  if (cfg.kind == ScenarioKind::Uniform) {
    auto p = uniform_params(n_devices, arrival_rate, cfg.uniform.tx_rate, cfg.uniform.tx_power,
                            cfg.uniform.proc_rate, cfg.uniform.proc_power, s.tx_cap, s.proc_cap,
                            s.delay_weight, s.power_weight);
    p.validate();
    return p;
  }
  auto sc = s;
  sc.arrival_rate = arrival_rate;
  return build_scenario(sc, n_devices, seed);
}

std::vector<std::uint64_t> parse_seed_list(const std::string& text) {
  std::vector<std::uint64_t> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    std::size_t used = 0;
    unsigned long long v = 0;
    try {
      v = std::stoull(item, &used);
    } catch (const std::exception&) {
      throw ConfigError("invalid seed '" + item + "'");
    }
    if (used != item.size() || item.find('-') != std::string::npos)
      throw ConfigError("invalid seed '" + item + "'");
    out.push_back(v);
  }
  if (out.empty()) throw ConfigError("empty seed list");
  return out;
}

}  // namespace mec
