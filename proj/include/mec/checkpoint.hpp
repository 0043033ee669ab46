#pragma once

// Text checkpoints. Doubles are written as C99 hex floats so a save/load
// round trip is bit-exact. Layout of a network checkpoint:
//
//   mecrl-net 1
//   n_devices <N>
//   local_states <D>
//   eta <hex>
//   c_weights <D> <hex>...
//   f_weights <N*N*D> <hex>...      column-major, see NetParams
//   node_values <N*D> <hex>...
//   visits <N*D> <uint>...
//   reward_totals <N> <hex>...
//   time_total <hex>
//   avg_reward <N> <hex>...
//   epoch <uint>
//   end

#include <iosfwd>
#include <string>
#include <vector>

#include "mec/value_net.hpp"

namespace mec {

void write_net_checkpoint(std::ostream& os, const NetParams& net, const LearnerState& learner);
/// Throws std::runtime_error on a malformed or mismatched checkpoint.
void read_net_checkpoint(std::istream& is, NetParams& net, LearnerState& learner);

void save_net_checkpoint(const std::string& path, const NetParams& net, const LearnerState& learner);
void load_net_checkpoint(const std::string& path, NetParams& net, LearnerState& learner);

// Token helpers shared with the simulator checkpoint.
namespace ckpt {
void write_double(std::ostream& os, double v);
void write_doubles(std::ostream& os, const char* key, const std::vector<double>& v);
double read_double(std::istream& is);
void expect_key(std::istream& is, const char* key);
std::vector<double> read_doubles(std::istream& is, const char* key);
}  // namespace ckpt

}  // namespace mec
