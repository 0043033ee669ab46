#pragma once

// Dense evaluation of the value network over all N*D fully connected neurons.
// The serial versions are the reference; the OpenMP versions must agree with
// them bit for bit since each output element is computed by the same loop.

#include <span>
#include <vector>

#include "mec/value_net.hpp"

namespace mec::kernels {

/// phi_bar = tanh(c x w^f) over every column.
void fc_activations_serial(std::span<const double> conv, const NetParams& net,
                           std::span<double> out);
void fc_activations_omp(std::span<const double> conv, const NetParams& net,
                        std::span<double> out);

/// Full pass with every layer materialized.
struct DenseTrace {
  std::vector<double> input;      // N x D, row-major one-hot
  std::vector<double> conv;       // N
  std::vector<double> fc;         // N*D, phi_bar
  std::vector<double> masked;     // N*D, phi = phi_bar (.) flatten(input)
  double value = 0.0;
};

DenseTrace forward_dense_serial(std::span<const int> active, const NetParams& net);
DenseTrace forward_dense_omp(std::span<const int> active, const NetParams& net);

/// Values of a batch of inputs via the sparse path; one entry per input.
void batch_values_serial(std::span<const std::vector<int>> inputs, const NetParams& net,
                         std::span<double> out);
void batch_values_omp(std::span<const std::vector<int>> inputs, const NetParams& net,
                      std::span<double> out);

}  // namespace mec::kernels
