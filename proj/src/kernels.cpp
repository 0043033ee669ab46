#include "mec/kernels.hpp"

#include <cmath>
#include <stdexcept>

namespace mec::kernels {

namespace {

double column_dot(std::span<const double> conv, const NetParams& net, int col) {
  const double* w = net.f_weights.data() + static_cast<std::size_t>(col) * net.n_devices;
  double z = 0.0;
  for (int m = 0; m < net.n_devices; ++m) z += conv[m] * w[m];
  return z;
}

DenseTrace prepare(std::span<const int> active, const NetParams& net) {
  if (static_cast<int>(active.size()) != net.n_devices)
    throw std::invalid_argument("input has wrong row count");
  DenseTrace t;
  t.input = dense_input(active, net.local_states);
  // c = w^c x^T, written as a full row-by-filter product.
  t.conv.assign(net.n_devices, 0.0);
  for (int n = 0; n < net.n_devices; ++n)
    for (int j = 0; j < net.local_states; ++j)
      t.conv[n] += net.c_weights[j] * t.input[static_cast<std::size_t>(n) * net.local_states + j];
  const auto cols = static_cast<std::size_t>(net.n_devices) * net.local_states;
  t.fc.assign(cols, 0.0);
  t.masked.assign(cols, 0.0);
  return t;
}

void finish(DenseTrace& t, const NetParams& net) {
  for (std::size_t i = 0; i < t.fc.size(); ++i) t.masked[i] = t.fc[i] * t.input[i];
  // Output sums device by device so it matches the sparse path exactly.
  for (int n = 0; n < net.n_devices; ++n)
    for (int j = 0; j < net.local_states; ++j) {
      const auto i = static_cast<std::size_t>(n) * net.local_states + j;
      if (t.input[i] != 0.0) t.value += t.masked[i] * net.node_values[i];
    }
}

}  // namespace

void fc_activations_serial(std::span<const double> conv, const NetParams& net,
                           std::span<double> out) {
  const int cols = net.n_devices * net.local_states;
  for (int col = 0; col < cols; ++col) out[col] = std::tanh(column_dot(conv, net, col));
}

void fc_activations_omp(std::span<const double> conv, const NetParams& net,
                        std::span<double> out) {
  const int cols = net.n_devices * net.local_states;
#pragma omp parallel for schedule(static)
  for (int col = 0; col < cols; ++col) out[col] = std::tanh(column_dot(conv, net, col));
}

DenseTrace forward_dense_serial(std::span<const int> active, const NetParams& net) {
  auto t = prepare(active, net);
  fc_activations_serial(t.conv, net, t.fc);
  finish(t, net);
  return t;
}

DenseTrace forward_dense_omp(std::span<const int> active, const NetParams& net) {
  auto t = prepare(active, net);
  fc_activations_omp(t.conv, net, t.fc);
  finish(t, net);
  return t;
}

void batch_values_serial(std::span<const std::vector<int>> inputs, const NetParams& net,
                         std::span<double> out) {
  for (std::size_t i = 0; i < inputs.size(); ++i) out[i] = forward(inputs[i], net).value;
}

void batch_values_omp(std::span<const std::vector<int>> inputs, const NetParams& net,
                      std::span<double> out) {
  const auto count = static_cast<long>(inputs.size());
#pragma omp parallel for schedule(dynamic, 4)
  for (long i = 0; i < count; ++i) out[i] = forward(inputs[i], net).value;
}

}  // namespace mec::kernels
