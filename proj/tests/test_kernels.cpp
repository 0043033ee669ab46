#include <doctest.h>

#include <random>
#include <stdexcept>

#include "mec/kernels.hpp"

using namespace mec;

namespace {

NetParams net_for(int n, int d, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  auto net = NetParams::initialized(n, d, rng);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (auto& v : net.node_values) v = u(rng);
  return net;
}

std::vector<int> random_active(int n, int d, std::mt19937_64& rng) {
  std::uniform_int_distribution<int> idx(0, d - 1);
  std::vector<int> a(n);
  for (auto& x : a) x = idx(rng);
  return a;
}

}  // namespace

TEST_CASE("dense serial and OpenMP passes agree bit for bit") {
  const auto net = net_for(6, 128, 1);
  std::mt19937_64 rng(2);
  for (int i = 0; i < 20; ++i) {
    const auto a = random_active(6, 128, rng);
    const auto s = kernels::forward_dense_serial(a, net);
    const auto o = kernels::forward_dense_omp(a, net);
    CHECK(s.fc == o.fc);
    CHECK(s.masked == o.masked);
    CHECK(s.value == o.value);
  }
}

TEST_CASE("dense and sparse paths agree") {
  const auto net = net_for(4, 64, 3);
  std::mt19937_64 rng(4);
  for (int i = 0; i < 50; ++i) {
    const auto a = random_active(4, 64, rng);
    const auto dense = kernels::forward_dense_serial(a, net);
    const auto sparse = forward(a, net);
    CHECK(dense.value == sparse.value);
    int nonzero = 0;
    for (int n = 0; n < 4; ++n) {
      CHECK(dense.conv[n] == sparse.conv[n]);
      CHECK(dense.masked[n * 64 + a[n]] == sparse.features[n]);
    }
    for (double m : dense.masked) nonzero += m != 0.0;
    CHECK(nonzero <= 4);
  }
}

TEST_CASE("batch scoring serial and OpenMP agree") {
  const auto net = net_for(5, 64, 5);
  std::mt19937_64 rng(6);
  std::vector<std::vector<int>> inputs;
  for (int i = 0; i < 300; ++i) inputs.push_back(random_active(5, 64, rng));
  std::vector<double> s(inputs.size()), o(inputs.size());
  kernels::batch_values_serial(inputs, net, s);
  kernels::batch_values_omp(inputs, net, o);
  CHECK(s == o);
}
