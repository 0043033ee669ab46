#include <doctest.h>

#include <cmath>
#include <stdexcept>

#include "mec/scenario.hpp"

using namespace mec;

TEST_CASE("placement is area uniform and reproducible") {
  const auto geo = default_geometry();
  const auto a = place_devices(geo, 2000, 9);
  const auto b = place_devices(geo, 2000, 9);
  CHECK(a.radius_m == b.radius_m);
  int inner = 0;
  for (std::size_t i = 0; i < a.radius_m.size(); ++i) {
    CHECK(a.radius_m[i] <= geo.radius_m);
    CHECK(a.radius_m[i] >= geo.zone_edges_m[a.zone[i]]);
    CHECK(a.radius_m[i] <= geo.zone_edges_m[a.zone[i] + 1]);
    if (a.radius_m[i] < geo.radius_m / 2) ++inner;
  }
  // A quarter of the disk area lies inside half the radius.
  CHECK(inner / 2000.0 == doctest::Approx(0.25).epsilon(0.15));
}

TEST_CASE("radio model") {
  RadioConstants c;
  CHECK(dbm_to_watts(30.0) == doctest::Approx(1.0));
  CHECK(pathloss_db(1.0, c) == doctest::Approx(15.3));
  CHECK(tx_power_dbm(pathloss_db(500.0, c), c) ==
        doctest::Approx(-100.0 + 15.3 + 37.6 * std::log10(500.0)));
  CHECK(tx_power_dbm(pathloss_db(5000.0, c), c) == doctest::Approx(23.0));
  CHECK(tx_power_dbm(pathloss_db(10.0, c), c) < 23.0);
}

TEST_CASE("device parameters from zone and cpu") {
  const auto geo = default_geometry();
  RadioConstants c;
  const auto near = derive_device_params(0, geo, c, 2e9);
  const auto far = derive_device_params(geo.n_zones() - 1, geo, c, 2e9);
  CHECK(near.tx_rate > far.tx_rate);
  CHECK(near.tx_power < far.tx_power);
  CHECK(near.proc_rate == doctest::Approx(2e9 / (1e5 * 1e4)));
  CHECK(near.proc_power == doctest::Approx(1e-28 * 8e27));
  CHECK_THROWS(derive_device_params(geo.n_zones(), geo, c, 2e9));
}

TEST_CASE("scenario depends only on config, size and seed") {
  ScenarioConfig cfg;
  const auto a = build_scenario(cfg, 5, 3);
  const auto b = build_scenario(cfg, 5, 3);
  const auto c = build_scenario(cfg, 5, 4);
  CHECK(a.tx_rates == b.tx_rates);
  CHECK(a.proc_rates == b.proc_rates);
  CHECK(a.tx_rates != c.tx_rates);
  CHECK(a.tx_cap == 7);
  for (int n = 0; n < 5; ++n) CHECK(a.arrival_rates[n] == 1.0);
}

TEST_CASE("geometry validation") {
  auto g = default_geometry();
  g.zone_edges_m[3] = g.zone_edges_m[2];
  CHECK_THROWS(g.validate());
  auto h = default_geometry();
  h.zone_edges_m.pop_back();
  CHECK_THROWS(h.validate());
}
