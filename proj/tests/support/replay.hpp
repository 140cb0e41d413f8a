#pragma once

// Hand-checked replay fixture: three primary actions by station A in one
// quarter against a single new station N1 about 10 simulated minutes away.
// Two recorded responses (15 and 12 min) are slower and move to N1; the
// third (5 min) stays with A.

#include <vector>

#include "support/fixtures.hpp"

namespace stationplan::testing {

struct ReplayFixture {
  std::vector<FireRecord> fires;
  std::vector<Station> existing;
  std::vector<GeoPoint> solution;
};

inline ReplayFixture three_fire_fixture() {
  const GeoPoint origin{30.0, 120.0};
  const GeoPoint a = origin;
  const GeoPoint n1 = offset_km(origin, 20.0, 0.0);
  // 100/21 km at detour 1.4 and 40 km/h is 10 minutes.
  const double d = 100.0 / 21.0;
  ReplayFixture fx;
  fx.existing = {station("A", a)};
  fx.solution = {n1};
  fx.fires = {fire("F1", offset_km(n1, 0.0, d), at(2014, 1, 5), 15.0, "A"),
              fire("F2", offset_km(n1, 0.0, -d), at(2014, 2, 9), 12.0, "A"),
              fire("F3", offset_km(n1, -d, 0.0), at(2014, 3, 30), 5.0, "A")};
  return fx;
}

}  // namespace stationplan::testing
