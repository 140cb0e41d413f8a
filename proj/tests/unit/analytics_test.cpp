#include <doctest.h>

#include <algorithm>
#include <numeric>
#include <random>

#include "stationplan/analytics.hpp"
#include "stationplan/error.hpp"
#include "support/fixtures.hpp"
#include "support/synthetic.hpp"

using namespace stationplan;
using namespace stationplan::testing;

namespace {
const GeoPoint kOrigin{30.0, 120.0};
}

TEST_CASE("yearly counts") {
  CHECK(yearly_counts(std::span<const FireRecord>{}).empty());
  const std::vector<FireRecord> r{fire("a", kOrigin, at(2014, 1, 1), 5, "S"), fire("b", kOrigin, at(2014, 3, 1), 5, "S"),
                                  fire("c", kOrigin, at(2014, 6, 1), 5, "S"), fire("d", kOrigin, at(2015, 1, 1), 5, "S"),
                                  fire("d", kOrigin, at(2015, 1, 1), 8, "T", Role::Backup)};
  const auto c = yearly_counts(r);
  CHECK(c == std::map<int, int>{{2014, 3}, {2015, 1}});

  std::mt19937_64 rng(3);
  std::vector<FireRecord> many;
  for (int i = 0; i < 1000; ++i) {
    many.push_back(fire("f" + std::to_string(rng() % 700), kOrigin, at(2010 + static_cast<int>(rng() % 6), 1, 1), 5, "S"));
  }
  // Duplicate ids keep their earliest alarm.
  std::map<std::string, int> first_year;
  for (const auto& f : many) {
    const int y = year_of(f.alarm_time);
    auto [it, ins] = first_year.emplace(f.id, y);
    if (!ins) it->second = std::min(it->second, y);
  }
  std::map<int, int> brute;
  for (const auto& [id, y] : first_year) ++brute[y];
  CHECK(yearly_counts(many) == brute);
  std::shuffle(many.begin(), many.end(), rng);
  CHECK(yearly_counts(many) == brute);
}

TEST_CASE("five-number summary") {
  const auto f = five_number({5, 3, 1, 4, 2});
  CHECK(f.min == 1);
  CHECK(f.q1 == 2);
  CHECK(f.median == 3);
  CHECK(f.q3 == 4);
  CHECK(f.max == 5);
  CHECK(f.count == 5);
  const auto s = five_number({7.5});
  CHECK((s.min == 7.5 && s.q1 == 7.5 && s.median == 7.5 && s.q3 == 7.5 && s.max == 7.5));
  const auto d = five_number({1, 1, 2, 2, 3, 3, 4, 4, 5, 5});
  CHECK(d.q1 == doctest::Approx(2.0));
  CHECK(d.median == doctest::Approx(3.0));
  CHECK(d.q3 == doctest::Approx(4.0));
  CHECK_THROWS_AS(five_number({}), Error);
  const std::vector<double> four{1, 2, 3, 4};
  CHECK(quantile_inclusive(four, 0.25) == doctest::Approx(1.75));
}

TEST_CASE("response distribution by year") {
  const std::vector<FireRecord> r{fire("a", kOrigin, at(2014, 1, 1), 4, "S"), fire("b", kOrigin, at(2014, 3, 1), 8, "S"),
                                  fire("c", kOrigin, at(2015, 6, 1), 6, "S")};
  const auto d = response_distribution(r);
  CHECK(d.at(2014).median == 6.0);
  CHECK(d.at(2014).count == 2);
  CHECK(d.at(2015).count == 1);
  const Json j = to_json(d);
  CHECK(j["years"].size() == 2);
}

TEST_CASE("compass sectors") {
  CHECK(compass_sector(0.0) == 0);
  CHECK(compass_sector(29.999) == 0);
  CHECK(compass_sector(30.0) == 1);
  CHECK(compass_sector(90.0) == 2);
  CHECK(compass_sector(330.0) == 0);
  CHECK(compass_sector(329.9) == 5);
  CHECK(compass_sector(359.9) == 0);
  CHECK(compass_sector(180.0) == 3);
}

TEST_CASE("station profile") {
  const std::vector<Station> s{station("S", kOrigin), station("T", offset_km(kOrigin, 9, 9))};
  const std::vector<FireRecord> r{fire("a", offset_km(kOrigin, 0, 3), at(2014, 1, 1, 1), 5, "S"),
                                  fire("b", offset_km(kOrigin, 3, -1), at(2014, 1, 1, 5), 9, "S"),
                                  fire("c", offset_km(kOrigin, 0, -3), at(2014, 1, 1, 23), 12, "S", Role::Backup),
                                  fire("d", kOrigin, at(2014, 1, 1), 3, "T")};
  const auto p = station_profile(r, s, "S");
  CHECK(p.total == 3);
  CHECK(p.primary == 2);
  CHECK(p.backup == 1);
  CHECK(p.compass[0] == 1);
  CHECK(p.compass[2] == 1);
  CHECK(p.compass[3] == 1);
  CHECK(std::accumulate(p.compass.begin(), p.compass.end(), 0) == p.total);
  REQUIRE(p.time_sectors.size() == 6);
  CHECK(p.time_sectors[0].below_k == 1);
  CHECK(p.time_sectors[1].at_or_above_k == 1);
  CHECK(p.time_sectors[5].at_or_above_k == 1);
  int below = 0, above = 0;
  for (const auto& t : p.time_sectors) {
    below += t.below_k;
    above += t.at_or_above_k;
  }
  CHECK(below == 1);
  CHECK(above == 2);
  CHECK(station_profile(r, s, "S", 9.0, 6).time_sectors.size() == 4);
  CHECK_THROWS_AS(station_profile(r, s, "nope"), Error);
  CHECK_THROWS_AS(station_profile(r, s, "S", 9.0, 5), Error);

  const auto sum = station_summaries(r, s);
  REQUIRE(sum.size() == 2);
  CHECK(sum[0].total == 3);
  CHECK(sum[1].total == 1);
}

TEST_CASE("sd series sums cells and keeps efficiency") {
  const auto one = seasonal_tensor(5, 30, 1, 1);
  const auto two = seasonal_tensor(6, 30, 1, 2);
  for (const auto* t : {&one, &two}) {
    const auto model = fit(*t, {});
    const auto frame = attribute(model, *t);
    const auto series = sd_series(frame, *t);
    REQUIRE(series.size() == frame.time_count());
    for (std::size_t i = 0; i < series.size(); ++i) {
      double pred = 0.0, base = 0.0, actual = 0.0;
      const auto ti = *t->time_index(series[i].month);
      for (std::size_t c = 0; c < frame.cell_count(); ++c) {
        pred += frame.predicted(i, c);
        base += frame.baseline(i, c);
        actual += t->at(ti, 0, c);
      }
      CHECK(series[i].predicted == doctest::Approx(pred).epsilon(1e-12));
      CHECK(series[i].baseline == doctest::Approx(base).epsilon(1e-12));
      CHECK(series[i].actual == actual);
      const double phi = std::accumulate(series[i].phi.begin(), series[i].phi.end(), 0.0);
      CHECK(std::abs(phi - (series[i].predicted - series[i].baseline)) <= 1e-6);
    }
  }
  const auto model = fit(one, {});
  CHECK_THROWS_AS(sd_series(attribute(model, one), two), Error);
}
