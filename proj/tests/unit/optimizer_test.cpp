#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "stationplan/error.hpp"
#include "stationplan/optimizer.hpp"
#include "support/fixtures.hpp"

using namespace stationplan;
using stationplan::testing::offset_km;
using stationplan::testing::random_point;

namespace {

const GeoPoint kOrigin{30.0, 120.0};

std::vector<std::vector<std::size_t>> brute_force_fronts(const std::vector<Objectives>& objs) {
  std::vector<std::vector<std::size_t>> fronts;
  std::vector<bool> removed(objs.size(), false);
  std::size_t left = objs.size();
  while (left > 0) {
    std::vector<std::size_t> f;
    for (std::size_t i = 0; i < objs.size(); ++i) {
      if (removed[i]) continue;
      bool dominated = false;
      for (std::size_t j = 0; j < objs.size() && !dominated; ++j) {
        if (removed[j] || i == j) continue;
        bool le = true, lt = false;
        for (std::size_t k = 0; k < objs[i].size(); ++k) {
          le = le && objs[j][k] <= objs[i][k];
          lt = lt || objs[j][k] < objs[i][k];
        }
        dominated = le && lt;
      }
      if (!dominated) f.push_back(i);
    }
    for (std::size_t i : f) removed[i] = true;
    left -= f.size();
    fronts.push_back(f);
  }
  return fronts;
}

TargetArea square_km(double w) {
  return TargetArea::polygon({kOrigin, offset_km(kOrigin, w, 0), offset_km(kOrigin, w, w), offset_km(kOrigin, 0, w)});
}

}  // namespace

TEST_CASE("non_dominated_sort hand examples") {
  const std::vector<Objectives> a{{1, 2}, {2, 1}, {3, 3}};
  const auto f = non_dominated_sort(a);
  REQUIRE(f.size() == 2);
  CHECK(f[0] == std::vector<std::size_t>{0, 1});
  CHECK(f[1] == std::vector<std::size_t>{2});
  const std::vector<Objectives> one{{5, 5}};
  CHECK(non_dominated_sort(one).size() == 1);
  const std::vector<Objectives> same(4, Objectives{1, 1});
  const auto fs = non_dominated_sort(same);
  REQUIRE(fs.size() == 1);
  CHECK(fs[0].size() == 4);
  CHECK(non_dominated_sort(std::span<const Objectives>{}).empty());
  const std::vector<Objectives> ragged{{1, 2}, {1}};
  CHECK_THROWS_AS(non_dominated_sort(ragged), Error);
}

TEST_CASE("non_dominated_sort matches brute force") {
  std::mt19937_64 rng(11);
  for (int t = 0; t < 300; ++t) {
    const std::size_t n = 1 + rng() % 16, m = 1 + rng() % 5;
    std::vector<Objectives> objs(n, Objectives(m));
    for (auto& o : objs) {
      for (auto& v : o) v = static_cast<double>(rng() % 5);  // ties on purpose
    }
    CHECK(non_dominated_sort(objs) == brute_force_fronts(objs));
  }
}

TEST_CASE("crowding distance") {
  const std::vector<Objectives> f{{1, 4}, {2, 3}, {3, 2}};
  const auto d = crowding_distance(f);
  CHECK(std::isinf(d[0]));
  CHECK(d[1] == doctest::Approx(2.0));
  CHECK(std::isinf(d[2]));
  const std::vector<Objectives> two{{1, 1}, {2, 0}};
  for (double v : crowding_distance(two)) CHECK(std::isinf(v));
  // Second objective constant: contributes nothing.
  const std::vector<Objectives> flat{{1, 7}, {2, 7}, {4, 7}, {5, 7}};
  const auto df = crowding_distance(flat);
  CHECK(df[1] == doctest::Approx(0.75));
  CHECK(df[2] == doctest::Approx(0.75));
  const std::vector<Objectives> all_same(3, Objectives{2, 2});
  for (double v : crowding_distance(all_same)) CHECK(v == 0.0);
}

TEST_CASE("tournament selection") {
  Rng rng(3);
  const std::vector<Ranked> ranks{{0, 1.0}, {1, 5.0}};
  for (int i = 0; i < 20; ++i) CHECK(tournament_select(ranks, rng) == 0);
  const std::vector<Ranked> crowd{{0, 1.5}, {0, INFINITY}};
  for (int i = 0; i < 20; ++i) CHECK(tournament_select(crowd, rng) == 1);
  // Full tie: the first drawn wins, reproduced from the same stream.
  const std::vector<Ranked> tie(5, Ranked{0, 1.0});
  Rng a(9), b(9);
  for (int i = 0; i < 50; ++i) {
    const std::size_t first = b.index(5);
    b.index(4);
    CHECK(tournament_select(tie, a) == first);
  }
  const std::vector<Ranked> lone{{0, 0.0}};
  CHECK_THROWS_AS(tournament_select(lone, rng), Error);
}

TEST_CASE("environmental selection keeps the first front when it fits") {
  std::mt19937_64 rng(5);
  for (int t = 0; t < 100; ++t) {
    std::vector<Objectives> pool(40, Objectives(3));
    for (auto& o : pool) {
      for (auto& v : o) v = std::uniform_real_distribution<double>(0, 1)(rng);
    }
    const auto f0 = non_dominated_sort(pool)[0];
    const std::size_t keep = 20;
    const auto sel = environmental_select(pool, keep);
    CHECK(sel.chosen.size() == keep);
    if (f0.size() <= keep) {
      for (std::size_t i : f0) CHECK(std::find(sel.chosen.begin(), sel.chosen.end(), i) != sel.chosen.end());
    }
  }
}

TEST_CASE("crossover and mutation") {
  const auto area = square_km(10);
  Rng rng(1);
  const Genome a{offset_km(kOrigin, 2, 2), offset_km(kOrigin, 8, 3)};
  const Genome b{offset_km(kOrigin, 6, 7), offset_km(kOrigin, 1, 9)};
  GAConfig zero;
  zero.crossover_prob = 0.0;
  auto [c1, c2] = crossover_mutate(a, b, zero, 0.0, area, rng);
  CHECK(c1 == a);
  CHECK(c2 == b);
  GAConfig def;
  auto [d1, d2] = crossover_mutate(a, a, def, 0.0, area, rng);
  CHECK(d1 == a);
  CHECK(d2 == a);

  // Non-convex area: offspring must land inside.
  const auto u = TargetArea::polygon({kOrigin, offset_km(kOrigin, 9, 0), offset_km(kOrigin, 9, 9),
                                      offset_km(kOrigin, 7, 9), offset_km(kOrigin, 7, 1),
                                      offset_km(kOrigin, 2, 1), offset_km(kOrigin, 2, 9),
                                      offset_km(kOrigin, 0, 9)});
  const Genome ua{offset_km(kOrigin, 1, 8)}, ub{offset_km(kOrigin, 8, 8)};
  GAConfig hot;
  for (int i = 0; i < 10000; ++i) {
    auto [x, y] = crossover_mutate(ua, ub, hot, 1.0, u, rng);
    CHECK(u.contains(x[0]));
    CHECK(u.contains(y[0]));
  }
}

TEST_CASE("repair falls back to bisection") {
  // Thin sliver: resampling in the bbox almost never hits it.
  const auto sliver = TargetArea::polygon({kOrigin, offset_km(kOrigin, 10, 10), offset_km(kOrigin, 10, 10.001)});
  Rng rng(2);
  const GeoPoint fixed = repair(offset_km(kOrigin, 10, 0), sliver, rng);
  CHECK(sliver.contains(fixed));
}

TEST_CASE("pearson fixtures") {
  const std::vector<double> x{1, 2, 3, 4, 5}, x2{2, 4, 6, 8, 10};
  CHECK(std::abs(*pearson(x, x2) - 1.0) <= 1e-12);
  const std::vector<double> a{1, 2, 3}, b{6, 4, 2}, c{1, 3, 2};
  CHECK(std::abs(*pearson(a, b) + 1.0) <= 1e-12);
  CHECK(std::abs(*pearson(a, c) - 0.5) <= 1e-12);
  const std::vector<double> k{4, 4, 4};
  CHECK_FALSE(pearson(a, k).has_value());

  const std::vector<Objectives> rows{{1, 6, 4}, {2, 4, 4}, {3, 2, 4}};
  const auto m = objective_correlations(rows);
  CHECK(m.r[0][0] == 1.0);
  CHECK(m.r[2][2] == 1.0);
  CHECK(m.r[0][1] == doctest::Approx(-1.0));
  CHECK(m.r[1][0] == m.r[0][1]);
  CHECK(m.r[0][2] == 0.0);
  CHECK(m.zero_variance == std::vector<bool>{false, false, true});
  const std::vector<Objectives> lone{{1, 2}};
  CHECK_THROWS_AS(objective_correlations(lone), Error);
}

TEST_CASE("GA config validation") {
  GAConfig c;
  CHECK_NOTHROW(validate(c));
  c.population = 7;
  CHECK_THROWS_AS(validate(c), Error);
  c.population = 2;
  CHECK_THROWS_AS(validate(c), Error);
  c = {};
  c.crossover_prob = 1.5;
  CHECK_THROWS_AS(validate(c), Error);
  c = {};
  CHECK(mutation_prob(c, 2) == 0.25);
  const Json j = c;
  CHECK(j.get<GAConfig>().population == 100);
}

TEST_CASE("run: single ART criterion converges to the fire") {
  const GridSpec g{kOrigin, 1.0, 20, 20};
  const auto area = square_km(20);
  const GeoPoint f = offset_km(kOrigin, 13, 6);
  const std::vector<GeoPoint> fires{f};
  const CriteriaContext ctx(fires, {}, area, g, {});
  GAConfig cfg;
  cfg.population = 40;
  cfg.generations = 60;
  cfg.seed = 17;
  const auto r = run({&ctx, {Criterion::ART}, 1}, cfg);
  REQUIRE_FALSE(r.solutions.empty());
  CHECK(haversine_km(r.solutions[0].genome[0], f) < 1.0);
  CHECK(r.solutions[0].objectives[0] <= travel_time(area.interior_point(), f, {}));
  CHECK_FALSE(r.correlation.has_value());
}

TEST_CASE("run: multi-criteria front, determinism, threads") {
  std::mt19937_64 rng(4);
  const GridSpec g{kOrigin, 2.0, 10, 10};
  const auto area = square_km(20);
  std::vector<GeoPoint> fires;
  for (int i = 0; i < 60; ++i) fires.push_back(random_point(rng, kOrigin, 20, 20));
  const CriteriaContext ctx(fires, {stationplan::testing::station("E", offset_km(kOrigin, 4, 4))}, area, g, {});
  const std::vector<Criterion> all(std::begin(kAllCriteria), std::end(kAllCriteria));
  GAConfig cfg;
  cfg.population = 20;
  cfg.generations = 15;
  cfg.seed = 99;
  int calls = 0;
  const auto r1 = run({&ctx, all, 2}, cfg, [&](int, int) { return ++calls > 0; });
  CHECK(calls == 15);
  cfg.threads = 3;
  const auto r2 = run({&ctx, all, 2}, cfg);
  CHECK(to_json(r1).dump() == to_json(r2).dump());

  std::vector<Objectives> front;
  for (const auto& s : r1.solutions) front.push_back(s.objectives);
  CHECK(non_dominated_sort(front).size() == 1);
  for (const auto& s : r1.solutions) {
    for (const auto& p : s.genome) CHECK(area.contains(p));
    for (double v : s.normalized) CHECK((v >= 0.0 && v <= 1.0));
  }
  if (r1.correlation) {
    const auto& m = r1.correlation->r;
    for (std::size_t i = 0; i < m.size(); ++i) {
      CHECK(m[i][i] == 1.0);
      for (std::size_t j = 0; j < m.size(); ++j) CHECK(m[i][j] == m[j][i]);
    }
  }
  CHECK_THROWS_AS(run({&ctx, all, 2}, cfg, [](int, int) { return false; }), Error);
}
