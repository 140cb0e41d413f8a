#include "stationplan/optimizer.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <thread>

#include "stationplan/error.hpp"

namespace stationplan {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr int kResampleAttempts = 100;
constexpr double kDuplicateTol = 1e-9;
}  // namespace

void validate(const GAConfig& cfg) {
  if (cfg.population < 4 || cfg.population % 2 != 0) {
    throw Error(errc::kInvalidArgument, "population must be even and >= 4");
  }
  if (cfg.generations < 1) throw Error(errc::kInvalidArgument, "generations must be >= 1");
  const auto prob = [](double p) { return p >= 0.0 && p <= 1.0; };
  if (!prob(cfg.crossover_prob)) throw Error(errc::kInvalidArgument, "crossover_prob must be in [0, 1]");
  if (cfg.mutation_prob && !prob(*cfg.mutation_prob)) {
    throw Error(errc::kInvalidArgument, "mutation_prob must be in [0, 1]");
  }
  if (!(cfg.eta_c > 0.0) || !(cfg.eta_m > 0.0)) throw Error(errc::kInvalidArgument, "eta_c and eta_m must be > 0");
  if (cfg.threads < 1) throw Error(errc::kInvalidArgument, "threads must be >= 1");
}

double mutation_prob(const GAConfig& cfg, int k_new) {
  return cfg.mutation_prob.value_or(1.0 / (2.0 * static_cast<double>(k_new)));
}

void to_json(Json& j, const GAConfig& cfg) {
  j = {{"population", cfg.population},
       {"generations", cfg.generations},
       {"crossover_prob", cfg.crossover_prob},
       {"mutation_prob", cfg.mutation_prob ? Json(*cfg.mutation_prob) : Json(nullptr)},
       {"eta_c", cfg.eta_c},
       {"eta_m", cfg.eta_m},
       {"seed", cfg.seed}};
}

void from_json(const Json& j, GAConfig& cfg) {
  if (!j.is_object()) throw Error(errc::kValidation, "ga_config must be an object");
  cfg.population = j.value("population", cfg.population);
  cfg.generations = j.value("generations", cfg.generations);
  cfg.crossover_prob = j.value("crossover_prob", cfg.crossover_prob);
  if (j.contains("mutation_prob") && !j.at("mutation_prob").is_null()) {
    cfg.mutation_prob = j.at("mutation_prob").get<double>();
  }
  cfg.eta_c = j.value("eta_c", cfg.eta_c);
  cfg.eta_m = j.value("eta_m", cfg.eta_m);
  cfg.seed = j.value("seed", cfg.seed);
  cfg.threads = j.value("threads", cfg.threads);
}

bool dominates(std::span<const double> a, std::span<const double> b) noexcept {
  bool strictly = false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i] > b[i]) return false;
    if (a[i] < b[i]) strictly = true;
  }
  return strictly;
}

std::vector<std::vector<std::size_t>> non_dominated_sort(std::span<const Objectives> objs) {
  const std::size_t n = objs.size();
  std::vector<std::vector<std::size_t>> fronts;
  if (n == 0) return fronts;
  for (const auto& o : objs) {
    if (o.size() != objs[0].size()) throw Error(errc::kShapeMismatch, "objective vectors differ in length");
  }
  std::vector<std::vector<std::size_t>> dominated(n);
  std::vector<std::size_t> count(n, 0);
  std::vector<std::size_t> current;
  for (std::size_t p = 0; p < n; ++p) {
    for (std::size_t q = 0; q < n; ++q) {
      if (p == q) continue;
      if (dominates(objs[p], objs[q])) {
        dominated[p].push_back(q);
      } else if (dominates(objs[q], objs[p])) {
        ++count[p];
      }
    }
    if (count[p] == 0) current.push_back(p);
  }
  while (!current.empty()) {
    std::vector<std::size_t> next;
    for (std::size_t p : current) {
      for (std::size_t q : dominated[p]) {
        if (--count[q] == 0) next.push_back(q);
      }
    }
    std::sort(next.begin(), next.end());
    fronts.push_back(std::move(current));
    current = std::move(next);
  }
  return fronts;
}

std::vector<double> crowding_distance(std::span<const Objectives> front) {
  const std::size_t n = front.size();
  if (n <= 2) return std::vector<double>(n, kInf);
  std::vector<double> d(n, 0.0);
  const std::size_t m = front[0].size();
  std::vector<std::size_t> order(n);
  for (std::size_t k = 0; k < m; ++k) {
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return front[a][k] < front[b][k]; });
    const double lo = front[order.front()][k];
    const double hi = front[order.back()][k];
    if (!(hi > lo)) continue;
    d[order.front()] = kInf;
    d[order.back()] = kInf;
    for (std::size_t i = 1; i + 1 < n; ++i) {
      d[order[i]] += (front[order[i + 1]][k] - front[order[i - 1]][k]) / (hi - lo);
    }
  }
  return d;
}

std::size_t tournament_select(std::span<const Ranked> pop, Rng& rng) {
  if (pop.size() < 2) throw Error(errc::kInvalidArgument, "tournament needs at least two candidates");
  const std::size_t a = rng.index(pop.size());
  std::size_t b = rng.index(pop.size() - 1);
  if (b >= a) ++b;
  if (pop[a].rank != pop[b].rank) return pop[a].rank < pop[b].rank ? a : b;
  if (pop[b].crowding > pop[a].crowding) return b;
  return a;
}

Selection environmental_select(std::span<const Objectives> pool, std::size_t keep) {
  Selection s;
  const auto fronts = non_dominated_sort(pool);
  for (std::size_t r = 0; r < fronts.size() && s.chosen.size() < keep; ++r) {
    const auto& f = fronts[r];
    std::vector<Objectives> objs;
    for (std::size_t i : f) objs.push_back(pool[i]);
    const auto cd = crowding_distance(objs);
    std::vector<std::size_t> order(f.size());
    std::iota(order.begin(), order.end(), 0);
    if (s.chosen.size() + f.size() > keep) {
      std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return cd[a] > cd[b]; });
      order.resize(keep - s.chosen.size());
    }
    for (std::size_t o : order) {
      s.chosen.push_back(f[o]);
      s.ranked.push_back({static_cast<int>(r), cd[o]});
    }
  }
  return s;
}

GeoPoint repair(const GeoPoint& p, const TargetArea& area, Rng& rng) {
  const BoundingBox& b = area.bbox();
  GeoPoint q{std::clamp(p.lat, b.min_lat, b.max_lat), std::clamp(p.lng, b.min_lng, b.max_lng)};
  if (area.contains(q)) return q;
  for (int i = 0; i < kResampleAttempts; ++i) {
    const double lat = b.min_lat + rng.uniform() * (b.max_lat - b.min_lat);
    const double lng = b.min_lng + rng.uniform() * (b.max_lng - b.min_lng);
    if (area.contains({lat, lng})) return {lat, lng};
  }
  GeoPoint in = area.interior_point();
  GeoPoint out = q;
  for (int i = 0; i < 60; ++i) {
    const GeoPoint mid{0.5 * (in.lat + out.lat), 0.5 * (in.lng + out.lng)};
    (area.contains(mid) ? in : out) = mid;
  }
  return in;
}

namespace {

// Deb's bounded simulated binary crossover on one coordinate.
void sbx(double& x1, double& x2, double lo, double hi, double eta, Rng& rng) {
  if (std::abs(x1 - x2) <= 1e-14 || !(hi > lo)) return;
  const double y1 = std::min(x1, x2), y2 = std::max(x1, x2);
  const double u = rng.uniform();
  const auto betaq = [&](double beta) {
    const double alpha = 2.0 - std::pow(beta, -(eta + 1.0));
    return u <= 1.0 / alpha ? std::pow(u * alpha, 1.0 / (eta + 1.0))
                            : std::pow(1.0 / (2.0 - u * alpha), 1.0 / (eta + 1.0));
  };
  double c1 = 0.5 * ((y1 + y2) - betaq(1.0 + 2.0 * (y1 - lo) / (y2 - y1)) * (y2 - y1));
  double c2 = 0.5 * ((y1 + y2) + betaq(1.0 + 2.0 * (hi - y2) / (y2 - y1)) * (y2 - y1));
  c1 = std::clamp(c1, lo, hi);
  c2 = std::clamp(c2, lo, hi);
  if (rng.uniform() < 0.5) std::swap(c1, c2);
  x1 = c1;
  x2 = c2;
}

// Deb's bounded polynomial mutation on one coordinate.
void poly_mutate(double& x, double lo, double hi, double eta, Rng& rng) {
  if (!(hi > lo)) return;
  const double d1 = (x - lo) / (hi - lo);
  const double d2 = (hi - x) / (hi - lo);
  const double u = rng.uniform();
  const double pw = 1.0 / (eta + 1.0);
  double dq;
  if (u < 0.5) {
    const double v = 2.0 * u + (1.0 - 2.0 * u) * std::pow(1.0 - d1, eta + 1.0);
    dq = std::pow(v, pw) - 1.0;
  } else {
    const double v = 2.0 * (1.0 - u) + 2.0 * (u - 0.5) * std::pow(1.0 - d2, eta + 1.0);
    dq = 1.0 - std::pow(v, pw);
  }
  x = std::clamp(x + dq * (hi - lo), lo, hi);
}

}  // namespace

std::pair<Genome, Genome> crossover_mutate(const Genome& a, const Genome& b, const GAConfig& cfg,
                                           double p_m, const TargetArea& area, Rng& rng) {
  if (a.size() != b.size()) throw Error(errc::kShapeMismatch, "parent genomes differ in length");
  Genome c1 = a, c2 = b;
  const BoundingBox& box = area.bbox();
  const auto coords = [&](Genome& g, std::size_t i) -> double& { return i % 2 == 0 ? g[i / 2].lat : g[i / 2].lng; };
  const auto lo = [&](std::size_t i) { return i % 2 == 0 ? box.min_lat : box.min_lng; };
  const auto hi = [&](std::size_t i) { return i % 2 == 0 ? box.max_lat : box.max_lng; };
  const std::size_t vars = 2 * a.size();
  for (std::size_t i = 0; i < vars; ++i) {
    if (cfg.crossover_prob > 0.0 && rng.uniform() < cfg.crossover_prob) {
      sbx(coords(c1, i), coords(c2, i), lo(i), hi(i), cfg.eta_c, rng);
    }
  }
  for (Genome* g : {&c1, &c2}) {
    for (std::size_t i = 0; i < vars; ++i) {
      if (p_m > 0.0 && rng.uniform() < p_m) poly_mutate(coords(*g, i), lo(i), hi(i), cfg.eta_m, rng);
    }
  }
  // Parents are in-area, so untouched coordinates pass straight through.
  for (Genome* g : {&c1, &c2}) {
    for (auto& p : *g) {
      if (!area.contains(p)) p = repair(p, area, rng);
    }
  }
  return {std::move(c1), std::move(c2)};
}

std::optional<double> pearson(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) throw Error(errc::kShapeMismatch, "pearson inputs differ in length");
  const double n = static_cast<double>(x.size());
  if (x.size() < 2) return std::nullopt;
  const double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
  const double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
    syy += (y[i] - my) * (y[i] - my);
  }
  if (!(sxx > 0.0) || !(syy > 0.0)) return std::nullopt;
  return std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
}

CorrelationMatrix objective_correlations(std::span<const Objectives> objs) {
  if (objs.size() < 2) {
    throw Error(errc::kInvalidArgument, "correlation needs at least two solutions; skip the matrix");
  }
  const std::size_t m = objs[0].size();
  std::vector<std::vector<double>> cols(m);
  for (const auto& o : objs) {
    if (o.size() != m) throw Error(errc::kShapeMismatch, "objective vectors differ in length");
    for (std::size_t k = 0; k < m; ++k) cols[k].push_back(o[k]);
  }
  CorrelationMatrix c;
  c.r.assign(m, std::vector<double>(m, 0.0));
  c.zero_variance.assign(m, false);
  for (std::size_t k = 0; k < m; ++k) {
    const auto [lo, hi] = std::minmax_element(cols[k].begin(), cols[k].end());
    c.zero_variance[k] = *lo == *hi;
  }
  for (std::size_t a = 0; a < m; ++a) {
    c.r[a][a] = 1.0;
    for (std::size_t b = a + 1; b < m; ++b) {
      const double r = pearson(cols[a], cols[b]).value_or(0.0);
      c.r[a][b] = c.r[b][a] = r;
    }
  }
  return c;
}

namespace {

std::vector<Objectives> evaluate_all(const Problem& pb, const std::vector<Genome>& genomes, int threads) {
  std::vector<Objectives> out(genomes.size());
  const auto work = [&](std::size_t begin, std::size_t step) {
    for (std::size_t i = begin; i < genomes.size(); i += step) out[i] = pb.context->evaluate(genomes[i], pb.criteria);
  };
  const auto workers = static_cast<std::size_t>(std::max(1, threads));
  if (workers == 1) {
    work(0, 1);
    return out;
  }
  std::vector<std::exception_ptr> errors(workers);
  {
    std::vector<std::jthread> pool;
    for (std::size_t w = 0; w < workers; ++w) {
      pool.emplace_back([&, w] {
        try {
          work(w, workers);
        } catch (...) {
          errors[w] = std::current_exception();
        }
      });
    }
  }
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  return out;
}

GeoPoint sample_in_area(const TargetArea& area, Rng& rng) {
  const BoundingBox& b = area.bbox();
  const GeoPoint p{b.min_lat + rng.uniform() * (b.max_lat - b.min_lat),
                   b.min_lng + rng.uniform() * (b.max_lng - b.min_lng)};
  return area.contains(p) ? p : repair(p, area, rng);
}

bool same_genome(const Genome& a, const Genome& b) {
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (std::abs(a[i].lat - b[i].lat) > kDuplicateTol || std::abs(a[i].lng - b[i].lng) > kDuplicateTol) {
      return false;
    }
  }
  return true;
}

}  // namespace

ParetoResult run(const Problem& pb, const GAConfig& cfg, const ProgressFn& progress) {
  validate(cfg);
  if (pb.context == nullptr) throw Error(errc::kInvalidArgument, "problem has no criteria context");
  if (pb.k_new < 1) throw Error(errc::kInvalidArgument, "k_new must be >= 1");
  if (pb.criteria.empty()) throw Error(errc::kInvalidArgument, "select at least one criterion");
  const TargetArea& area = pb.context->area();
  const double p_m = mutation_prob(cfg, pb.k_new);
  const auto P = static_cast<std::size_t>(cfg.population);
  Rng rng(cfg.seed);

  std::vector<Genome> pop(P);
  for (auto& g : pop) {
    for (int i = 0; i < pb.k_new; ++i) g.push_back(sample_in_area(area, rng));
  }
  std::vector<Objectives> objs = evaluate_all(pb, pop, cfg.threads);

  ParetoResult result;
  result.criteria = pb.criteria;
  result.config = cfg;
  result.k_new = pb.k_new;
  result.initial_objectives = objs;

  std::vector<Ranked> ranked(P);
  {
    const auto fronts = non_dominated_sort(objs);
    for (std::size_t r = 0; r < fronts.size(); ++r) {
      std::vector<Objectives> fo;
      for (std::size_t i : fronts[r]) fo.push_back(objs[i]);
      const auto cd = crowding_distance(fo);
      for (std::size_t k = 0; k < fronts[r].size(); ++k) ranked[fronts[r][k]] = {static_cast<int>(r), cd[k]};
    }
  }

  for (int gen = 0; gen < cfg.generations; ++gen) {
    std::vector<Genome> children;
    children.reserve(P);
    while (children.size() < P) {
      const Genome& a = pop[tournament_select(ranked, rng)];
      const Genome& b = pop[tournament_select(ranked, rng)];
      auto [c1, c2] = crossover_mutate(a, b, cfg, p_m, area, rng);
      children.push_back(std::move(c1));
      children.push_back(std::move(c2));
    }
    auto child_objs = evaluate_all(pb, children, cfg.threads);

    std::vector<Genome> pool_g = std::move(pop);
    std::vector<Objectives> pool_o = std::move(objs);
    for (std::size_t i = 0; i < P; ++i) {
      pool_g.push_back(std::move(children[i]));
      pool_o.push_back(std::move(child_objs[i]));
    }
    const Selection sel = environmental_select(pool_o, P);
    pop.clear();
    objs.clear();
    for (std::size_t i : sel.chosen) {
      pop.push_back(std::move(pool_g[i]));
      objs.push_back(std::move(pool_o[i]));
    }
    ranked = sel.ranked;
    if (progress && !progress(gen + 1, cfg.generations)) throw Error("cancelled", "optimization cancelled");
  }

  for (std::size_t i = 0; i < P; ++i) {
    if (ranked[i].rank != 0) continue;
    const bool dup = std::any_of(result.solutions.begin(), result.solutions.end(),
                                 [&](const Solution& s) { return same_genome(s.genome, pop[i]); });
    if (!dup) result.solutions.push_back({pop[i], objs[i], {}, 0, ranked[i].crowding});
  }

  const std::size_t m = pb.criteria.size();
  for (std::size_t k = 0; k < m; ++k) {
    double lo = kInf, hi = -kInf;
    for (const auto& s : result.solutions) {
      lo = std::min(lo, s.objectives[k]);
      hi = std::max(hi, s.objectives[k]);
    }
    for (auto& s : result.solutions) s.normalized.push_back(hi > lo ? (hi - s.objectives[k]) / (hi - lo) : 1.0);
  }
  if (result.solutions.size() >= 2) {
    std::vector<Objectives> front;
    for (const auto& s : result.solutions) front.push_back(s.objectives);
    result.correlation = objective_correlations(front);
  }
  return result;
}

Json to_json(const ParetoResult& r) {
  Json names = Json::array();
  for (Criterion c : r.criteria) names.push_back(std::string(to_string(c)));
  Json sols = Json::array();
  for (const auto& s : r.solutions) {
    Json obj = Json::object(), norm = Json::object();
    for (std::size_t k = 0; k < r.criteria.size(); ++k) {
      obj[std::string(to_string(r.criteria[k]))] = s.objectives[k];
      norm[std::string(to_string(r.criteria[k]))] = s.normalized[k];
    }
    sols.push_back({{"genome", s.genome},
                    {"objectives", std::move(obj)},
                    {"normalized_objectives", std::move(norm)},
                    {"rank", s.rank},
                    {"crowding", finite_or_null(s.crowding)}});
  }
  Json corr = nullptr;
  if (r.correlation) {
    corr = {{"criteria", names}, {"matrix", r.correlation->r}, {"zero_variance", r.correlation->zero_variance}};
  }
  return {{"criteria", names},
          {"k_new", r.k_new},
          {"seed", r.config.seed},
          {"config", r.config},
          {"solutions", std::move(sols)},
          {"correlation", std::move(corr)}};
}

}  // namespace stationplan
