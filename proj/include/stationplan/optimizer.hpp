#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <random>
#include <span>
#include <utility>
#include <vector>

#include "stationplan/criteria.hpp"
#include "stationplan/json_io.hpp"

namespace stationplan {

using Objectives = std::vector<double>;
using Genome = std::vector<GeoPoint>;

struct GAConfig {
  int population = 100;
  int generations = 200;
  double crossover_prob = 0.9;
  std::optional<double> mutation_prob;  // default 1 / (2 * k_new)
  double eta_c = 15.0;
  double eta_m = 20.0;
  std::uint64_t seed = 1;
  int threads = 1;  // objective evaluation workers
};

/// Throws Error(invalid_argument) on an odd or too small population,
/// G < 1, probabilities outside [0, 1] or non-positive indices.
void validate(const GAConfig& cfg);
double mutation_prob(const GAConfig& cfg, int k_new);

void to_json(Json& j, const GAConfig& cfg);
void from_json(const Json& j, GAConfig& cfg);

/// Platform-independent stream: uniform() takes the top 53 bits of a 64-bit
/// Mersenne twister, so runs reproduce across standard libraries.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
  /// Uniform integer in [0, n).
  std::size_t index(std::size_t n) {
    const auto i = static_cast<std::size_t>(uniform() * static_cast<double>(n));
    return i < n ? i : n - 1;
  }

 private:
  std::mt19937_64 engine_;
};

/// a dominates b under minimization.
bool dominates(std::span<const double> a, std::span<const double> b) noexcept;

/// Fronts F0, F1, ... of indices, each sorted ascending.  Throws
/// Error(shape_mismatch) when vector lengths differ.
std::vector<std::vector<std::size_t>> non_dominated_sort(std::span<const Objectives> objs);

/// Deb's crowding distance.  Fronts of size <= 2 are all +inf; objectives
/// with zero range contribute nothing, including to the boundary rule.
std::vector<double> crowding_distance(std::span<const Objectives> front);

struct Ranked {
  int rank = 0;
  double crowding = 0.0;
};

/// Binary tournament over two distinct uniformly drawn members: lower rank,
/// then larger crowding, then the first drawn.  Throws for fewer than two.
std::size_t tournament_select(std::span<const Ranked> pop, Rng& rng);

/// Picks `keep` of the pooled vectors by front rank, filling the last front
/// by descending crowding distance (ties by index).  Returns the chosen
/// indices with their rank and crowding as computed on the pool.
struct Selection {
  std::vector<std::size_t> chosen;
  std::vector<Ranked> ranked;
};
Selection environmental_select(std::span<const Objectives> pool, std::size_t keep);

/// Moves a point into the area: clamp to the bounding box, resample
/// uniformly within the box up to 100 times, else bisect toward the
/// area's interior point.
GeoPoint repair(const GeoPoint& p, const TargetArea& area, Rng& rng);

/// Per coordinate: bounded SBX with probability p_c, then polynomial
/// mutation with probability p_m, then repair of every point.
std::pair<Genome, Genome> crossover_mutate(const Genome& a, const Genome& b, const GAConfig& cfg,
                                           double p_m, const TargetArea& area, Rng& rng);

struct CorrelationMatrix {
  std::vector<std::vector<double>> r;
  std::vector<bool> zero_variance;  // per objective
};

/// Pearson r; nullopt when either side has zero variance.
std::optional<double> pearson(std::span<const double> x, std::span<const double> y);

/// Pairwise Pearson over solutions (rows) x objectives (columns).
/// Zero-variance objectives get r = 0 off the diagonal and are flagged.
/// Throws Error(invalid_argument) for fewer than two solutions.
CorrelationMatrix objective_correlations(std::span<const Objectives> objs);

struct Problem {
  const CriteriaContext* context = nullptr;
  std::vector<Criterion> criteria;
  int k_new = 1;
};

struct Solution {
  Genome genome;
  Objectives objectives;
  Objectives normalized;  // 1 = best among returned solutions
  int rank = 0;
  double crowding = 0.0;
};

struct ParetoResult {
  std::vector<Criterion> criteria;
  std::vector<Solution> solutions;
  std::optional<CorrelationMatrix> correlation;  // absent with < 2 solutions
  std::vector<Objectives> initial_objectives;
  GAConfig config;
  int k_new = 1;
};

/// Called after each generation with (done, total).  Returning false
/// cancels the run with Error("cancelled").
using ProgressFn = std::function<bool(int, int)>;

ParetoResult run(const Problem& problem, const GAConfig& cfg, const ProgressFn& progress = {});

Json to_json(const ParetoResult& r);

}  // namespace stationplan
