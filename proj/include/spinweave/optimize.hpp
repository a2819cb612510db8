#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <numeric>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "spinweave/chain.hpp"
#include "spinweave/parallel.hpp"
#include "spinweave/rng.hpp"
#include "spinweave/spectral.hpp"
#include "spinweave/transfer.hpp"

namespace spinweave {

// Search domain [0, side_length]^dimension for the free couplings.
struct Hypercube {
  double side_length;
  int dimension;

  Hypercube(double side, int dim) : side_length(side), dimension(dim) {
    if (!(side > 0.0) || !std::isfinite(side)) {
      throw std::invalid_argument("hypercube side must be positive");
    }
    if (dim < 1) throw std::invalid_argument("hypercube dimension must be >= 1");
  }
};

struct OptimizerConfig {
  int population_size = 0;  // 0 picks max(20, 2*dimension)
  int max_generations = 5000;
  double relocation_scale = 0.3;
  double anneal_factor = 0.97;
  int stall_generations = 200;
  double gradient_tolerance = 1e-10;
  std::uint64_t rng_seed = 0;
  int threads = 1;
};

struct Optimum {
  std::vector<double> point;
  double value;
};

// One step of the growing-hypercube succession: cube index, its side, the
// best distribution found inside it and that distribution's population at
// the arrival time.
struct SweepRecord {
  int k;
  double j_max;
  CouplingDistribution ecd;
  double population;
};

namespace detail {

inline void validate_config(const OptimizerConfig& cfg) {
  if (cfg.population_size < 0) {
    throw std::invalid_argument("population_size must be >= 0 (0 = auto)");
  }
  if (cfg.max_generations < 1) {
    throw std::invalid_argument("max_generations must be positive");
  }
  if (!(cfg.relocation_scale > 0.0 && cfg.relocation_scale <= 1.0)) {
    throw std::invalid_argument("relocation_scale must lie in (0,1]");
  }
  if (!(cfg.anneal_factor > 0.0 && cfg.anneal_factor < 1.0)) {
    throw std::invalid_argument("anneal_factor must lie in (0,1)");
  }
  if (cfg.stall_generations < 1) {
    throw std::invalid_argument("stall_generations must be positive");
  }
  if (!(cfg.gradient_tolerance > 0.0)) {
    throw std::invalid_argument("gradient_tolerance must be positive");
  }
  if (cfg.threads < 0) throw std::invalid_argument("threads must be >= 0");
}

// Triangle-wave fold of x into [0, side]: reflection off both faces.
inline double reflect_into(double x, double side) {
  if (x >= 0.0 && x <= side) return x;
  double period = 2.0 * side;
  double y = std::fmod(x, period);
  if (y < 0.0) y += period;
  return y <= side ? y : period - y;
}

}  // namespace detail

// Stochastic pivot search: keep a probe population, discard the worse half
// each generation and respawn the discards near surviving pivots with an
// annealed isotropic displacement. Maximizes `objective` over the cube.
// Fully deterministic for a fixed (inputs, seed), independent of threads.
inline Optimum pivot_optimize(
    const std::function<double(const std::vector<double>&)>& objective,
    const Hypercube& cube, const OptimizerConfig& config,
    const std::optional<std::vector<double>>& warm_start = {}) {
  detail::validate_config(config);
  const int dim = cube.dimension;
  const double side = cube.side_length;
  if (warm_start) {
    if (static_cast<int>(warm_start->size()) != dim) {
      throw std::invalid_argument("warm start dimension mismatch");
    }
    for (double x : *warm_start) {
      if (!(x >= 0.0 && x <= side)) {
        throw std::invalid_argument("warm start lies outside the hypercube");
      }
    }
  }

  const int pop = config.population_size > 0 ? config.population_size
                                             : std::max(20, 2 * dim);
  const int threads = resolve_threads(config.threads);

  std::vector<std::vector<double>> points(pop);
  std::vector<double> values(pop);

  for (int p = 0; p < pop; ++p) {
    if (p == 0 && warm_start) {
      points[p] = *warm_start;
      continue;
    }
    SplitMix64 rng{derive_stream(derive_stream(config.rng_seed, 0), p)};
    points[p].resize(dim);
    for (int i = 0; i < dim; ++i) points[p][i] = rng.next_unit() * side;
  }
  parallel_for(pop, threads,
               [&](std::size_t p) { values[p] = objective(points[p]); });

  int best_index = 0;
  for (int p = 1; p < pop; ++p) {
    if (values[p] > values[best_index]) best_index = p;
  }
  Optimum best{points[best_index], values[best_index]};

  constexpr double kImprovement = 1e-8;
  int stall = 0;
  const int n_discard = pop / 2;
  const int n_survive = pop - n_discard;

  std::vector<int> rank(pop);
  for (int gen = 1; gen <= config.max_generations && n_discard > 0; ++gen) {
    std::iota(rank.begin(), rank.end(), 0);
    std::sort(rank.begin(), rank.end(), [&](int a, int b) {
      if (values[a] != values[b]) return values[a] > values[b];
      return a < b;
    });

    double radius = config.relocation_scale * side *
                    std::pow(config.anneal_factor, gen - 1);
    std::uint64_t gen_key = derive_stream(config.rng_seed, gen);

    std::vector<int> respawned(rank.begin() + n_survive, rank.end());
    for (int slot : respawned) {
      SplitMix64 rng{derive_stream(gen_key, slot)};
      int pivot = rank[std::min<int>(
          n_survive - 1, static_cast<int>(rng.next_unit() * n_survive))];
      std::vector<double> dir(dim);
      double norm2 = 0.0;
      for (int i = 0; i < dim; ++i) {
        dir[i] = rng.next_gaussian();
        norm2 += dir[i] * dir[i];
      }
      double norm = std::sqrt(norm2);
      double len =
          radius * std::pow(rng.next_unit(), 1.0 / dim) / (norm > 0.0 ? norm : 1.0);
      if (norm == 0.0) len = 0.0;
      for (int i = 0; i < dim; ++i) {
        points[slot][i] =
            detail::reflect_into(points[pivot][i] + len * dir[i], side);
      }
    }
    parallel_for(respawned.size(), threads, [&](std::size_t idx) {
      int slot = respawned[idx];
      values[slot] = objective(points[slot]);
    });

    double prev_best = best.value;
    for (int slot : respawned) {
      if (values[slot] > best.value) {
        best.value = values[slot];
        best.point = points[slot];
      }
    }
    if (best.value - prev_best >= kImprovement) {
      stall = 0;
    } else if (++stall >= config.stall_generations) {
      break;
    }
  }
  return best;
}

// Deterministic ascent polish: projected finite-difference gradient with
// backtracking line search, confined to the cube. Never returns a point
// worse than the input.
inline Optimum gradient_refine(
    const std::function<double(const std::vector<double>&)>& objective,
    const std::vector<double>& point, const Hypercube& cube,
    double tolerance = 1e-10) {
  const int dim = cube.dimension;
  const double side = cube.side_length;
  if (static_cast<int>(point.size()) != dim) {
    throw std::invalid_argument("point dimension mismatch");
  }
  for (double x : point) {
    if (!(x >= 0.0 && x <= side)) {
      throw std::invalid_argument("point lies outside the hypercube");
    }
  }

  const double h = 1e-6 * std::max(1.0, side);
  constexpr int kMaxIterations = 500;
  constexpr double kArmijo = 1e-4;
  constexpr double kMinStep = 1e-14;

  std::vector<double> x = point;
  double fx = objective(x);
  Optimum best{x, fx};

  std::vector<double> grad(dim);
  std::vector<double> trial(dim);
  double step = 1.0;
  for (int iter = 0; iter < kMaxIterations; ++iter) {
    double grad_norm2 = 0.0;
    for (int i = 0; i < dim; ++i) {
      double xp = std::min(x[i] + h, side);
      double xm = std::max(x[i] - h, 0.0);
      if (xp == xm) {
        grad[i] = 0.0;
        continue;
      }
      double keep = x[i];
      x[i] = xp;
      double fp = objective(x);
      x[i] = xm;
      double fm = objective(x);
      x[i] = keep;
      grad[i] = (fp - fm) / (xp - xm);
      if ((x[i] <= 0.0 && grad[i] < 0.0) || (x[i] >= side && grad[i] > 0.0)) {
        grad[i] = 0.0;
      }
      grad_norm2 += grad[i] * grad[i];
    }
    if (std::sqrt(grad_norm2) <= tolerance) break;

    // The accepted step carries over (doubled) to the next iteration, so
    // the search adapts to the local scale instead of re-bracketing from
    // scratch each time.
    bool advanced = false;
    while (step >= kMinStep) {
      for (int i = 0; i < dim; ++i) {
        trial[i] = std::clamp(x[i] + step * grad[i], 0.0, side);
      }
      double ft = objective(trial);
      if (ft >= fx + kArmijo * step * grad_norm2) {
        x = trial;
        fx = ft;
        advanced = true;
        step = std::min(step * 2.0, 1.0);
        break;
      }
      step *= 0.5;
    }
    if (!advanced) break;
    if (fx > best.value) {
      best.value = fx;
      best.point = x;
    }
  }
  return best;
}

// Growing-hypercube succession: optimize inside [0, j_max^(k)]^M for
// j_max^(k) = j_start + (k-1)*delta_j, warm-starting each cube with the
// previous optimum. The first warm start is the all-ones distribution
// clipped into the first cube. Stops early once `target` is reached, when
// given. Free couplings are the centro-symmetric half unless
// centro_symmetric is false.
inline std::vector<SweepRecord> hypercube_sweep(
    const ChainParameters& params, double arrival_time, double j_start,
    double j_end, double delta_j, const OptimizerConfig& config,
    bool centro_symmetric = true, std::optional<double> target = {}) {
  if (!(j_start > 0.0) || !(j_end >= j_start)) {
    throw std::invalid_argument("need 0 < j_start <= j_end");
  }
  if (!(delta_j > 0.0)) throw std::invalid_argument("delta_j must be positive");
  if (!std::isfinite(arrival_time)) {
    throw std::invalid_argument("arrival time must be finite");
  }
  detail::validate_config(config);

  const int dim = centro_symmetric ? params.free_coupling_count()
                                   : params.n_sites - 1;
  auto make_ecd = [&](const std::vector<double>& free_values) {
    return centro_symmetric
               ? CouplingDistribution::centro_symmetric(free_values,
                                                        params.n_sites)
               : CouplingDistribution{free_values};
  };
  auto objective = [&](const std::vector<double>& free_values) {
    return transferred_population(decompose(params, make_ecd(free_values)),
                                  arrival_time);
  };

  std::vector<SweepRecord> records;
  std::vector<double> warm(dim, 1.0);
  const double edge = j_end + 1e-12 * std::max(1.0, std::abs(j_end));
  for (int k = 1;; ++k) {
    double j_max = j_start + (k - 1) * delta_j;
    if (j_max > edge) break;
    Hypercube cube{j_max, dim};
    for (double& w : warm) w = std::clamp(w, 0.0, j_max);

    OptimizerConfig cube_config = config;
    cube_config.rng_seed = derive_stream(config.rng_seed, k);
    Optimum coarse = pivot_optimize(objective, cube, cube_config, warm);
    Optimum refined =
        gradient_refine(objective, coarse.point, cube, config.gradient_tolerance);
    if (coarse.value > refined.value) refined = coarse;

    records.push_back(
        SweepRecord{k, j_max, make_ecd(refined.point), refined.value});
    warm = refined.point;
    if (target && refined.value >= *target) break;
  }
  return records;
}

}  // namespace spinweave
