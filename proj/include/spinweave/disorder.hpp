#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "spinweave/chain.hpp"
#include "spinweave/optimize.hpp"
#include "spinweave/parallel.hpp"
#include "spinweave/rng.hpp"
#include "spinweave/spectral.hpp"
#include "spinweave/transfer.hpp"

namespace spinweave {

// Both laws have zero mean and unit variance; uniform support is
// [-sqrt(3), sqrt(3)], so couplings stay positive for a < 1/sqrt(3).
enum class NoiseLaw { uniform_unit_variance, gaussian_unit_variance };

inline const char* noise_law_name(NoiseLaw law) {
  return law == NoiseLaw::uniform_unit_variance ? "uniform" : "gaussian";
}

// Static disorder model J_i -> J_i(1 + a xi_i^j) with i.i.d. xi.
struct DisorderSpec {
  double amplitude = 0.0;
  int realizations = 1;
  std::uint64_t rng_seed = 0;
  NoiseLaw noise_law = NoiseLaw::uniform_unit_variance;
};

struct DisorderStatistics {
  double mean;
  double minimum;
  double std_dev;
  int realizations_used;
};

namespace detail {

inline void validate_spec(const DisorderSpec& spec) {
  if (!(spec.amplitude >= 0.0) || !std::isfinite(spec.amplitude)) {
    throw std::invalid_argument("disorder amplitude must be finite and >= 0");
  }
  if (spec.realizations < 1) {
    throw std::invalid_argument("need at least one realization");
  }
}

inline double draw_noise(SplitMix64& rng, NoiseLaw law) {
  return law == NoiseLaw::uniform_unit_variance
             ? rng.next_symmetric_unit_variance()
             : rng.next_gaussian();
}

}  // namespace detail

// One disorder realization. Every coupling draws its own xi from the
// stream keyed by (seed, realization, coupling), so realizations can be
// evaluated in any order or in parallel without changing the data. The
// perturbed distribution is generally not centro-symmetric.
inline CouplingDistribution perturb(const CouplingDistribution& ecd,
                                    const DisorderSpec& spec,
                                    int realization_index) {
  detail::validate_spec(spec);
  if (realization_index < 1 || realization_index > spec.realizations) {
    throw std::out_of_range("realization index " +
                            std::to_string(realization_index) +
                            " outside [1, " +
                            std::to_string(spec.realizations) + "]");
  }
  if (spec.amplitude == 0.0) return ecd;

  std::uint64_t realization_key =
      derive_stream(spec.rng_seed, static_cast<std::uint64_t>(realization_index));
  std::vector<double> j = ecd.couplings();
  for (std::size_t i = 0; i < j.size(); ++i) {
    SplitMix64 rng{derive_stream(realization_key, i + 1)};
    j[i] *= 1.0 + spec.amplitude * detail::draw_noise(rng, spec.noise_law);
  }
  return CouplingDistribution{std::move(j)};
}

// Mean, worst case and population standard deviation of P(arrival_time)
// over the disorder ensemble. Bit-identical for fixed inputs regardless
// of thread count.
inline DisorderStatistics disorder_statistics(const ChainParameters& params,
                                              const CouplingDistribution& ecd,
                                              double arrival_time,
                                              const DisorderSpec& spec,
                                              int threads = 1) {
  detail::validate_spec(spec);
  if (spec.amplitude == 0.0) {
    double p = transferred_population(decompose(params, ecd), arrival_time);
    return DisorderStatistics{p, p, 0.0, spec.realizations};
  }

  std::vector<double> samples(spec.realizations);
  parallel_for(spec.realizations, resolve_threads(threads), [&](std::size_t j) {
    CouplingDistribution noisy = perturb(ecd, spec, static_cast<int>(j) + 1);
    samples[j] = transferred_population(decompose(params, noisy), arrival_time);
  });

  double lo = samples[0];
  double hi = samples[0];
  for (double s : samples) {
    lo = std::min(lo, s);
    hi = std::max(hi, s);
  }
  double mean = std::clamp(compensated_sum(samples) / spec.realizations, lo, hi);

  std::vector<double> sq(samples.size());
  for (std::size_t j = 0; j < samples.size(); ++j) {
    double d = samples[j] - mean;
    sq[j] = d * d;
  }
  double variance = std::max(0.0, compensated_sum(sq) / spec.realizations);
  return DisorderStatistics{mean, lo, std::sqrt(variance), spec.realizations};
}

struct DisorderGridCell {
  double j_max;
  double amplitude;
  DisorderStatistics stats;
};

// Robustness color-map data: one cell per (sweep record, amplitude) pair,
// row-major with amplitudes varying fastest. Each cell owns an
// independent derived seed so the grid is reproducible cell by cell.
inline std::vector<DisorderGridCell> disorder_grid(
    const ChainParameters& params, const std::vector<SweepRecord>& sweep,
    double arrival_time, const std::vector<double>& amplitudes, int n_r,
    std::uint64_t seed, NoiseLaw law = NoiseLaw::uniform_unit_variance,
    int threads = 1) {
  if (sweep.empty()) throw std::invalid_argument("sweep is empty");
  if (amplitudes.empty()) throw std::invalid_argument("no amplitudes given");
  if (n_r < 1) throw std::invalid_argument("need at least one realization");

  std::vector<DisorderGridCell> grid;
  grid.reserve(sweep.size() * amplitudes.size());
  for (std::size_t row = 0; row < sweep.size(); ++row) {
    std::uint64_t row_key = derive_stream(seed, row + 1);
    for (std::size_t col = 0; col < amplitudes.size(); ++col) {
      DisorderSpec spec;
      spec.amplitude = amplitudes[col];
      spec.realizations = n_r;
      spec.rng_seed = derive_stream(row_key, col + 1);
      spec.noise_law = law;
      grid.push_back(DisorderGridCell{
          sweep[row].j_max, amplitudes[col],
          disorder_statistics(params, sweep[row].ecd, arrival_time, spec,
                              threads)});
    }
  }
  return grid;
}

}  // namespace spinweave
