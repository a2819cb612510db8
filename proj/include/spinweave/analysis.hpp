#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "spinweave/chain.hpp"
#include "spinweave/optimize.hpp"
#include "spinweave/parallel.hpp"
#include "spinweave/spectral.hpp"
#include "spinweave/transfer.hpp"

namespace spinweave {

// Smallest sweep cube whose optimum reaches the target population.
struct JminPoint {
  int n_sites;
  double arrival_time;
  double j_min;
  double achieved_population;
};

// Outcome of a j_min search. `found` is empty when no cube up to j_end
// reached the target; `best` is the strongest record either way.
struct JminSearch {
  std::optional<JminPoint> found;
  SweepRecord best;
};

// Parameters of j_min(T) ~ A + B exp(-C T/N).
struct ExponentialFit {
  double a_coef;
  double b_coef;
  double c_coef;
  double rms_residual;

  double evaluate(double arrival_time, int n_sites) const {
    return a_coef + b_coef * std::exp(-c_coef * arrival_time / n_sites);
  }
};

// Transfer peaks on the scaled time axis t/(kappa N).
struct PeakSet {
  std::vector<double> scaled_times;
  std::vector<double> heights;
};

// Golden-section search for the maximum of a unimodal function on [a, b].
// Returns (argmax, max) once the bracket shrinks below tol.
inline std::pair<double, double> golden_section_maximize(
    const std::function<double(double)>& fn, double a, double b, double tol) {
  if (!(b > a)) throw std::invalid_argument("need a < b");
  if (!(tol > 0.0)) throw std::invalid_argument("tolerance must be positive");
  const double invphi = (std::sqrt(5.0) - 1.0) / 2.0;
  double c = b - invphi * (b - a);
  double d = a + invphi * (b - a);
  double fc = fn(c);
  double fd = fn(d);
  while (b - a > tol) {
    if (fc > fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - invphi * (b - a);
      fc = fn(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + invphi * (b - a);
      fd = fn(d);
    }
  }
  double x = 0.5 * (a + b);
  return {x, fn(x)};
}

// Sweep the cube succession (step 0.5) until the target population is
// reached; j_min is the first crossing cube's side. The search grid
// starts at j_start, so j_min has resolution 0.5.
inline JminSearch find_jmin(const ChainParameters& params, double arrival_time,
                            double target, double j_start, double j_end,
                            const OptimizerConfig& config,
                            bool centro_symmetric = true) {
  if (!(target >= 0.0 && target < 1.0)) {
    throw std::invalid_argument("target must lie in [0, 1)");
  }
  std::vector<SweepRecord> records =
      hypercube_sweep(params, arrival_time, j_start, j_end, 0.5, config,
                      centro_symmetric, target);
  if (records.empty()) throw std::invalid_argument("empty sweep range");

  std::size_t best = 0;
  for (std::size_t i = 1; i < records.size(); ++i) {
    if (records[i].population > records[best].population) best = i;
  }
  JminSearch out{std::nullopt, records[best]};
  const SweepRecord& last = records.back();
  if (last.population >= target) {
    out.found = JminPoint{params.n_sites, arrival_time, last.j_max,
                          last.population};
  }
  return out;
}

namespace detail {

// Gaussian elimination with partial pivoting for tiny systems.
inline bool solve_linear(std::vector<std::vector<double>>& a,
                         std::vector<double>& b) {
  int n = static_cast<int>(b.size());
  for (int col = 0; col < n; ++col) {
    int pivot = col;
    for (int row = col + 1; row < n; ++row) {
      if (std::abs(a[row][col]) > std::abs(a[pivot][col])) pivot = row;
    }
    if (std::abs(a[pivot][col]) < 1e-300) return false;
    std::swap(a[col], a[pivot]);
    std::swap(b[col], b[pivot]);
    for (int row = col + 1; row < n; ++row) {
      double f = a[row][col] / a[col][col];
      for (int k = col; k < n; ++k) a[row][k] -= f * a[col][k];
      b[row] -= f * b[col];
    }
  }
  for (int row = n - 1; row >= 0; --row) {
    for (int k = row + 1; k < n; ++k) b[row] -= a[row][k] * b[k];
    b[row] /= a[row][row];
  }
  return true;
}

}  // namespace detail

// Damped least-squares fit of (T_i, j_i) to A + B exp(-C T/N).
// Initialization is deterministic (A = min j, B = max - min, C = 1) and
// the points are canonically ordered first, so any permutation of the
// input yields the identical fit.
inline ExponentialFit fit_exponential(
    std::vector<std::pair<double, double>> points, int n_sites) {
  if (points.size() < 3) {
    throw std::invalid_argument("fit needs at least 3 points, got " +
                                std::to_string(points.size()));
  }
  if (n_sites < 1) throw std::invalid_argument("n_sites must be positive");
  for (const auto& [t, y] : points) {
    if (!std::isfinite(t) || !std::isfinite(y)) {
      throw std::invalid_argument("fit points must be finite");
    }
  }
  std::sort(points.begin(), points.end());
  bool all_equal_t = true;
  for (const auto& [t, y] : points) {
    if (t != points.front().first) all_equal_t = false;
  }
  if (all_equal_t) {
    throw std::invalid_argument("all points share one arrival time");
  }

  const std::size_t n = points.size();
  std::vector<double> u(n);
  std::vector<double> y(n);
  for (std::size_t i = 0; i < n; ++i) {
    u[i] = points[i].first / n_sites;
    y[i] = points[i].second;
  }

  double lo = y[0];
  double hi = y[0];
  for (double v : y) {
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  double pa = lo;
  double pb = hi - lo;
  double pc = 1.0;

  auto ssr = [&](double a, double b, double c) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      double r = y[i] - (a + b * std::exp(-c * u[i]));
      s += r * r;
    }
    return s;
  };

  double lambda = 1e-3;
  double current = ssr(pa, pb, pc);
  for (int iter = 0; iter < 1000; ++iter) {
    // Normal equations J^T J and J^T r with J = d(model)/d(A,B,C).
    double jtj[3][3] = {{0, 0, 0}, {0, 0, 0}, {0, 0, 0}};
    double jtr[3] = {0, 0, 0};
    for (std::size_t i = 0; i < n; ++i) {
      double e = std::exp(-pc * u[i]);
      double j0 = 1.0;
      double j1 = e;
      double j2 = -pb * u[i] * e;
      double r = y[i] - (pa + pb * e);
      double j[3] = {j0, j1, j2};
      for (int row = 0; row < 3; ++row) {
        for (int col = 0; col < 3; ++col) jtj[row][col] += j[row] * j[col];
        jtr[row] += j[row] * r;
      }
    }

    double step_norm = 0.0;
    bool moved = false;
    while (lambda < 1e12) {
      std::vector<std::vector<double>> a(3, std::vector<double>(3));
      std::vector<double> rhs(jtr, jtr + 3);
      for (int row = 0; row < 3; ++row) {
        for (int col = 0; col < 3; ++col) a[row][col] = jtj[row][col];
        a[row][row] += lambda * jtj[row][row];
      }
      if (!detail::solve_linear(a, rhs)) {
        lambda *= 10.0;
        continue;
      }
      double trial = ssr(pa + rhs[0], pb + rhs[1], pc + rhs[2]);
      if (trial < current) {
        pa += rhs[0];
        pb += rhs[1];
        pc += rhs[2];
        current = trial;
        lambda = std::max(lambda / 10.0, 1e-12);
        step_norm = std::sqrt(rhs[0] * rhs[0] + rhs[1] * rhs[1] +
                              rhs[2] * rhs[2]);
        moved = true;
        break;
      }
      lambda *= 10.0;
    }
    if (!moved || step_norm < 1e-10) break;
  }

  return ExponentialFit{pa, pb, pc, std::sqrt(current / n)};
}

// Locate transfer peaks of an ECD on the scaled time axis. Samples P(t)
// for t in (0, 2*max_peaks*kappa*N], keeps grid maxima above 0.5 and
// sharpens each bracket by golden section to 1e-6 in t.
inline PeakSet scaled_peaks(const ChainParameters& params,
                            const CouplingDistribution& ecd, double kappa,
                            int max_peaks, double grid_step, int threads = 1) {
  if (!(grid_step > 0.0)) {
    throw std::invalid_argument("grid step must be positive");
  }
  if (!(kappa > 0.0)) throw std::invalid_argument("kappa must be positive");
  if (max_peaks < 0) throw std::invalid_argument("max_peaks must be >= 0");

  PeakSet peaks;
  if (max_peaks == 0) return peaks;

  const double scale = kappa * params.n_sites;
  const double t_max = 2.0 * max_peaks * scale;
  const auto decomp = decompose(params, ecd);
  auto population = [&](double t) {
    return transferred_population(decomp, t);
  };

  const std::size_t count = static_cast<std::size_t>(t_max / grid_step);
  if (count < 3) return peaks;
  std::vector<double> sampled(count);
  parallel_for(count, resolve_threads(threads), [&](std::size_t i) {
    sampled[i] = population((i + 1) * grid_step);
  });

  for (std::size_t i = 1; i + 1 < count; ++i) {
    if (static_cast<int>(peaks.heights.size()) >= max_peaks) break;
    if (sampled[i] <= 0.5) continue;
    if (!(sampled[i] > sampled[i - 1] && sampled[i] > sampled[i + 1])) continue;
    auto [t_star, height] =
        golden_section_maximize(population, i * grid_step,
                                (i + 2) * grid_step, 1e-6);
    peaks.scaled_times.push_back(t_star / scale);
    peaks.heights.push_back(height);
  }
  return peaks;
}

// Symmetric order-1/2 Renyi divergence -2 ln sum sqrt(p q). Identical
// vectors give exactly zero, disjoint supports give +infinity.
inline double renyi_half_divergence(const std::vector<double>& p,
                                    const std::vector<double>& q) {
  if (p.size() != q.size()) {
    throw std::invalid_argument("probability vectors differ in length");
  }
  if (p.empty()) throw std::invalid_argument("empty probability vector");
  auto check = [](const std::vector<double>& v) {
    double total = 0.0;
    for (double x : v) {
      if (!(x >= 0.0)) {
        throw std::domain_error("probabilities must be nonnegative");
      }
      total += x;
    }
    if (std::abs(total - 1.0) > 1e-8) {
      throw std::domain_error("probability vector sums to " +
                              std::to_string(total) + ", expected 1");
    }
  };
  check(p);
  check(q);
  if (p == q) return 0.0;
  double bc = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) bc += std::sqrt(p[i] * q[i]);
  if (bc <= 0.0) return std::numeric_limits<double>::infinity();
  return std::max(0.0, -2.0 * std::log(bc));
}

}  // namespace spinweave
