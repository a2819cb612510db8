#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

#include "spinweave/spectral.hpp"

namespace spinweave {

// A_{mn}(t) = sum_k <m|k><k|n> exp(-i E_k t). Sites are 1-based.
inline std::complex<double> transfer_amplitude(
    const SpectralDecomposition& decomp, int m, int n, double t) {
  int size = decomp.size();
  if (m < 1 || m > size || n < 1 || n > size) {
    throw std::out_of_range("site index out of range: m=" + std::to_string(m) +
                            " n=" + std::to_string(n) + " N=" +
                            std::to_string(size));
  }
  if (!std::isfinite(t)) throw std::invalid_argument("time must be finite");
  double re = 0.0;
  double im = 0.0;
  const double* vm = decomp.vectors.data() + static_cast<std::size_t>(m - 1) * size;
  const double* vn = decomp.vectors.data() + static_cast<std::size_t>(n - 1) * size;
  for (int k = 0; k < size; ++k) {
    double w = vm[k] * vn[k];
    double phase = -decomp.eigenvalues[k] * t;
    re += w * std::cos(phase);
    im += w * std::sin(phase);
  }
  return {re, im};
}

// P(t) = |A_{1N}(t)|^2, clamped into [0,1] against roundoff.
inline double transferred_population(const SpectralDecomposition& decomp,
                                     double t) {
  std::complex<double> a = transfer_amplitude(decomp, 1, decomp.size(), t);
  return std::clamp(std::norm(a), 0.0, 1.0);
}

// Fidelity averaged over the Bloch sphere of input states:
// F = sqrt(P)/3 + P/6 + 1/2.
inline double averaged_fidelity(double p) {
  if (!(p >= 0.0 && p <= 1.0)) {
    throw std::domain_error("population must lie in [0,1], got " +
                            std::to_string(p));
  }
  return std::sqrt(p) / 3.0 + p / 6.0 + 0.5;
}

// All site-to-site populations at once: entry (m,n), stored row-major at
// [(m-1)*N + (n-1)], is |A_{mn}(t)|^2. Rows are probability vectors.
inline std::vector<double> site_population_matrix(
    const SpectralDecomposition& decomp, double t) {
  if (!std::isfinite(t)) throw std::invalid_argument("time must be finite");
  int n = decomp.size();
  std::vector<double> cosp(n);
  std::vector<double> sinp(n);
  for (int k = 0; k < n; ++k) {
    double phase = -decomp.eigenvalues[k] * t;
    cosp[k] = std::cos(phase);
    sinp[k] = std::sin(phase);
  }
  std::vector<double> out(static_cast<std::size_t>(n) * n);
  for (int m = 0; m < n; ++m) {
    const double* vm = decomp.vectors.data() + static_cast<std::size_t>(m) * n;
    for (int j = 0; j < n; ++j) {
      const double* vj = decomp.vectors.data() + static_cast<std::size_t>(j) * n;
      double re = 0.0;
      double im = 0.0;
      for (int k = 0; k < n; ++k) {
        double w = vm[k] * vj[k];
        re += w * cosp[k];
        im += w * sinp[k];
      }
      out[static_cast<std::size_t>(m) * n + j] = re * re + im * im;
    }
  }
  return out;
}

// 1 / sum p_m^2 for a normalized probability vector. 1 for a point mass,
// N for the uniform distribution.
inline double inverse_participation_ratio(const std::vector<double>& p) {
  if (p.empty()) throw std::domain_error("empty probability vector");
  double total = 0.0;
  for (double v : p) {
    if (!(v >= 0.0)) {
      throw std::domain_error("probabilities must be nonnegative");
    }
    total += v;
  }
  if (std::abs(total - 1.0) > 1e-8) {
    throw std::domain_error("probability vector sums to " +
                            std::to_string(total) + ", expected 1");
  }
  double sq = 0.0;
  for (double v : p) sq += v * v;
  return 1.0 / sq;
}

// Population reachable from an almost-pure input state with impurity eta.
inline double almost_pure_bound(double p, double eta) {
  if (!(p >= 0.0 && p <= 1.0)) {
    throw std::domain_error("population must lie in [0,1]");
  }
  if (!(eta >= 0.0 && eta <= 1.0)) {
    throw std::domain_error("impurity must lie in [0,1]");
  }
  return p * (1.0 - eta);
}

}  // namespace spinweave
