#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "spinweave/chain.hpp"

namespace spinweave {

// Raised when the QL iteration fails to isolate an eigenvalue within the
// iteration budget. Carries the index it was working on.
class ConvergenceError : public std::runtime_error {
 public:
  ConvergenceError(int index, int iterations)
      : std::runtime_error("eigenvalue " + std::to_string(index) +
                           " failed to converge after " +
                           std::to_string(iterations) + " QL iterations"),
        index_(index) {}

  int index() const { return index_; }

 private:
  int index_;
};

// Eigenvalues in ascending order and orthonormal eigenvectors stored
// row-major: vectors[site * size + k] is the component at `site`
// (0-based) of eigenvector k. Each vector's first nonzero component is
// nonnegative so the decomposition is unique.
struct SpectralDecomposition {
  std::vector<double> eigenvalues;
  std::vector<double> vectors;

  int size() const { return static_cast<int>(eigenvalues.size()); }

  double component(int site, int k) const { return vectors[site * size() + k]; }
};

namespace detail {

// QL with implicit shifts on a symmetric tridiagonal matrix, rotations
// accumulated into z (flat row-major, n x n, starts as identity).
inline void ql_implicit(std::vector<double>& d, std::vector<double>& e,
                        std::vector<double>& z, int n) {
  constexpr int kMaxIterations = 50;
  const double eps = std::numeric_limits<double>::epsilon();
  if (n <= 1) return;
  e.push_back(0.0);

  for (int l = 0; l < n; ++l) {
    int iter = 0;
    int m;
    do {
      for (m = l; m < n - 1; ++m) {
        double dd = std::abs(d[m]) + std::abs(d[m + 1]);
        if (std::abs(e[m]) <= eps * dd) break;
      }
      if (m != l) {
        if (iter++ == kMaxIterations) throw ConvergenceError(l, kMaxIterations);
        double g = (d[l + 1] - d[l]) / (2.0 * e[l]);
        double r = std::hypot(g, 1.0);
        g = d[m] - d[l] + e[l] / (g + std::copysign(r, g));
        double s = 1.0;
        double c = 1.0;
        double p = 0.0;
        int i = m - 1;
        for (; i >= l; --i) {
          double f = s * e[i];
          double b = c * e[i];
          r = std::hypot(f, g);
          e[i + 1] = r;
          if (r == 0.0) {
            d[i + 1] -= p;
            e[m] = 0.0;
            break;
          }
          s = f / r;
          c = g / r;
          g = d[i + 1] - p;
          r = (d[i] - g) * s + 2.0 * c * b;
          p = s * r;
          d[i + 1] = g + p;
          g = c * r - b;
          for (int k = 0; k < n; ++k) {
            f = z[k * n + i + 1];
            z[k * n + i + 1] = s * z[k * n + i] + c * f;
            z[k * n + i] = c * z[k * n + i] - s * f;
          }
        }
        if (r == 0.0 && i >= l) continue;
        d[l] -= p;
        e[l] = g;
        e[m] = 0.0;
      }
    } while (m != l);
  }
  e.pop_back();
}

}  // namespace detail

// Full spectral decomposition of a symmetric tridiagonal Hamiltonian.
inline SpectralDecomposition decompose(const SingleExcitationHamiltonian& h) {
  int n = h.size();
  if (n < 1) throw std::invalid_argument("cannot decompose an empty matrix");
  if (static_cast<int>(h.off_diagonal.size()) != n - 1) {
    throw std::invalid_argument(
        "off-diagonal length mismatch: expected " + std::to_string(n - 1) +
        ", got " + std::to_string(h.off_diagonal.size()));
  }

  std::vector<double> d = h.diagonal;
  std::vector<double> e = h.off_diagonal;
  std::vector<double> z(static_cast<std::size_t>(n) * n, 0.0);
  for (int i = 0; i < n; ++i) z[i * n + i] = 1.0;

  detail::ql_implicit(d, e, z, n);

  // Ascending eigenvalue order, index as tiebreak so the layout is a pure
  // function of the matrix.
  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](int a, int b) {
    if (d[a] != d[b]) return d[a] < d[b];
    return a < b;
  });

  SpectralDecomposition out;
  out.eigenvalues.resize(n);
  out.vectors.resize(static_cast<std::size_t>(n) * n);
  for (int k = 0; k < n; ++k) {
    int src = order[k];
    out.eigenvalues[k] = d[src];
    double sign = 1.0;
    for (int site = 0; site < n; ++site) {
      double v = z[site * n + src];
      if (v != 0.0) {
        sign = v > 0.0 ? 1.0 : -1.0;
        break;
      }
    }
    for (int site = 0; site < n; ++site) {
      out.vectors[site * n + k] = sign * z[site * n + src];
    }
  }
  return out;
}

inline SpectralDecomposition decompose(const ChainParameters& params,
                                       const CouplingDistribution& ecd) {
  return decompose(project_hamiltonian(params, ecd));
}

}  // namespace spinweave
