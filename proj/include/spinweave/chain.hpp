#pragma once

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace spinweave {

// Model convention used throughout: the chain Hamiltonian is
//
//   H = -1/2 sum_i J_i (sx_i sx_{i+1} + sy_i sy_{i+1} + delta sz_i sz_{i+1})
//
// with Pauli matrices s{x,y,z}, so the one-excitation block has hopping
// -J_i and on-site energies -(delta/2)(S - 2(J_{i-1} + J_i)) with
// S = sum J_i. Under this normalization the XX chain (delta = 0) with
// J_i = sqrt(i(N-i)) transfers an excitation end to end perfectly at
// t = pi/2.

// Chain length and XXZ anisotropy. delta = 1 is the isotropic Heisenberg
// chain, delta = 0 the XX chain.
struct ChainParameters {
  int n_sites;
  double anisotropy;

  ChainParameters(int n, double delta) : n_sites(n), anisotropy(delta) {
    if (n < 2) {
      throw std::invalid_argument("chain needs at least 2 sites, got " +
                                  std::to_string(n));
    }
    if (!std::isfinite(delta)) {
      throw std::invalid_argument("anisotropy must be finite");
    }
  }

  // Count of free couplings under centro-symmetry: ceil((N-1)/2).
  int free_coupling_count() const { return n_sites / 2; }
};

// An exchange coupling distribution: the N-1 nearest-neighbor strengths
// J_1..J_{N-1}. Centro-symmetric distributions (J_{N-i} = J_i) are built
// from their free half so the mirror identity holds exactly.
class CouplingDistribution {
 public:
  explicit CouplingDistribution(std::vector<double> couplings)
      : couplings_(std::move(couplings)), centro_symmetric_(false) {
    validate();
  }

  static CouplingDistribution centro_symmetric(std::vector<double> free_values,
                                               int n_sites) {
    if (n_sites < 2) {
      throw std::invalid_argument("chain needs at least 2 sites");
    }
    int m = n_sites / 2;
    if (static_cast<int>(free_values.size()) != m) {
      throw std::invalid_argument(
          "centro-symmetric chain with " + std::to_string(n_sites) +
          " sites needs " + std::to_string(m) + " free couplings, got " +
          std::to_string(free_values.size()));
    }
    std::vector<double> full(n_sites - 1);
    for (int i = 1; i <= n_sites - 1; ++i) {
      full[i - 1] = i <= m ? free_values[i - 1] : free_values[n_sites - i - 1];
    }
    CouplingDistribution ecd{std::move(full)};
    ecd.centro_symmetric_ = true;
    return ecd;
  }

  const std::vector<double>& couplings() const { return couplings_; }
  bool is_centro_symmetric() const { return centro_symmetric_; }
  int n_sites() const { return static_cast<int>(couplings_.size()) + 1; }

  // The independent couplings: the first ceil((N-1)/2) for a
  // centro-symmetric distribution, all N-1 otherwise.
  std::vector<double> free_couplings() const {
    if (!centro_symmetric_) return couplings_;
    int m = n_sites() / 2;
    return std::vector<double>(couplings_.begin(), couplings_.begin() + m);
  }

 private:
  void validate() const {
    if (couplings_.empty()) {
      throw std::invalid_argument("a chain needs at least one coupling");
    }
    for (double j : couplings_) {
      if (!std::isfinite(j)) {
        throw std::invalid_argument("couplings must be finite");
      }
    }
  }

  std::vector<double> couplings_;
  bool centro_symmetric_;
};

// Real symmetric tridiagonal matrix: the chain Hamiltonian restricted to
// the one-excitation sector.
struct SingleExcitationHamiltonian {
  std::vector<double> diagonal;      // N entries
  std::vector<double> off_diagonal;  // N-1 entries

  int size() const { return static_cast<int>(diagonal.size()); }
};

// Projects the XXZ chain onto the one-excitation basis. Boundary
// convention J_0 = J_N = 0 so one formula covers the edge sites; the
// constant -delta*S/2 shifts every diagonal entry equally and cancels in
// all |amplitudes|.
inline SingleExcitationHamiltonian project_hamiltonian(
    const ChainParameters& params, const CouplingDistribution& ecd) {
  const auto& j = ecd.couplings();
  int n = params.n_sites;
  if (static_cast<int>(j.size()) != n - 1) {
    throw std::invalid_argument(
        "coupling count mismatch: expected " + std::to_string(n - 1) +
        " couplings for " + std::to_string(n) + " sites, got " +
        std::to_string(j.size()));
  }
  double total = 0.0;
  for (double v : j) total += v;

  SingleExcitationHamiltonian h;
  h.diagonal.resize(n);
  h.off_diagonal.resize(n - 1);
  for (int site = 1; site <= n; ++site) {
    double left = site >= 2 ? j[site - 2] : 0.0;
    double right = site <= n - 1 ? j[site - 1] : 0.0;
    h.diagonal[site - 1] = -(params.anisotropy / 2.0) * (total - 2.0 * (left + right));
  }
  for (int i = 0; i < n - 1; ++i) h.off_diagonal[i] = -j[i];
  return h;
}

// The classic perfect-transfer profile J_i = sqrt(i(N-i)) for the XX chain.
inline CouplingDistribution perfect_transfer_xx_couplings(int n_sites) {
  if (n_sites < 2) throw std::invalid_argument("chain needs at least 2 sites");
  std::vector<double> j(n_sites - 1);
  for (int i = 1; i <= n_sites - 1; ++i) {
    j[i - 1] = std::sqrt(static_cast<double>(i) * (n_sites - i));
  }
  return CouplingDistribution{std::move(j)};
}

}  // namespace spinweave
