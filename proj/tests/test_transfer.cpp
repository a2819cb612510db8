#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <complex>
#include <string>
#include <vector>

#include "spinweave/chain.hpp"
#include "spinweave/io.hpp"
#include "spinweave/rng.hpp"
#include "spinweave/spectral.hpp"
#include "spinweave/transfer.hpp"
#include "support/brute_force.hpp"

using namespace spinweave;

namespace {

EcdFileData load_fixture(const std::string& name) {
  return read_ecd_file(std::string(TEST_DATA_DIR) + "/" + name);
}

}  // namespace

TEST_CASE("nothing moves at time zero") {
  ChainParameters params{6, 1.0};
  CouplingDistribution ecd{{1.0, 2.0, 0.5, 1.5, 0.8}};
  auto d = decompose(params, ecd);
  CHECK(std::norm(transfer_amplitude(d, 6, 6, 0.0)) ==
        Catch::Approx(1.0).margin(1e-12));
  CHECK(transferred_population(d, 0.0) == Catch::Approx(0.0).margin(1e-12));
}

TEST_CASE("two sites swap perfectly at the quarter period") {
  ChainParameters params{2, 0.7};
  CouplingDistribution ecd{{1.0}};
  auto d = decompose(params, ecd);
  double pi = std::acos(-1.0);
  CHECK(transferred_population(d, pi / 2.0) == Catch::Approx(1.0).margin(1e-12));
  CHECK(transferred_population(d, pi / 4.0) == Catch::Approx(0.5).margin(1e-12));
}

TEST_CASE("designed distributions reproduce their recorded populations") {
  for (const char* name :
       {"n50_kappa0.5.csv", "n50_kappa1.csv", "n50_kappa2.csv", "n50_kappa3.csv",
        "n50_kappa4.csv", "n50_kappa5.csv"}) {
    auto data = load_fixture(name);
    ChainParameters params{data.n_sites, data.delta};
    auto d = decompose(params, data.ecd);
    double p = transferred_population(d, data.arrival_time);
    CAPTURE(name);
    CHECK(p == Catch::Approx(data.population).margin(5e-4));
  }
}

TEST_CASE("averaged fidelity has the right anchor points") {
  CHECK(averaged_fidelity(1.0) == Catch::Approx(1.0).margin(1e-15));
  CHECK(averaged_fidelity(0.0) == Catch::Approx(0.5).margin(1e-15));
  CHECK(averaged_fidelity(0.9550) ==
        Catch::Approx(0.9849136714282011).margin(1e-12));
  CHECK_THROWS_AS(averaged_fidelity(-0.01), std::domain_error);
  CHECK_THROWS_AS(averaged_fidelity(1.01), std::domain_error);
}

TEST_CASE("population matrix rows are normalized and start at identity") {
  ChainParameters params{8, 1.2};
  CouplingDistribution ecd{{0.9, 1.4, 0.7, 2.0, 1.1, 0.6, 1.3}};
  auto d = decompose(params, ecd);
  auto at_zero = site_population_matrix(d, 0.0);
  int n = 8;
  for (int m = 0; m < n; ++m) {
    for (int j = 0; j < n; ++j) {
      double expected = (m == j) ? 1.0 : 0.0;
      REQUIRE(std::abs(at_zero[m * n + j] - expected) < 1e-12);
    }
  }
  auto later = site_population_matrix(d, 3.7);
  for (int m = 0; m < n; ++m) {
    double row = 0.0;
    for (int j = 0; j < n; ++j) row += later[m * n + j];
    REQUIRE(std::abs(row - 1.0) < 1e-10);
  }
  CHECK(later[(n - 1) * n + 0] ==
        Catch::Approx(transferred_population(d, 3.7)).margin(1e-13));
}

TEST_CASE("population is even in time") {
  ChainParameters params{7, 0.4};
  CouplingDistribution ecd{{1.0, 0.8, 1.5, 1.1, 0.9, 1.7}};
  auto d = decompose(params, ecd);
  for (double t : {0.3, 1.9, 7.7, 42.0}) {
    REQUIRE(std::abs(transferred_population(d, t) -
                     transferred_population(d, -t)) < 1e-12);
  }
}

TEST_CASE("population agrees with a full-register reference") {
  SplitMix64 rng{808};
  for (int trial = 0; trial < 6; ++trial) {
    int n = 4 + static_cast<int>(rng.next_u64() % 4);
    double delta = 1.2 * rng.next_unit();
    std::vector<double> j(n - 1);
    for (auto& v : j) v = 0.2 + 1.8 * rng.next_unit();
    ChainParameters params{n, delta};
    CouplingDistribution ecd{j};
    auto d = decompose(params, ecd);
    double t = 12.0 * rng.next_unit();
    double reference = testsupport::brute_force_population(params, ecd, t);
    CAPTURE(trial, n, delta, t);
    REQUIRE(std::abs(transferred_population(d, t) - reference) < 1e-8);
  }
}

TEST_CASE("transfer amplitude rejects bad sites and times") {
  ChainParameters params{4, 1.0};
  CouplingDistribution ecd{{1.0, 1.0, 1.0}};
  auto d = decompose(params, ecd);
  CHECK_THROWS_AS(transfer_amplitude(d, 0, 1, 1.0), std::out_of_range);
  CHECK_THROWS_AS(transfer_amplitude(d, 1, 5, 1.0), std::out_of_range);
  CHECK_THROWS_AS(
      transfer_amplitude(d, 1, 2, std::numeric_limits<double>::infinity()),
      std::invalid_argument);
}

TEST_CASE("participation ratio spans the expected range") {
  CHECK(inverse_participation_ratio({1.0, 0.0, 0.0}) ==
        Catch::Approx(1.0).margin(1e-12));
  CHECK(inverse_participation_ratio({0.25, 0.25, 0.25, 0.25}) ==
        Catch::Approx(4.0).margin(1e-12));
  CHECK_THROWS_AS(inverse_participation_ratio({0.9, 0.3}), std::domain_error);
  CHECK_THROWS_AS(inverse_participation_ratio({-0.1, 1.1}), std::domain_error);
}

TEST_CASE("almost-pure bound scales the population") {
  CHECK(almost_pure_bound(0.96, 0.0) == Catch::Approx(0.96).margin(1e-15));
  CHECK(almost_pure_bound(0.96, 0.05) ==
        Catch::Approx(0.96 * 0.95).margin(1e-15));
  CHECK_THROWS_AS(almost_pure_bound(1.5, 0.0), std::domain_error);
  CHECK_THROWS_AS(almost_pure_bound(0.5, -0.1), std::domain_error);
}
