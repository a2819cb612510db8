#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <stdexcept>
#include <vector>

#include "spinweave/chain.hpp"

using namespace spinweave;

TEST_CASE("chain parameters validate their inputs") {
  CHECK_THROWS_AS(ChainParameters(1, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(ChainParameters(0, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(ChainParameters(5, std::nan("")), std::invalid_argument);
  CHECK_NOTHROW(ChainParameters(2, -3.0));
}

TEST_CASE("free coupling count is the centro-symmetric half") {
  CHECK(ChainParameters(2, 1.0).free_coupling_count() == 1);
  CHECK(ChainParameters(3, 1.0).free_coupling_count() == 1);
  CHECK(ChainParameters(4, 1.0).free_coupling_count() == 2);
  CHECK(ChainParameters(5, 1.0).free_coupling_count() == 2);
  CHECK(ChainParameters(30, 1.0).free_coupling_count() == 15);
  CHECK(ChainParameters(50, 1.0).free_coupling_count() == 25);
}

TEST_CASE("coupling distribution validation") {
  CHECK_THROWS_AS(CouplingDistribution(std::vector<double>{}),
                  std::invalid_argument);
  CHECK_THROWS_AS(CouplingDistribution({1.0, std::nan("")}),
                  std::invalid_argument);
  CouplingDistribution ecd{{1.0, 2.0, 3.0}};
  CHECK(ecd.n_sites() == 4);
  CHECK_FALSE(ecd.is_centro_symmetric());
  CHECK(ecd.free_couplings() == std::vector<double>{1.0, 2.0, 3.0});
}

TEST_CASE("centro-symmetric construction mirrors the free half") {
  SECTION("even length") {
    auto ecd = CouplingDistribution::centro_symmetric({1.0, 2.0, 3.0}, 6);
    CHECK(ecd.couplings() == std::vector<double>{1.0, 2.0, 3.0, 2.0, 1.0});
    CHECK(ecd.is_centro_symmetric());
    CHECK(ecd.free_couplings() == std::vector<double>{1.0, 2.0, 3.0});
  }
  SECTION("odd length") {
    auto ecd = CouplingDistribution::centro_symmetric({4.0, 7.0}, 5);
    CHECK(ecd.couplings() == std::vector<double>{4.0, 7.0, 7.0, 4.0});
  }
  SECTION("two sites") {
    auto ecd = CouplingDistribution::centro_symmetric({2.5}, 2);
    CHECK(ecd.couplings() == std::vector<double>{2.5});
  }
  SECTION("mirror identity J_{N-i} = J_i holds exactly") {
    auto ecd = CouplingDistribution::centro_symmetric(
        {0.1, 0.72, 1.3, 2.9, 0.44}, 11);
    const auto& j = ecd.couplings();
    int n = ecd.n_sites();
    for (int i = 1; i <= n - 1; ++i) {
      REQUIRE(j[i - 1] == j[n - i - 1]);
    }
  }
  SECTION("wrong free count throws") {
    CHECK_THROWS_AS(CouplingDistribution::centro_symmetric({1.0, 2.0}, 6),
                    std::invalid_argument);
  }
}

TEST_CASE("one-excitation projection on tiny chains") {
  SECTION("two sites, isotropic") {
    auto h = project_hamiltonian(ChainParameters{2, 1.0},
                                 CouplingDistribution{{1.0}});
    REQUIRE(h.size() == 2);
    CHECK(h.diagonal[0] == Catch::Approx(0.5).margin(1e-15));
    CHECK(h.diagonal[1] == Catch::Approx(0.5).margin(1e-15));
    CHECK(h.off_diagonal[0] == Catch::Approx(-1.0).margin(1e-15));
  }
  SECTION("three sites, isotropic") {
    auto h = project_hamiltonian(ChainParameters{3, 1.0},
                                 CouplingDistribution{{2.0, 3.0}});
    CHECK(h.diagonal[0] == Catch::Approx(-0.5).margin(1e-15));
    CHECK(h.diagonal[1] == Catch::Approx(2.5).margin(1e-15));
    CHECK(h.diagonal[2] == Catch::Approx(0.5).margin(1e-15));
    CHECK(h.off_diagonal[0] == Catch::Approx(-2.0).margin(1e-15));
    CHECK(h.off_diagonal[1] == Catch::Approx(-3.0).margin(1e-15));
  }
  SECTION("XX chain has zero diagonal") {
    auto h = project_hamiltonian(ChainParameters{4, 0.0},
                                 CouplingDistribution{{1.0, 2.0, 3.0}});
    for (double d : h.diagonal) CHECK(d == 0.0);
    CHECK(h.off_diagonal == std::vector<double>{-1.0, -2.0, -3.0});
  }
}

TEST_CASE("projection of a centro-symmetric chain is mirror symmetric") {
  auto ecd = CouplingDistribution::centro_symmetric({0.3, 1.9, 0.8, 2.2}, 8);
  auto h = project_hamiltonian(ChainParameters{8, 1.3}, ecd);
  int n = h.size();
  for (int i = 0; i < n; ++i) {
    REQUIRE(h.diagonal[i] == Catch::Approx(h.diagonal[n - 1 - i]).margin(1e-15));
  }
  for (int i = 0; i < n - 1; ++i) {
    REQUIRE(h.off_diagonal[i] ==
            Catch::Approx(h.off_diagonal[n - 2 - i]).margin(1e-15));
  }
}

TEST_CASE("projection rejects mismatched coupling counts") {
  CHECK_THROWS_AS(project_hamiltonian(ChainParameters{5, 1.0},
                                      CouplingDistribution{{1.0, 2.0}}),
                  std::invalid_argument);
}

TEST_CASE("perfect transfer couplings follow sqrt(i(N-i))") {
  auto ecd = perfect_transfer_xx_couplings(4);
  REQUIRE(ecd.couplings().size() == 3);
  CHECK(ecd.couplings()[0] == Catch::Approx(std::sqrt(3.0)).margin(1e-15));
  CHECK(ecd.couplings()[1] == Catch::Approx(2.0).margin(1e-15));
  CHECK(ecd.couplings()[2] == Catch::Approx(std::sqrt(3.0)).margin(1e-15));

  auto big = perfect_transfer_xx_couplings(16);
  const auto& j = big.couplings();
  for (int i = 1; i <= 15; ++i) {
    REQUIRE(j[i - 1] == Catch::Approx(std::sqrt(i * (16.0 - i))).margin(1e-12));
    REQUIRE(j[i - 1] == j[15 - i]);
  }
  CHECK_THROWS_AS(perfect_transfer_xx_couplings(1), std::invalid_argument);
}
