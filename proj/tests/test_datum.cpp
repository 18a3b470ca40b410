#include <doctest.h>

#include <cmath>
#include <random>
#include <stdexcept>

#include "hughes/datum.hpp"

using namespace hughes;

namespace {

InitialDatum two_blocks() { return InitialDatum({{-1.0, -0.5, 0.9}, {-0.4, 0.0, 0.9}}); }

}  // namespace

TEST_CASE("two-block datum, n = 200") {
  const auto d = two_blocks();
  CHECK(d.mass() == doctest::Approx(0.81).epsilon(1e-15));
  CHECK(datum_mass(d, -1.0, 1.0) == doctest::Approx(0.81).epsilon(1e-15));
  const auto init = atomize(d, 200);
  CHECK(init.ell == doctest::Approx(0.00405).epsilon(1e-14));
  CHECK(init.positions.front() == -1.0);
  CHECK(init.positions.back() == 0.0);
}

TEST_CASE("uniform datum splits evenly") {
  const auto init = atomize(InitialDatum({{-1.0, 1.0, 0.5}}), 4);
  CHECK(init.ell == 0.25);
  const double expected[] = {-1.0, -0.5, 0.0, 0.5, 1.0};
  for (int i = 0; i < 5; ++i) CHECK(init.positions[i] == doctest::Approx(expected[i]).epsilon(1e-15));
  CHECK(datum_mass(InitialDatum({{-1.0, 1.0, 0.5}}), -1.0, 0.0) == 0.5);
}

TEST_CASE("single block on [0.1, 0.9)") {
  const auto init = atomize(InitialDatum({{0.1, 0.9, 0.9}}), 2);
  CHECK(init.ell == doctest::Approx(0.36));
  CHECK(init.positions[0] == 0.1);
  CHECK(init.positions[1] == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(init.positions[2] == 0.9);
}

TEST_CASE("degenerate mass integrals") {
  const auto d = two_blocks();
  CHECK(datum_mass(d, 0.3, 0.3) == 0.0);
  CHECK(datum_mass(d, 0.5, 0.2) == 0.0);
  CHECK(datum_mass(d, -0.5, -0.4) == 0.0);
}

TEST_CASE("invalid data are rejected") {
  CHECK_THROWS_AS(InitialDatum({}), std::invalid_argument);
  CHECK_THROWS_AS(InitialDatum({{-1.0, 0.0, 0.0}}), std::invalid_argument);
  CHECK_THROWS_AS(InitialDatum({{-1.0, 0.0, 0.5}, {-0.5, 0.5, 0.5}}), std::invalid_argument);
  CHECK_THROWS_AS(InitialDatum({{-1.5, 0.0, 0.5}}), std::invalid_argument);
  CHECK_THROWS_AS(InitialDatum({{0.5, 0.0, 0.5}}), std::invalid_argument);
  CHECK_THROWS_AS(InitialDatum({{0.0, 0.5, -0.1}}), std::invalid_argument);
  CHECK_THROWS_AS(InitialDatum({{0.0, NAN, 0.1}}), std::invalid_argument);
  CHECK_THROWS_AS(InitialDatum({{0.0, 0.5, 1.5}}).check_bounded_by(1.0), std::invalid_argument);
  CHECK_THROWS_AS(atomize(two_blocks(), 0), std::invalid_argument);
  CHECK_THROWS_AS(atomize(InitialDatum({{0.0, 1e-13, 1.0}}), 1000), std::invalid_argument);
}

TEST_CASE("explicit zero pieces normalise away") {
  const InitialDatum a({{-1.0, -0.5, 0.9}, {-0.5, -0.4, 0.0}, {-0.4, 0.0, 0.9}});
  const auto b = two_blocks();
  REQUIRE(a.pieces().size() == b.pieces().size());
  for (std::size_t k = 0; k < a.pieces().size(); ++k) {
    CHECK(a.pieces()[k].a == b.pieces()[k].a);
    CHECK(a.pieces()[k].b == b.pieces()[k].b);
  }
  // Unsorted input is sorted.
  const InitialDatum c({{-0.4, 0.0, 0.9}, {-1.0, -0.5, 0.9}});
  CHECK(c.pieces().front().a == -1.0);
}

TEST_CASE("exact hit at a vacuum edge stays at the left edge") {
  // Mass 0.5 on each block; n = 2 puts x_1 exactly where the first block ends.
  const auto init = atomize(InitialDatum({{-1.0, -0.5, 1.0}, {0.5, 1.0, 1.0}}), 2);
  CHECK(init.positions[1] == -0.5);
  CHECK(init.positions[2] == 1.0);
}

TEST_CASE("randomised round trip, symmetry and gap bound") {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<DatumPiece> pieces;
    double a = -1.0 + 0.3 * u(rng);
    while (a < 0.9) {
      const double b = std::min(1.0, a + 0.05 + 0.4 * u(rng));
      if (u(rng) < 0.8) pieces.push_back({a, b, 0.05 + 0.95 * u(rng)});
      a = b + (u(rng) < 0.3 ? 0.1 * u(rng) : 0.0);
    }
    if (pieces.empty()) continue;
    const InitialDatum d(pieces);
    const std::size_t n = 1 + static_cast<std::size_t>(u(rng) * 300);
    const auto init = atomize(d, n);
    CHECK(init.positions.front() == d.support_min());
    CHECK(init.positions.back() == d.support_max());
    for (std::size_t i = 1; i <= n; ++i) {
      CHECK(std::abs(datum_mass(d, init.positions[i - 1], init.positions[i]) - init.ell) <=
            1e-12 * d.mass());
      CHECK(init.positions[i] - init.positions[i - 1] >= init.ell / d.max_density() * (1 - 1e-12));
    }
  }
  // Symmetric data give symmetric positions.
  for (std::size_t n : {1u, 7u, 8u, 64u, 101u}) {
    const auto init = atomize(InitialDatum({{-0.8, -0.2, 0.7}, {-0.2, 0.2, 0.3}, {0.2, 0.8, 0.7}}), n);
    for (std::size_t i = 0; i <= n; ++i) {
      CHECK(std::abs(init.positions[i] + init.positions[n - i]) <= 1e-12);
    }
  }
}

TEST_CASE("particles from explicit positions") {
  const auto init = particles_from_positions({0.0, 0.5}, 0.4);
  CHECK(init.max_density == doctest::Approx(0.8));
  CHECK(init.mass() == doctest::Approx(0.4));
  CHECK_THROWS_AS(particles_from_positions({0.0, 0.0}, 0.4), std::invalid_argument);
  CHECK_THROWS_AS(particles_from_positions({0.0}, 0.4), std::invalid_argument);
}
