#include <doctest.h>

#include <cmath>
#include <random>

#include "hughes/datum.hpp"
#include "hughes/turning.hpp"
#include "oracles.hpp"

using namespace hughes;

TEST_CASE("empty corridor and alpha = 0 use the plain distances") {
  const std::vector<double> outside{-1.5, -1.2, 1.0, 1.3};
  const std::vector<double> inside{-0.7, -0.1, 0.3, 0.8};
  for (const auto* x : {&outside, &inside}) {
    const double alpha = x == &outside ? 3.0 : 0.0;
    const auto p = build_cost_profile(*x, 0.2, alpha);
    for (double s : {-1.0, -0.6, 0.0, 0.25, 0.99, 1.0}) {
      CHECK(p.eval_to_left(s) == doctest::Approx(s + 1.0).epsilon(1e-15));
      CHECK(p.eval_to_right(s) == doctest::Approx(1.0 - s).epsilon(1e-15));
    }
    CHECK(solve_zeta(p) == 0.0);
  }
  CHECK(corridor_window(std::span<const double>(outside)).empty());
}

TEST_CASE("profile values match direct integrals") {
  const std::vector<double> x{-0.5, 0.5};
  const double ell = 0.4;
  const auto p = build_cost_profile(x, ell, 1.0);
  const auto w = oracle::window_of(x);
  for (double s : {-1.0, -0.75, -0.5, -0.2, 0.0, 0.3, 0.5, 0.8, 1.0}) {
    CHECK(p.eval_to_left(s) == doctest::Approx(oracle::z_minus(x, ell, 1.0, w, s)).epsilon(1e-14));
    CHECK(p.eval_to_right(s) == doctest::Approx(oracle::z_plus(x, ell, 1.0, w, s)).epsilon(1e-14));
  }
  // Z_- at the right particle: 1.5 + 0.4; Z_+ at the left particle: 1.5 + 0.4.
  CHECK(p.eval_to_left(0.5) == doctest::Approx(1.9));
  CHECK(p.eval_to_right(-0.5) == doctest::Approx(1.9));
  CHECK(solve_zeta(p) == 0.0);
}

TEST_CASE("slopes of the cost maps") {
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 100; ++trial) {
    auto x = oracle::random_positions(rng, 12, -1.4, 1.4, 1e-3);
    const auto p = build_cost_profile(x, 0.05, 2.0);
    CHECK(p.to_left.front() == 0.0);
    CHECK(p.to_right.back() == 0.0);
    for (std::size_t k = 1; k < p.nodes.size(); ++k) {
      const double dx = p.nodes[k] - p.nodes[k - 1];
      CHECK((p.to_left[k] - p.to_left[k - 1]) / dx >= 1.0 - 1e-9);
      CHECK((p.to_right[k] - p.to_right[k - 1]) / dx <= -1.0 + 1e-9);
    }
  }
}

TEST_CASE("symmetric configurations balance at exactly zero") {
  for (double alpha : {0.1, 1.0, 7.5}) {
    CHECK(solve_zeta(build_cost_profile(std::vector<double>{-0.6, -0.1, 0.1, 0.6}, 0.1, alpha)) == 0.0);
    CHECK(solve_zeta(build_cost_profile(std::vector<double>{-1.2, -0.3, 0.0, 0.3, 1.2}, 0.1, alpha)) == 0.0);
  }
}

TEST_CASE("large alpha sends zeta to the middle of the middle gap") {
  const std::vector<double> x{-0.8, -0.2, 0.4, 0.6};
  const double z = solve_zeta(build_cost_profile(x, 0.1, 1e6));
  CHECK(std::abs(z - 0.1) <= 1e-3);
  CHECK(std::abs(z - oracle::zeta(x, 0.1, 1e6)) <= 1e-10);
}

TEST_CASE("zeta matches the bisection oracle on random configurations") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::uniform_int_distribution<int> count(2, 40);
  for (int trial = 0; trial < 1000; ++trial) {
    const std::size_t m = static_cast<std::size_t>(count(rng));
    const double lo = -1.0 - 0.5 * u(rng);
    const double hi = 1.0 + 0.5 * u(rng);
    auto x = oracle::random_positions(rng, m, lo, hi, 1e-4);
    const double ell = 0.01 + 0.2 * u(rng);
    const double alpha = trial % 10 == 0 ? 0.0 : 20.0 * u(rng);
    const auto p = build_cost_profile(x, ell, alpha);
    const double z = solve_zeta(p);
    CHECK(std::abs(z - oracle::zeta(x, ell, alpha)) <= 1e-10);
    CHECK(std::abs(p.eval_to_left(z) - p.eval_to_right(z)) <= 1e-12 * (1.0 + alpha));
    const double M = oracle::particle_mass(x, ell, -1.0, 1.0);
    CHECK(z > -1.0);
    CHECK(z < 1.0);
    CHECK(std::abs(z) <= 0.5 * alpha * M + 1e-12);
    const double xi = solve_xi(x, ell, alpha);
    CHECK(std::abs(xi - oracle::xi(x, ell, alpha)) <= 1e-10);
    CHECK(std::abs(xi - z) <= 0.5 * alpha * ell + 1e-12);
  }
}

TEST_CASE("zeta moves monotonically from 0 towards the mass midpoint") {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 200; ++trial) {
    auto x = oracle::random_positions(rng, 9, -0.95, 0.95, 1e-3);
    const double ell = 0.05;
    // Midpoint of half the in-corridor mass: the large-alpha limit.
    const double mid = solve_zeta(build_cost_profile(x, ell, 1e9));
    double prev = 0.0;
    for (double alpha = 0.0; alpha <= 50.0; alpha += 0.5) {
      const double z = solve_zeta(build_cost_profile(x, ell, alpha));
      CHECK(std::min(0.0, mid) - 1e-9 <= z);
      CHECK(z <= std::max(0.0, mid) + 1e-9);
      CHECK(std::abs(z) >= std::abs(prev) - 1e-12);
      prev = z;
    }
  }
}

TEST_CASE("exact hit convention: a particle on zeta moves right") {
  const std::vector<double> x{-0.5, 0.0, 0.5};
  const auto s = turning_state(x, 0.2, 1.0);
  CHECK(s.zeta == 0.0);
  CHECK(s.left_count == 1);
  CHECK(split_count(x, -0.5) == 0);
  CHECK(split_count(x, 0.5000000001) == 3);
}

TEST_CASE("zeta can leave the particle hull") {
  // Crowd entirely right of the centre with a light cost: zeta < x_0.
  const std::vector<double> x{0.2, 0.3, 0.4};
  const auto s = turning_state(x, 0.1, 0.1);
  CHECK(s.zeta < x.front());
  CHECK(s.left_count == 0);
}

TEST_CASE("window from inside flags") {
  const std::vector<std::uint8_t> ok{0, 1, 1, 1, 0};
  const auto w = corridor_window(std::span<const std::uint8_t>(ok));
  CHECK(*w.first == 1);
  CHECK(*w.last == 3);
  CHECK(w.count() == 3);
  const std::vector<std::uint8_t> bad{1, 0, 1};
  CHECK_THROWS_AS(corridor_window(std::span<const std::uint8_t>(bad)), std::logic_error);
  // Particles exactly on a door are outside.
  const std::vector<double> x{-1.0, 0.0, 1.0};
  const auto v = corridor_window(std::span<const double>(x));
  CHECK(*v.first == 1);
  CHECK(*v.last == 1);
}

TEST_CASE("xi examples") {
  CHECK(std::abs(solve_xi(std::vector<double>{-0.9, 0.1, 0.7}, 0.3, 0.0)) <= 1e-15);
  CHECK(std::abs(solve_xi(std::vector<double>{-0.5, 0.5}, 0.4, 1.0)) <= 1e-15);
}

TEST_CASE("counting-form xi") {
  const std::vector<double> x{-0.9, -0.2, 0.1, 0.7};
  CHECK(std::abs(solve_xi_discrete(x, 0.3, 0.0)) <= 1e-13);
  CHECK(std::abs(solve_xi_discrete(std::vector<double>{-0.6, -0.1, 0.1, 0.6}, 0.1, 2.0)) <= 1e-13);

  const auto init = atomize(InitialDatum({{-1.0, -0.5, 0.9}, {-0.4, 0.0, 0.9}}), 200);
  const double alpha = 1.3;
  const double xd = solve_xi_discrete(init.positions, init.ell, alpha);
  const double xc = solve_xi(init.positions, init.ell, alpha);
  CHECK(std::abs(xd - xc) <= init.ell * (1.0 + alpha));

  std::mt19937_64 rng(21);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int trial = 0; trial < 300; ++trial) {
    auto y = oracle::random_positions(rng, 20, -1.3, 1.3, 1e-3);
    const double ell = 0.02 + 0.05 * u(rng);
    const double a = 10.0 * u(rng);
    // Within one gap of the exact xi.
    const double gap_max = [&] {
      double g = 0.0;
      for (std::size_t i = 1; i < y.size(); ++i) g = std::max(g, y[i] - y[i - 1]);
      return g;
    }();
    CHECK(std::abs(solve_xi_discrete(y, ell, a) - solve_xi(y, ell, a)) <= gap_max);
  }
}

TEST_CASE("piecewise linear root rejects bad input") {
  CHECK_THROWS_AS(piecewise_linear_root(std::vector<double>{0.0}, std::vector<double>{0.0}),
                  std::invalid_argument);
  CHECK_THROWS_AS(piecewise_linear_root(std::vector<double>{0.0, 1.0}, std::vector<double>{1.0, 2.0}),
                  std::domain_error);
  CHECK(piecewise_linear_root(std::vector<double>{0.0, 1.0, 2.0}, std::vector<double>{-1.0, 0.0, 1.0}) == 1.0);
}
