#include "doctest.h"

#include <cmath>
#include <random>

#include "dephasing/bloch.hpp"
#include "test_support.hpp"

using namespace dephasing;
using doctest::Approx;

TEST_CASE("purity and coherence of reference states") {
  const BlochState example(std::sqrt(0.3), 0.0, std::sqrt(0.5));
  CHECK(purity(example) == Approx(0.8).epsilon(1e-15));
  CHECK(coherence(example) == Approx(0.3).epsilon(1e-15));

  CHECK(purity(BlochState(0, 0, 0)) == 0.0);
  CHECK(coherence(BlochState(0, 0, 1)) == 0.0);
  CHECK(purity(BlochState(0.6, 0.8, 0)) == Approx(1.0).epsilon(1e-15));
  CHECK(coherence(BlochState(0.6, 0.8, 0)) == Approx(1.0).epsilon(1e-15));
}

TEST_CASE("BlochState rejects states outside the ball") {
  CHECK_NOTHROW(BlochState(1.0, 0.0, 1e-5));  // |v|^2 - 1 = 1e-10, inside slack
  CHECK_THROWS_AS(BlochState(1.0, 0.0, 1e-4), Error);
  CHECK_THROWS_AS(BlochState(NAN, 0.0, 0.0), Error);
  CHECK_THROWS_AS(BlochState(0.0, INFINITY, 0.0), Error);
  try {
    BlochState(0.8, 0.8, 0.0);
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::InvalidState);
  }
}

TEST_CASE("density matrix conversion") {
  const auto half = to_density_matrix(BlochState(0, 0, 0));
  CHECK(half(0, 0) == std::complex<double>(0.5, 0));
  CHECK(half(1, 1) == std::complex<double>(0.5, 0));
  CHECK(half(0, 1) == std::complex<double>(0, 0));

  const auto up = to_density_matrix(BlochState(0, 0, 1));
  CHECK(up(0, 0).real() == 1.0);
  CHECK(up(1, 1).real() == 0.0);

  const BlochState example(std::sqrt(0.3), 0.0, std::sqrt(0.5));
  const auto rho = to_density_matrix(example);
  // Direct evaluation of (I + vx sx + vz sz) / 2.
  CHECK(rho(0, 0).real() == Approx((1 + std::sqrt(0.5)) / 2).epsilon(1e-15));
  CHECK(rho(1, 1).real() == Approx((1 - std::sqrt(0.5)) / 2).epsilon(1e-15));
  CHECK(rho(0, 1).real() == Approx(std::sqrt(0.3) / 2).epsilon(1e-15));
  CHECK(rho(1, 0).real() == Approx(std::sqrt(0.3) / 2).epsilon(1e-15));
  CHECK(rho(0, 1).imag() == 0.0);

  const BlochState back = from_density_matrix(rho);
  CHECK(std::abs(back.vx() - example.vx()) <= 1e-14);
  CHECK(std::abs(back.vy()) <= 1e-14);
  CHECK(std::abs(back.vz() - example.vz()) <= 1e-14);

  const BlochState z = from_density_matrix(up);
  CHECK(z == BlochState(0, 0, 1));
  CHECK(from_density_matrix(half) == BlochState(0, 0, 0));

  // sigma_y convention: rho(0,1) = (vx - i vy) / 2.
  const auto ry = to_density_matrix(BlochState(0, 1, 0));
  CHECK(ry(0, 1).imag() == -0.5);
}

TEST_CASE("from_density_matrix rejects invalid input") {
  DensityMatrix bad;
  bad.entries = {{{0.5, 0}, {0.1, 0.2}, {0.1, 0.2}, {0.5, 0}}};  // not Hermitian
  CHECK_THROWS_AS(from_density_matrix(bad), Error);
  bad.entries = {{{0.6, 0}, {0, 0}, {0, 0}, {0.6, 0}}};  // trace 1.2
  CHECK_THROWS_AS(from_density_matrix(bad), Error);
  bad.entries = {{{0.5, 0}, {0.9, 0}, {0.9, 0}, {0.5, 0}}};  // negative determinant
  CHECK_THROWS_AS(from_density_matrix(bad), Error);
  try {
    from_density_matrix(bad);
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::InvalidDensityMatrix);
  }
}

TEST_CASE("property: conversion round trip and spectrum on random ball states") {
  std::mt19937_64 rng(1234);
  for (int i = 0; i < 1000; ++i) {
    const BlochState s = dephasing::testing::random_ball_state(rng);
    const auto rho = to_density_matrix(s);
    const BlochState back = from_density_matrix(rho);
    REQUIRE(dephasing::testing::max_component_gap(s, back) <= 1e-14);

    // 2x2 Hermitian eigenvalues: tr/2 +- sqrt((a - d)^2 / 4 + |b|^2).
    const double a = rho(0, 0).real(), d = rho(1, 1).real();
    const double disc = std::sqrt(0.25 * (a - d) * (a - d) + std::norm(rho(0, 1)));
    const double norm = std::sqrt(purity(s));
    CHECK(std::abs(0.5 * (a + d) + disc - 0.5 * (1 + norm)) <= 1e-12);
    CHECK(std::abs(0.5 * (a + d) - disc - 0.5 * (1 - norm)) <= 1e-12);

    CHECK(coherence(s) >= 0.0);
    CHECK(coherence(s) <= purity(s));
    CHECK(purity(s) <= 1.0 + kNormTolerance);
  }
}

TEST_CASE("breakdown time") {
  CHECK(breakdown_time(0.8, 0.3, 0.1) == Approx(50.0 / 3.0).epsilon(1e-14));
  CHECK(std::abs(breakdown_time(0.8, 0.3, 0.1) - 16.67) <= 0.005);
  CHECK(breakdown_time(0.5, 0.5, 1.0) == 0.0);
  CHECK(breakdown_time(1.0, 0.5, 1.0) == Approx(1.0));

  auto kind_of = [](auto&& fn) {
    try {
      fn();
    } catch (const Error& e) {
      return e.kind();
    }
    FAIL("expected an error");
    return ErrorKind::InvalidConfig;
  };
  CHECK(kind_of([] { breakdown_time(0.5, 0.0, 1.0); }) == ErrorKind::ZeroCoherence);
  CHECK(kind_of([] { breakdown_time(0.3, 0.5, 1.0); }) == ErrorKind::InvalidState);
  CHECK(kind_of([] { breakdown_time(1.5, 0.5, 1.0); }) == ErrorKind::InvalidState);
  CHECK(kind_of([] { breakdown_time(0.8, 0.3, 0.0); }) == ErrorKind::InvalidParams);
}

TEST_CASE("property: breakdown time is monotone in c and p") {
  std::mt19937_64 rng(99);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (int i = 0; i < 500; ++i) {
    const double gamma = 0.01 + unit(rng);
    const double c1 = 0.01 + 0.4 * unit(rng);
    const double c2 = c1 + 0.01 + 0.1 * unit(rng);
    const double p = c2 + (1.0 - c2) * unit(rng);
    CHECK(breakdown_time(p, c1, gamma) > breakdown_time(p, c2, gamma));
    const double p2 = p + (1.0 - p) * unit(rng);
    if (p2 > p) CHECK(breakdown_time(p2, c1, gamma) > breakdown_time(p, c1, gamma));
  }
}

TEST_CASE("ModelParams validation") {
  CHECK_NOTHROW(ModelParams{0.1}.validate());
  CHECK_THROWS_AS((ModelParams{0.0}.validate()), Error);
  CHECK_THROWS_AS((ModelParams{0.1, 0.0}.validate()), Error);
  CHECK_THROWS_AS((ModelParams{0.1, 1e-12, -1.0}.validate()), Error);
}

TEST_CASE("rotate_z") {
  const BlochState s(0.5, 0.0, 0.3);
  const BlochState r = rotate_z(s, std::numbers::pi / 2);
  CHECK(std::abs(r.vx()) < 1e-16);
  CHECK(r.vy() == Approx(0.5));
  CHECK(r.vz() == 0.3);
  CHECK(coherence(r) == Approx(coherence(s)).epsilon(1e-15));
}
