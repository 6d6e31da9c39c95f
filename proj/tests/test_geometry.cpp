#include <doctest.h>

#include <cmath>
#include <numbers>

#include "oracles.hpp"
#include "ppthin/geometry.hpp"
#include "ppthin/quadrature.hpp"

using namespace ppthin;

TEST_CASE("ball volumes in closed form") {
  CHECK(ball_volume(Norm::euclidean, 2, 1.0) == doctest::Approx(std::numbers::pi));
  CHECK(ball_volume(Norm::euclidean, 1, 2.0) == doctest::Approx(4.0));
  CHECK(ball_volume(Norm::sup, 2, 1.0) == doctest::Approx(4.0));
  CHECK(ball_volume(Norm::euclidean, 3, 1.0) == doctest::Approx(4.0 * std::numbers::pi / 3.0));
  CHECK(ball_volume(Norm::sup, 4, 0.5) == doctest::Approx(1.0));
}

TEST_CASE("Monte Carlo ball volume within 3 SE of the closed form") {
  RngStream rng(7, 0);
  for (int dim : {2, 3, 4}) {
    const McVolume mc = ball_volume_mc(Norm::euclidean, dim, 1.3, 200000, rng);
    const double exact = ball_volume(Norm::euclidean, dim, 1.3);
    CHECK(std::abs(mc.value - exact) < 3.0 * mc.std_error);
  }
}

TEST_CASE("union ball volume edge cases") {
  const std::vector<double> zero{0.0, 0.0};
  CHECK(union_ball_volume(Norm::euclidean, 2, zero, 0.7) ==
        doctest::Approx(ball_volume(Norm::euclidean, 2, 0.7)));
  const std::vector<double> far{3.0, 0.0};
  CHECK(union_ball_volume(Norm::euclidean, 2, far, 1.0) ==
        doctest::Approx(2.0 * std::numbers::pi));
  const std::vector<double> far3{2.5, 0.0, 0.0};
  CHECK(union_ball_volume(Norm::sup, 3, far3, 1.0) == doctest::Approx(16.0));
}

TEST_CASE("union ball volume against the hit-or-miss oracle") {
  RngStream rng(11, 0);
  const std::vector<double> y{1.0, 0.0};
  const double exact = union_ball_volume(Norm::euclidean, 2, y, 1.0);
  const McVolume mc = union_ball_volume_mc(Norm::euclidean, 2, y, 1.0, 400000, rng);
  CHECK(std::abs(mc.value - exact) < 3.0 * mc.std_error);
  // Touching balls gain at least half a ball of extra volume.
  CHECK(exact >= 1.5 * std::numbers::pi);
}

TEST_CASE("union volume nondecreasing along a ray and clamped") {
  const double r = 0.8;
  double prev = 0.0;
  for (double s = 0.0; s <= 2.5 * r; s += 0.05 * r) {
    const std::vector<double> y{s, 0.0, 0.0};
    const double v = union_ball_volume(Norm::euclidean, 3, y, r);
    CHECK(v >= prev - 1e-12);
    CHECK(v <= 2.0 * ball_volume(Norm::euclidean, 3, r) + 1e-12);
    if (s >= r) CHECK(v >= 1.5 * ball_volume(Norm::euclidean, 3, r) - 1e-12);
    prev = v;
  }
}

TEST_CASE("Euclidean dim 4 union falls back to Monte Carlo between the clamps") {
  const std::vector<double> y{0.9, 0.0, 0.0, 0.0};
  const double v = union_ball_volume(Norm::euclidean, 4, y, 1.0, 200000);
  CHECK(v >= ball_volume(Norm::euclidean, 4, 1.0));
  CHECK(v <= 2.0 * ball_volume(Norm::euclidean, 4, 1.0));
}

TEST_CASE("window halo bookkeeping") {
  const Window inner = Window::unit_cube(2);
  const Window padded = inner.halo(0.25);
  CHECK(padded.volume() == doctest::Approx(1.5 * 1.5));
  CHECK(padded.is_halo());
  CHECK(padded.halo_pad() == doctest::Approx(0.25));
  CHECK(padded.covers_halo_of(inner, 0.25));
  CHECK(padded.covers_halo_of(inner, 0.2));
  CHECK_FALSE(padded.covers_halo_of(inner, 0.3));
  CHECK(padded.inner().volume() == doctest::Approx(1.0));
  const std::vector<double> x{-0.2, 0.5};
  CHECK(padded.contains(x));
  CHECK_FALSE(inner.contains(x));
}

TEST_CASE("degenerate window has zero volume") {
  const Window flat({{0.0, 1.0}, {0.3, 0.3}});
  CHECK(flat.volume() == 0.0);
}

TEST_CASE("adaptive quadrature on known integrals") {
  CHECK(integrate_gk([](double x) { return std::sin(x); }, 0.0, std::numbers::pi) ==
        doctest::Approx(2.0).epsilon(1e-10));
  CHECK(integrate_gk([](double x) { return std::exp(-x * x); }, -8.0, 8.0) ==
        doctest::Approx(std::sqrt(std::numbers::pi)).epsilon(1e-9));
  // Shell integral of 1 equals the shell volume, in both norms.
  const double shell2 = shell_integral(Norm::euclidean, 2, 0.5, 1.0,
                                       [](std::span<const double>) { return 1.0; });
  CHECK(shell2 == doctest::Approx(std::numbers::pi * (1.0 - 0.25)).epsilon(1e-9));
  const double shell_sup = shell_integral(Norm::sup, 2, 0.5, 1.0,
                                          [](std::span<const double>) { return 1.0; });
  CHECK(shell_sup == doctest::Approx(4.0 - 1.0).epsilon(1e-9));
  const double ball_sup = shell_integral(Norm::sup, 3, 0.0, 0.5,
                                         [](std::span<const double>) { return 1.0; });
  CHECK(ball_sup == doctest::Approx(1.0).epsilon(1e-9));
  // A nonradial sup-norm integrand: sum of |y_k| over the box shell.
  const double moment = shell_integral(Norm::sup, 2, 0.0, 1.0, [](std::span<const double> y) {
    return std::abs(y[0]) + std::abs(y[1]);
  });
  CHECK(moment == doctest::Approx(4.0).epsilon(1e-9));
}
