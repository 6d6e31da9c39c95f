#include <doctest.h>

#include <cmath>

#include "oracles.hpp"
#include "ppthin/simulate.hpp"
#include "ppthin/summaries.hpp"

using namespace ppthin;

TEST_CASE("poisson sampler count moments") {
  RngStream rng(101, 0);
  const Window w({{0.0, 10.0}, {0.0, 10.0}});
  const double intensity = 1.0;  // mean count 100
  const std::size_t reps = 10000;
  double sum = 0.0, sumsq = 0.0;
  for (std::size_t i = 0; i < reps; ++i) {
    const double n = static_cast<double>(sample_poisson(w, intensity, rng).size());
    sum += n;
    sumsq += n * n;
  }
  const double mean = sum / reps;
  const double var = sumsq / reps - mean * mean;
  CHECK(std::abs(mean - 100.0) < 3.0 * 10.0 / std::sqrt(static_cast<double>(reps)));
  // Poisson: variance equals the mean.
  CHECK(std::abs(var - 100.0) / 100.0 < 0.1);
}

TEST_CASE("poisson sampler on a volume-zero window is empty") {
  RngStream rng(102, 0);
  const Window flat({{0.0, 1.0}, {0.5, 0.5}});
  for (int i = 0; i < 100; ++i) CHECK(sample_poisson(flat, 50.0, rng).empty());
}

TEST_CASE("poisson counts in disjoint subwindows are uncorrelated") {
  RngStream rng(103, 0);
  const Window w = Window::unit_cube(2);
  const Window left({{0.0, 0.5}, {0.0, 1.0}});
  const Window right({{0.5, 1.0}, {0.0, 1.0}});
  const std::size_t reps = 20000;
  double sx = 0, sy = 0, sxx = 0, syy = 0, sxy = 0;
  for (std::size_t i = 0; i < reps; ++i) {
    const PointPattern p = sample_poisson(w, 8.0, rng);
    double nl = 0, nr = 0;
    for (std::size_t k = 0; k < p.size(); ++k) {
      if (left.contains(p.point(k)))
        ++nl;
      else if (right.contains(p.point(k)) && p.point(k)[0] > 0.5)
        ++nr;
    }
    sx += nl;
    sy += nr;
    sxx += nl * nl;
    syy += nr * nr;
    sxy += nl * nr;
  }
  const double n = static_cast<double>(reps);
  const double corr = (sxy / n - (sx / n) * (sy / n)) /
                      std::sqrt((sxx / n - (sx / n) * (sx / n)) *
                                (syy / n - (sy / n) * (sy / n)));
  CHECK(std::abs(corr) < 3.0 / std::sqrt(n));
}

TEST_CASE("reproducibility: same seed and stream give identical patterns") {
  const Window w = Window::unit_cube(3);
  RngStream a(77, 4), b(77, 4), c(77, 5);
  const PointPattern pa = sample_poisson(w, 20.0, a);
  const PointPattern pb = sample_poisson(w, 20.0, b);
  const PointPattern pc = sample_poisson(w, 20.0, c);
  REQUIRE(pa.size() == pb.size());
  for (std::size_t i = 0; i < pa.size(); ++i)
    for (int k = 0; k < 3; ++k) CHECK(pa.point(i)[k] == pb.point(i)[k]);
  // A different stream index should not reproduce the same draw.
  CHECK((pc.size() != pa.size() || pa.size() == 0 || pc.point(0)[0] != pa.point(0)[0]));
}

TEST_CASE("poisson density closed form and normalization") {
  const Window w({{0.0, 2.0}, {0.0, 1.0}});
  PointPattern empty(2);
  CHECK(poisson_density(empty, 1.0, w) == doctest::Approx(1.0));
  CHECK(poisson_density(empty, 0.7, w) == doctest::Approx(std::exp(0.3 * 2.0)));
  PointPattern two(2);
  two.add(std::vector<double>{0.5, 0.5});
  two.add(std::vector<double>{1.5, 0.5});
  CHECK(poisson_density(two, 1.0, w) == doctest::Approx(1.0));
  CHECK(poisson_density(two, 0.0, w) == 0.0);
  CHECK(poisson_density(empty, 0.0, w) == doctest::Approx(std::exp(2.0)));
  // Densities integrate to one under the unit-intensity reference law.
  RngStream rng(104, 0);
  const double a = 1.6;
  const std::size_t reps = 20000;
  double sum = 0.0, sumsq = 0.0;
  for (std::size_t i = 0; i < reps; ++i) {
    const double v = poisson_density(sample_poisson(w, 1.0, rng), a, w);
    sum += v;
    sumsq += v * v;
  }
  const double mean = sum / reps;
  const double se = std::sqrt((sumsq / reps - mean * mean) / reps);
  CHECK(std::abs(mean - 1.0) < 3.0 * se);
}

TEST_CASE("boolean model refuses an unpadded region and covers correctly") {
  RngStream rng(105, 0);
  const BooleanModel model{2, 3.0, RadiusLaw::deterministic(0.2), Norm::euclidean};
  const Window inner = Window::unit_cube(2);
  CHECK_THROWS_AS(sample_boolean_model(model, inner, rng), std::invalid_argument);
  CHECK_THROWS_AS(sample_boolean_model(model, inner.halo(0.1), rng), std::invalid_argument);
  const BooleanGrains grains = sample_boolean_model(model, inner.halo(0.2), rng);
  for (std::size_t i = 0; i < grains.centers.size(); ++i) {
    CHECK(grains.radii[i] == doctest::Approx(0.2));
    CHECK(grains.covers(grains.centers.point(i)));
  }
}

TEST_CASE("boolean model with zero intensity covers nothing") {
  RngStream rng(106, 0);
  const BooleanModel model{2, 0.0, RadiusLaw::deterministic(0.3), Norm::euclidean};
  const BooleanGrains grains = sample_boolean_model(model, Window::unit_cube(2).halo(0.3), rng);
  CHECK(grains.centers.empty());
  const std::vector<double> x{0.5, 0.5};
  CHECK_FALSE(grains.covers(x));
}

TEST_CASE("empirical coverage matches the capacity functional") {
  RngStream rng(107, 0);
  const BooleanModel model{
      2, 2.0, RadiusLaw::discrete({{0.1, 0.5}, {0.3, 0.5}}), Norm::euclidean};
  const Window inner = Window::unit_cube(2);
  const Window region = inner.halo(model.radii.max_radius());
  const double expected = capacity_functional(model);
  const std::size_t reps = 20000;
  double covered = 0.0;
  std::vector<double> x(2);
  for (std::size_t i = 0; i < reps; ++i) {
    const BooleanGrains grains = sample_boolean_model(model, region, rng);
    inner.sample_point(rng, x);
    if (grains.covers(x)) covered += 1.0;
  }
  const double p = covered / reps;
  const double se = std::sqrt(expected * (1.0 - expected) / reps);
  CHECK(std::abs(p - expected) < 3.0 * se);
}

TEST_CASE("strauss log density direct substitutions") {
  const Window w = Window::unit_cube(2);
  StraussParams params{2.0, 0.5, 0.2, w, Norm::euclidean};
  PointPattern empty(2);
  CHECK(strauss_log_density_unnormalized(empty, params) == doctest::Approx(0.0));
  PointPattern two(2);
  two.add(std::vector<double>{0.40, 0.5});
  two.add(std::vector<double>{0.50, 0.5});  // distance 0.1 = range/2
  CHECK(strauss_log_density_unnormalized(two, params) ==
        doctest::Approx(2.0 * std::log(2.0) + std::log(0.5)));
  StraussParams poisson_like{2.0, 1.0, 0.2, w, Norm::euclidean};
  CHECK(strauss_log_density_unnormalized(two, poisson_like) ==
        doctest::Approx(2.0 * std::log(2.0)));
}

TEST_CASE("kappa estimator matches the closed form at gamma 1") {
  const Window w = Window::unit_cube(2);
  StraussParams params{1.5, 1.0, 0.1, w, Norm::euclidean};
  RngStream rng(108, 0);
  const KappaEstimate est = estimate_strauss_kappa(params, 20000, rng);
  const double exact = std::exp((1.0 - 1.5) * w.volume());
  CHECK(std::abs(est.value - exact) < 3.0 * est.std_error);
  // lambda = gamma = 1 reduces to the reference process itself.
  StraussParams unit{1.0, 1.0, 0.1, w, Norm::euclidean};
  RngStream rng2(109, 0);
  const KappaEstimate one = estimate_strauss_kappa(unit, 10000, rng2);
  CHECK(one.value == doctest::Approx(1.0));
  CHECK(one.degenerate_variance);
  CHECK_THROWS_AS(estimate_strauss_kappa(params, 500, rng), std::invalid_argument);
}

TEST_CASE("kappa estimator is stable across disjoint seeds") {
  const Window w = Window::unit_cube(2);
  StraussParams params{1.5, 0.5, 0.15, w, Norm::euclidean};
  RngStream rng_a(110, 0), rng_b(111, 0);
  const KappaEstimate a = estimate_strauss_kappa(params, 40000, rng_a);
  const KappaEstimate b = estimate_strauss_kappa(params, 40000, rng_b);
  const double joint = std::sqrt(a.std_error * a.std_error + b.std_error * b.std_error);
  CHECK(std::abs(a.value - b.value) < 3.0 * joint);
}

TEST_CASE("strauss chain at gamma 1 matches the Poisson count law") {
  const Window w = Window::unit_cube(2);
  StraussParams params{4.0, 1.0, 0.1, w, Norm::euclidean};
  const std::size_t steps = strauss_default_steps(params) * 5;
  RngStream rng(112, 0);
  const std::size_t reps = 400;
  double sum = 0.0;
  for (std::size_t i = 0; i < reps; ++i) {
    RngStream chain = rng.substream(i);
    sum += static_cast<double>(sample_strauss(params, steps, chain).size());
  }
  const double mean = sum / reps;
  // Poisson(4): mean 4, sd 2. Chains are independent, so SE = 2 / sqrt(reps).
  CHECK(std::abs(mean - 4.0) < 3.5 * 2.0 / std::sqrt(static_cast<double>(reps)));
}

TEST_CASE("hard-core mode never produces close pairs") {
  const Window w = Window::unit_cube(2);
  StraussParams params{30.0, 0.0, 0.1, w, Norm::euclidean};
  RngStream rng(113, 0);
  for (int i = 0; i < 30; ++i) {
    RngStream chain = rng.substream(i);
    const PointPattern p = sample_strauss(params, strauss_default_steps(params), chain);
    CHECK(close_pair_count(p, params.range, params.norm) == 0);
  }
}

TEST_CASE("close-pair count decreases as gamma decreases") {
  const Window w = Window::unit_cube(2);
  RngStream rng(114, 0);
  double prev = std::numeric_limits<double>::infinity();
  int idx = 0;
  for (double gamma : {1.0, 0.5, 0.1}) {
    StraussParams params{25.0, gamma, 0.1, w, Norm::euclidean};
    const std::size_t steps = strauss_default_steps(params) * 2;
    double pairs = 0.0;
    const std::size_t reps = 150;
    for (std::size_t i = 0; i < reps; ++i) {
      RngStream chain = rng.substream(1000 * ++idx + static_cast<int>(i));
      pairs += static_cast<double>(
          close_pair_count(sample_strauss(params, steps, chain), 0.1, Norm::euclidean));
    }
    pairs /= reps;
    CHECK(pairs < prev);
    prev = pairs;
  }
}

TEST_CASE("strauss diagnostics report the acceptance rate") {
  const Window w = Window::unit_cube(2);
  StraussParams params{5.0, 0.8, 0.1, w, Norm::euclidean};
  RngStream rng(115, 0);
  StraussDiagnostics diag;
  sample_strauss(params, strauss_default_steps(params), rng, &diag);
  CHECK(diag.steps == strauss_default_steps(params));
  CHECK(diag.acceptance_rate >= 0.0);
  CHECK(diag.acceptance_rate <= 1.0);
  CHECK_THROWS_AS(sample_strauss(params, 10, rng), std::invalid_argument);
}
