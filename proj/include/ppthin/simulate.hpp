#pragma once

#include <cstddef>
#include <utility>
#include <vector>

#include "ppthin/geometry.hpp"
#include "ppthin/pattern.hpp"
#include "ppthin/rng.hpp"

namespace ppthin {

/// Grain-radius law: deterministic or finite discrete, so that moments and
/// the essential sup are exactly computable.
class RadiusLaw {
 public:
  static RadiusLaw deterministic(double r);
  static RadiusLaw discrete(std::vector<std::pair<double, double>> atoms);  // (radius, prob)

  const std::vector<std::pair<double, double>>& atoms() const { return atoms_; }
  double max_radius() const;            // essential sup
  double moment(int order) const;       // E R^order
  double sample(RngStream& rng) const;

 private:
  std::vector<std::pair<double, double>> atoms_;
};

/// Stationary Boolean model: Poisson germs of the given intensity, i.i.d.
/// ball grains in the given norm.
struct BooleanModel {
  int dim = 2;
  double germ_intensity = 1.0;
  RadiusLaw radii = RadiusLaw::deterministic(0.1);
  Norm norm = Norm::euclidean;
};

/// One realized Boolean model: germ centers with their radii.
struct BooleanGrains {
  PointPattern centers;
  std::vector<double> radii;
  Norm norm = Norm::euclidean;

  bool covers(std::span<const double> x) const;
};

/// Homogeneous Poisson pattern on the window: Poisson(intensity * volume)
/// points placed i.i.d. uniformly. Returned in canonical order.
PointPattern sample_poisson(const Window& window, double intensity, RngStream& rng);

/// Density of the Poisson process with intensity a relative to the
/// unit-intensity Poisson process on the window:
/// exp((1 - a) * volume) * a^n. Computed in log space.
double poisson_density(const PointPattern& pattern, double a, const Window& window);
/// log of the above; -inf when a == 0 and the pattern is nonempty.
double log_poisson_density(const PointPattern& pattern, double a, const Window& window);

/// Samples grains whose germs fall in `region`. The region must be a halo
/// window with padding at least the maximal grain radius, so no grain that
/// could cover the inner region is missed.
BooleanGrains sample_boolean_model(const BooleanModel& model, const Window& region, RngStream& rng);

/// Pairwise-interaction process with density proportional to
/// lambda^n * gamma^{c(pattern)}, where c counts unordered pairs closer than
/// `range`. gamma in (0,1]; gamma == 0 is the hard-core limit mode.
struct StraussParams {
  double lambda = 1.0;
  double gamma = 1.0;
  double range = 0.1;
  Window window = Window::unit_cube(2);
  Norm norm = Norm::euclidean;
};

/// Unordered close-pair count c(pattern).
std::size_t close_pair_count(const PointPattern& pattern, double range, Norm norm);

/// n * log(lambda) + c * log(gamma); -inf in the hard-core mode when c > 0.
double strauss_log_density_unnormalized(const PointPattern& pattern, const StraussParams& params);

struct KappaEstimate {
  double value = 0.0;
  double std_error = 0.0;
  bool degenerate_variance = false;
  std::size_t replicates = 0;
};

/// Normalizing constant of the Strauss density, estimated from
/// 1 / mean(exp(log-density)) over unit-intensity Poisson draws; standard
/// error by the delta method. Needs replicates >= 10^4.
KappaEstimate estimate_strauss_kappa(const StraussParams& params, std::size_t replicates,
                                     RngStream& rng);

struct StraussDiagnostics {
  double acceptance_rate = 0.0;
  std::size_t steps = 0;
  bool acceptance_warning = false;  // rate outside [0.05, 0.95]
};

/// Default burn-in: 10 * lambda * volume steps (at least 200).
std::size_t strauss_default_steps(const StraussParams& params);
/// Suggested spacing between dependent samples: lambda * volume steps.
std::size_t strauss_thinning_interval(const StraussParams& params);

/// Birth-death Metropolis-Hastings chain from the empty pattern; returns the
/// state after mcmc_steps steps (must be at least the default burn-in).
PointPattern sample_strauss(const StraussParams& params, std::size_t mcmc_steps, RngStream& rng,
                            StraussDiagnostics* diagnostics = nullptr);

}  // namespace ppthin
