#include "ppthin/simulate.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace ppthin {

RadiusLaw RadiusLaw::deterministic(double r) {
  if (r < 0.0) throw std::invalid_argument("RadiusLaw: radius must be >= 0");
  RadiusLaw law;
  law.atoms_ = {{r, 1.0}};
  return law;
}

RadiusLaw RadiusLaw::discrete(std::vector<std::pair<double, double>> atoms) {
  if (atoms.empty()) throw std::invalid_argument("RadiusLaw: needs at least one atom");
  double total = 0.0;
  for (const auto& [r, p] : atoms) {
    if (r < 0.0) throw std::invalid_argument("RadiusLaw: radius must be >= 0");
    if (p < 0.0) throw std::invalid_argument("RadiusLaw: probability must be >= 0");
    total += p;
  }
  if (std::abs(total - 1.0) > 1e-9)
    throw std::invalid_argument("RadiusLaw: probabilities must sum to 1");
  RadiusLaw law;
  law.atoms_ = std::move(atoms);
  return law;
}

double RadiusLaw::max_radius() const {
  double m = 0.0;
  for (const auto& [r, p] : atoms_)
    if (p > 0.0) m = std::max(m, r);
  return m;
}

double RadiusLaw::moment(int order) const {
  double m = 0.0;
  for (const auto& [r, p] : atoms_) m += p * std::pow(r, order);
  return m;
}

double RadiusLaw::sample(RngStream& rng) const {
  if (atoms_.size() == 1) return atoms_[0].first;
  double u = rng.uniform();
  for (const auto& [r, p] : atoms_) {
    if (u < p) return r;
    u -= p;
  }
  return atoms_.back().first;
}

bool BooleanGrains::covers(std::span<const double> x) const {
  for (std::size_t i = 0; i < centers.size(); ++i)
    if (distance(norm, x, centers.point(i)) <= radii[i]) return true;
  return false;
}

PointPattern sample_poisson(const Window& window, double intensity, RngStream& rng) {
  if (intensity < 0.0) throw std::invalid_argument("sample_poisson: intensity must be >= 0");
  PointPattern out(window.dim());
  const double mean = intensity * window.volume();
  if (mean == 0.0) return out;
  const std::uint64_t n = rng.poisson(mean);
  std::vector<double> p(window.dim());
  for (std::uint64_t i = 0; i < n; ++i) {
    window.sample_point(rng, p);
    out.add(p);
  }
  out.sort_canonical();
  return out;
}

double log_poisson_density(const PointPattern& pattern, double a, const Window& window) {
  if (a < 0.0) throw std::invalid_argument("poisson_density: intensity must be >= 0");
  const double vol = window.volume();
  if (a == 0.0)
    return pattern.empty() ? vol : -std::numeric_limits<double>::infinity();
  return (1.0 - a) * vol + static_cast<double>(pattern.size()) * std::log(a);
}

double poisson_density(const PointPattern& pattern, double a, const Window& window) {
  return std::exp(log_poisson_density(pattern, a, window));
}

BooleanGrains sample_boolean_model(const BooleanModel& model, const Window& region,
                                   RngStream& rng) {
  if (model.germ_intensity < 0.0)
    throw std::invalid_argument("sample_boolean_model: germ intensity must be >= 0");
  if (region.dim() != model.dim)
    throw std::invalid_argument("sample_boolean_model: window dimension mismatch");
  // Edge grains silently missing would bias coverage, so an unpadded region
  // is refused outright.
  if (!region.is_halo() || region.halo_pad() + 1e-12 < model.radii.max_radius())
    throw std::invalid_argument(
        "sample_boolean_model: region must be a halo window padded by at least the maximal grain "
        "radius");
  BooleanGrains grains{PointPattern(model.dim), {}, model.norm};
  grains.centers = sample_poisson(region, model.germ_intensity, rng);
  grains.radii.reserve(grains.centers.size());
  for (std::size_t i = 0; i < grains.centers.size(); ++i)
    grains.radii.push_back(model.radii.sample(rng));
  return grains;
}

std::size_t close_pair_count(const PointPattern& pattern, double range, Norm norm) {
  return pair_count(pattern, range, norm) / 2;
}

double strauss_log_density_unnormalized(const PointPattern& pattern, const StraussParams& params) {
  if (params.lambda <= 0.0) throw std::invalid_argument("strauss: lambda must be positive");
  if (params.gamma < 0.0 || params.gamma > 1.0)
    throw std::invalid_argument("strauss: gamma must lie in [0, 1]");
  const std::size_t n = pattern.size();
  const std::size_t c = close_pair_count(pattern, params.range, params.norm);
  if (params.gamma == 0.0) {
    if (c > 0) return -std::numeric_limits<double>::infinity();
    return static_cast<double>(n) * std::log(params.lambda);
  }
  return static_cast<double>(n) * std::log(params.lambda) +
         static_cast<double>(c) * std::log(params.gamma);
}

KappaEstimate estimate_strauss_kappa(const StraussParams& params, std::size_t replicates,
                                     RngStream& rng) {
  if (replicates < 10000)
    throw std::invalid_argument("estimate_strauss_kappa: needs at least 10^4 replicates");
  double sum = 0.0, sumsq = 0.0;
  for (std::size_t i = 0; i < replicates; ++i) {
    const PointPattern eta = sample_poisson(params.window, 1.0, rng);
    const double x = std::exp(strauss_log_density_unnormalized(eta, params));
    sum += x;
    sumsq += x * x;
  }
  const double n = static_cast<double>(replicates);
  const double mean = sum / n;
  const double var = std::max(0.0, sumsq / n - mean * mean) * n / (n - 1.0);
  KappaEstimate out;
  out.replicates = replicates;
  if (mean <= 0.0) throw std::runtime_error("estimate_strauss_kappa: degenerate sample mean");
  out.value = 1.0 / mean;
  // Delta method for 1/mean.
  out.std_error = std::sqrt(var / n) / (mean * mean);
  out.degenerate_variance = var == 0.0;
  return out;
}

std::size_t strauss_default_steps(const StraussParams& params) {
  const double v = params.lambda * params.window.volume();
  return std::max<std::size_t>(200, static_cast<std::size_t>(std::ceil(10.0 * v)));
}

std::size_t strauss_thinning_interval(const StraussParams& params) {
  const double v = params.lambda * params.window.volume();
  return std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(v)));
}

namespace {

// Close pairs a new point at x would create against the current pattern.
std::size_t pairs_with(const PointPattern& pattern, std::span<const double> x, double range,
                       Norm norm) {
  std::size_t c = 0;
  for (std::size_t i = 0; i < pattern.size(); ++i)
    if (distance(norm, pattern.point(i), x) <= range) ++c;
  return c;
}

std::size_t pairs_of(const PointPattern& pattern, std::size_t i, double range, Norm norm) {
  std::size_t c = 0;
  for (std::size_t j = 0; j < pattern.size(); ++j)
    if (j != i && distance(norm, pattern.point(i), pattern.point(j)) <= range) ++c;
  return c;
}

}  // namespace

PointPattern sample_strauss(const StraussParams& params, std::size_t mcmc_steps, RngStream& rng,
                            StraussDiagnostics* diagnostics) {
  if (params.gamma < 0.0 || params.gamma > 1.0)
    throw std::invalid_argument("sample_strauss: gamma must lie in [0, 1]");
  if (mcmc_steps < strauss_default_steps(params))
    throw std::invalid_argument("sample_strauss: mcmc_steps below the default burn-in");
  const double volume = params.window.volume();
  if (volume <= 0.0) throw std::invalid_argument("sample_strauss: window must have volume > 0");
  PointPattern state(params.window.dim());
  std::vector<double> candidate(params.window.dim());
  std::size_t accepted = 0;
  for (std::size_t step = 0; step < mcmc_steps; ++step) {
    const bool birth = rng.uniform() < 0.5;
    if (birth) {
      params.window.sample_point(rng, candidate);
      const std::size_t dc = pairs_with(state, candidate, params.range, params.norm);
      double ratio;
      if (params.gamma == 0.0) {
        ratio = dc > 0 ? 0.0
                       : params.lambda * volume / static_cast<double>(state.size() + 1);
      } else {
        ratio = params.lambda * std::pow(params.gamma, static_cast<double>(dc)) * volume /
                static_cast<double>(state.size() + 1);
      }
      if (rng.uniform() < std::min(1.0, ratio)) {
        state.add(candidate);
        ++accepted;
      }
    } else if (!state.empty()) {
      const std::size_t i = rng.uniform_index(state.size());
      const std::size_t dc = pairs_of(state, i, params.range, params.norm);
      double ratio;
      if (params.gamma == 0.0) {
        // Reachable states have no close pairs, so dc == 0 here.
        ratio = static_cast<double>(state.size()) / (params.lambda * volume);
      } else {
        ratio = static_cast<double>(state.size()) /
                (params.lambda * std::pow(params.gamma, static_cast<double>(dc)) * volume);
      }
      if (rng.uniform() < std::min(1.0, ratio)) {
        state.remove(i);
        ++accepted;
      }
    }
  }
  if (diagnostics) {
    diagnostics->steps = mcmc_steps;
    diagnostics->acceptance_rate =
        static_cast<double>(accepted) / static_cast<double>(mcmc_steps);
    diagnostics->acceptance_warning =
        diagnostics->acceptance_rate < 0.05 || diagnostics->acceptance_rate > 0.95;
  }
  state.sort_canonical();
  return state;
}

}  // namespace ppthin
