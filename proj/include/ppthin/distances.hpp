#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "ppthin/bounds.hpp"
#include "ppthin/pattern.hpp"
#include "ppthin/rng.hpp"

namespace ppthin {

/// Law of a nonnegative integer count, truncated where the tail is
/// negligible; tail_mass records what was cut.
struct CountLaw {
  std::vector<double> probs;
  double tail_mass = 0.0;
};

CountLaw poisson_count_law(double mean, double tail_cutoff = 1e-12);
CountLaw empirical_count_law(std::span<const std::uint64_t> counts);

/// Exact total variation distance between two count laws (half the L1
/// distance; truncation tails enter at their cutoff magnitude).
double tv_exact_small(const CountLaw& p, const CountLaw& q);
/// Same on two finite outcome laws over an identical outcome space; sizes
/// must match.
double tv_exact_small(std::span<const double> p, std::span<const double> q);

enum class Direction { lower_bound, exact, upper_bound };

struct EmpiricalDistance {
  double value = 0.0;
  double std_error = 0.0;
  Direction direction = Direction::lower_bound;
  std::string metric;  // "tv" or "d2"
  std::size_t samples = 0;
  bool exact = false;
};

/// Certified lower bound for the total variation distance to the Poisson law
/// with the given mean: exact TV between the empirical count law of the
/// samples and the Poisson count law, with a bootstrap standard error
/// (projection onto counts can only decrease total variation).
EmpiricalDistance tv_counts_lower(std::span<const std::uint64_t> counts, double poisson_mean,
                                  RngStream& rng, std::size_t bootstrap_resamples = 1000,
                                  std::size_t min_samples = 10000);

/// Lower bound for the Wasserstein-type distance via the 1-Lipschitz witness
/// f(pattern) = d1(pattern, anchor): |mean_P f - mean_Q f| with combined
/// standard error. The anchor must be fixed before seeing the samples.
EmpiricalDistance d2_lower_witness(const std::vector<PointPattern>& samples_p,
                                   const std::vector<PointPattern>& samples_q,
                                   const PointPattern& anchor, const BoundedMetric& d0);

/// Test functions for the Poisson exchange-formula check.
enum class ExchangeH { unit, total_count, empty_ball };

struct IdentityReport {
  double lhs = 0.0;
  double rhs = 0.0;
  double lhs_se = 0.0;
  double rhs_se = 0.0;
  bool rhs_exact = false;
  double gap = 0.0;
  double joint_se = 0.0;
  double gap_in_se = 0.0;
  std::size_t replicates = 0;
};

/// Monte Carlo check of the Poisson exchange identity
/// E ∫ h(x, eta - delta_x) eta(dx) = ∫ E h(x, eta) lambda dx
/// for the catalog function; ball_radius only matters for empty_ball.
IdentityReport check_slivnyak_mecke(double intensity, const Window& window, ExchangeH h,
                                    double ball_radius, std::size_t replicates, RngStream& rng);

struct CertificateEntry {
  std::string metric;
  double bound = 0.0;
  double estimate = 0.0;
  double std_error = 0.0;
  bool pass = false;
  bool uninformative = false;  // bound >= 1 certifies nothing
};

struct Certificate {
  std::uint64_t config_hash = 0;
  std::vector<CertificateEntry> entries;
  bool pass = false;

  std::string to_json_string() const;
};

struct CertificationSamples {
  std::span<const std::uint64_t> counts;  // retained counts of the thinned process
  const std::vector<PointPattern>* thinned_patterns = nullptr;  // optional d2 inputs
  const std::vector<PointPattern>* poisson_patterns = nullptr;
  const PointPattern* anchor = nullptr;
  BoundedMetric d0;
};

/// Checks every available empirical lower bound against the bound totals:
/// PASS when estimate <= total + 3 SE. A bound total >= 1 is flagged as
/// uninformative (trivially valid). The bound must carry the same config
/// hash as the samples' configuration.
Certificate certify_bound(const BoundReport& bound, std::uint64_t config_hash,
                          const CertificationSamples& samples, RngStream& rng);

}  // namespace ppthin
