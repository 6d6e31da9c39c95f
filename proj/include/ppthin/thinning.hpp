#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <string>
#include <variant>
#include <vector>

#include "ppthin/pattern.hpp"
#include "ppthin/simulate.hpp"

namespace ppthin {

/// Constant retention probability p everywhere.
struct ConstantField {
  double p = 1.0;
};

/// Delete points covered by an independently drawn Boolean model; retain the
/// uncovered ones with probability q. grain_region is where germs are drawn
/// and must be padded by the maximal grain radius.
struct BooleanCoverField {
  BooleanModel model;
  double q = 1.0;
  Window grain_region;
};

/// Hard-core competition: a point of the pattern is retained with probability
/// q when it lies in `inner` and has no other pattern point within distance
/// r; it is deleted otherwise (probability 0 outside `inner`).
struct MaternField {
  double r = 0.1;
  double q = 1.0;
  Window inner;
  Norm norm = Norm::euclidean;
};

using RetentionField = std::variant<ConstantField, BooleanCoverField, MaternField>;

/// Per-point retention probabilities for the pattern. The Boolean field draws
/// fresh grains (independent of the pattern); the Matern field is a
/// deterministic function of the pattern and requires the pattern window to
/// cover the halo of the inner window of radius r.
std::vector<double> realize_retention(const RetentionField& field, const PointPattern& pattern,
                                      const Window& pattern_window, RngStream& rng);

/// Matern probabilities (deterministic given the pattern).
std::vector<double> matern_probabilities(const MaternField& field, const PointPattern& pattern);

/// Boolean-cover probabilities for fixed grains: q * [not covered].
std::vector<double> boolean_probabilities(const BooleanGrains& grains, double q,
                                          const PointPattern& pattern);

struct ThinningOutcome {
  PointPattern parent;
  PointPattern retained;
  std::vector<std::uint8_t> decisions;  // decisions[i] == 1 iff point i kept
};

/// Independent per-point coin flips, one uniform per point in pattern order.
ThinningOutcome thin(const PointPattern& pattern, std::span<const double> probabilities,
                     RngStream& rng);

/// Exact law of the retained subset for per-point probabilities: entry m is
/// the probability of keeping exactly the points whose bits are set in m
/// (bit i = point i in pattern order). Needs size <= 20.
std::vector<double> exact_thinning_distribution(const PointPattern& pattern,
                                                std::span<const double> probabilities);

struct McEstimate {
  double value = 0.0;
  double std_error = 0.0;
  std::size_t replicates = 0;
  bool flagged = false;
  std::string flag_reason;
};

/// Monte Carlo estimate of the thinned-process density at `pattern`:
/// exp(volume) * E[ q(pattern | pattern + eta) * base_density(pattern + eta) ]
/// over unit-intensity Poisson draws eta on the domain. q(.|.) is the
/// conditional probability of retaining exactly `pattern` out of the merged
/// pattern; closed form for constant and Matern fields, nested Monte Carlo
/// over grain draws for the Boolean field.
McEstimate thinned_density_mc(const PointPattern& pattern,
                              const std::function<double(const PointPattern&)>& base_density,
                              const RetentionField& field, const Window& domain,
                              std::size_t replicates, RngStream& rng,
                              std::size_t grain_replicates = 64);

struct MomentCheck {
  double lhs_mean = 0.0;   // thinned-pattern statistic
  double rhs_mean = 0.0;   // retention-weighted statistic of the parent
  double gap = 0.0;
  double std_error = 0.0;  // of the paired difference
  double gap_in_se = 0.0;
};

struct MomentCheckReport {
  MomentCheck first_order;   // counts in the region
  MomentCheck second_order;  // ordered close pairs within pair_radius
  std::size_t replicates = 0;
};

/// Paired Monte Carlo check of the first two moment identities of a thinning:
/// E count(retained in A) against E sum of retention probabilities in A, and
/// the analogous ordered-pair comparison within pair_radius.
MomentCheckReport check_thinning_moments(const std::function<PointPattern(RngStream&)>& sampler,
                                         const RetentionField& field, const Window& pattern_window,
                                         const Window& count_region, double pair_radius,
                                         std::size_t replicates, RngStream& rng);

/// Pattern CSV plus a `retained` 0/1 column.
void write_thinning_csv(std::ostream& os, const ThinningOutcome& outcome);
ThinningOutcome read_thinning_csv(std::istream& is);

}  // namespace ppthin
