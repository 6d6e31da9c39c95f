#pragma once

#include <cstddef>
#include <iosfwd>
#include <vector>

#include "ppthin/pattern.hpp"
#include "ppthin/simulate.hpp"

namespace ppthin {

struct SummaryEstimate {
  std::vector<double> r;
  std::vector<double> value;
  std::vector<double> std_error;
  std::size_t replicates = 0;
  bool defined = true;
  std::string flag;
};

/// Reduced-second-moment function estimated from replicated patterns sampled
/// on a window haloed by max(r_grid); first pair coordinate restricted to the
/// inner window (minus sampling), normalized by the known intensity m1.
SummaryEstimate estimate_K(const std::vector<PointPattern>& patterns, double m1,
                           const std::vector<double>& r_grid, Norm norm, const Window& inner,
                           const Window& pattern_window);

/// Nearest-neighbor distance distribution: fraction of inner-window points
/// whose nearest neighbor (within the full haloed pattern) lies within r.
SummaryEstimate estimate_G(const std::vector<PointPattern>& patterns,
                           const std::vector<double>& r_grid, Norm norm, const Window& inner,
                           const Window& pattern_window);

struct G2Estimate {
  double value = 0.0;
  double std_error = 0.0;
  std::size_t qualifying_pairs = 0;
  bool defined = false;
  double bin_tolerance = 0.0;
};

/// Two-point analog of the G function at displacement y: among ordered pairs
/// at displacement within bin_tolerance of y (first point in the inner
/// window), the fraction with some third point in B(s, r) ∪ B(s~, r).
/// bin_tolerance <= 0 selects the default of 5% of |y|.
G2Estimate estimate_G2(const std::vector<PointPattern>& patterns, std::span<const double> y,
                       double r, Norm norm, const Window& inner, const Window& pattern_window,
                       double bin_tolerance = -1.0);

/// Hitting probability of a singleton: 1 - exp(-l1 * E|B(0,R)|).
double capacity_functional(const BooleanModel& model);
/// Hitting probability of a two-point set at the given displacement:
/// 1 - exp(-l1 * E|B(0,R) ∪ B(y,R)|).
double capacity_functional_pair(const BooleanModel& model, std::span<const double> displacement);

/// Mean uncovered overlap fraction E|B(0,R) \ B(y,R)| / E|B(0,R)| in [0, 1].
double b_function(const BooleanModel& model, std::span<const double> y);

void write_summary_csv(std::ostream& os, const SummaryEstimate& estimate);

}  // namespace ppthin
