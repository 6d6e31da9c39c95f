#pragma once

#include <cstddef>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "ppthin/geometry.hpp"

namespace ppthin {

/// Finite simple point pattern in R^D. Points are stored in one flat buffer;
/// canonical order is lexicographic by coordinates, which makes downstream
/// per-point randomness reproducible regardless of construction order.
class PointPattern {
 public:
  explicit PointPattern(int dim);

  int dim() const { return dim_; }
  std::size_t size() const { return coords_.size() / dim_; }
  bool empty() const { return coords_.empty(); }

  std::span<const double> point(std::size_t i) const {
    return {coords_.data() + i * dim_, static_cast<std::size_t>(dim_)};
  }
  std::span<const double> flat() const { return coords_; }

  void add(std::span<const double> p);
  void clear() { coords_.clear(); }
  void remove(std::size_t i);

  /// Sort points lexicographically by coordinates.
  void sort_canonical();
  /// Pairwise-distinct check (simplicity).
  bool is_simple() const;

 private:
  int dim_;
  std::vector<double> coords_;
};

/// Number of ordered pairs (i, j), i != j, with d(s_i, s_j) <= rbar. Ties at
/// exactly rbar count; comparisons use squared norms where possible.
std::size_t pair_count(const PointPattern& pattern, double rbar, Norm norm);

/// Image pattern under x -> x / scale; scale >= 1.
PointPattern contract(const PointPattern& pattern, double scale);

/// Euclidean/sup metric capped at cap: d0(x, y) = min(|x - y|, cap).
struct BoundedMetric {
  Norm base = Norm::euclidean;
  double cap = 1.0;
  double operator()(std::span<const double> a, std::span<const double> b) const;
};

/// Optimal-matching distance between point patterns: 1 across different
/// cardinalities, 0 when both are empty, otherwise the minimum over pairings
/// of the mean d0 cost, solved exactly. Patterns larger than max_points are
/// rejected rather than approximated.
double d1_distance(const PointPattern& a, const PointPattern& b, const BoundedMetric& d0,
                   std::size_t max_points = 512);

void write_pattern_csv(std::ostream& os, const PointPattern& pattern);
void write_pattern_csv_file(const std::string& path, const PointPattern& pattern);
PointPattern read_pattern_csv(std::istream& is);
PointPattern read_pattern_csv_file(const std::string& path);

}  // namespace ppthin
