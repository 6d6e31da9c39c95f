#include "ppthin/pattern.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include "ppthin/assignment.hpp"

namespace ppthin {

PointPattern::PointPattern(int dim) : dim_(dim) {
  if (dim < 1) throw std::invalid_argument("PointPattern: dim must be >= 1");
}

void PointPattern::add(std::span<const double> p) {
  if (static_cast<int>(p.size()) != dim_)
    throw std::invalid_argument("PointPattern::add: dimension mismatch");
  coords_.insert(coords_.end(), p.begin(), p.end());
}

void PointPattern::remove(std::size_t i) {
  if (i >= size()) throw std::out_of_range("PointPattern::remove: index out of range");
  coords_.erase(coords_.begin() + static_cast<std::ptrdiff_t>(i * dim_),
                coords_.begin() + static_cast<std::ptrdiff_t>((i + 1) * dim_));
}

void PointPattern::sort_canonical() {
  const std::size_t n = size();
  std::vector<std::size_t> order(n);
  for (std::size_t i = 0; i < n; ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    const std::span<const double> pa = point(a), pb = point(b);
    return std::lexicographical_compare(pa.begin(), pa.end(), pb.begin(), pb.end());
  });
  std::vector<double> sorted;
  sorted.reserve(coords_.size());
  for (std::size_t i : order) {
    const std::span<const double> p = point(i);
    sorted.insert(sorted.end(), p.begin(), p.end());
  }
  coords_ = std::move(sorted);
}

bool PointPattern::is_simple() const {
  const std::size_t n = size();
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) {
      const std::span<const double> a = point(i), b = point(j);
      if (std::equal(a.begin(), a.end(), b.begin())) return false;
    }
  return true;
}

std::size_t pair_count(const PointPattern& pattern, double rbar, Norm norm) {
  if (rbar < 0.0) throw std::invalid_argument("pair_count: rbar must be >= 0");
  const std::size_t n = pattern.size();
  std::size_t unordered = 0;
  if (norm == Norm::euclidean) {
    const double r2 = rbar * rbar;
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = i + 1; j < n; ++j)
        if (squared_euclidean(pattern.point(i), pattern.point(j)) <= r2) ++unordered;
  } else {
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = i + 1; j < n; ++j)
        if (distance(norm, pattern.point(i), pattern.point(j)) <= rbar) ++unordered;
  }
  return 2 * unordered;
}

PointPattern contract(const PointPattern& pattern, double scale) {
  if (scale < 1.0) throw std::invalid_argument("contract: scale must be >= 1");
  PointPattern out(pattern.dim());
  std::vector<double> p(pattern.dim());
  for (std::size_t i = 0; i < pattern.size(); ++i) {
    const std::span<const double> src = pattern.point(i);
    for (int k = 0; k < pattern.dim(); ++k) p[k] = src[k] / scale;
    out.add(p);
  }
  return out;
}

double BoundedMetric::operator()(std::span<const double> a, std::span<const double> b) const {
  return std::min(distance(base, a, b), cap);
}

double d1_distance(const PointPattern& a, const PointPattern& b, const BoundedMetric& d0,
                   std::size_t max_points) {
  if (a.size() != b.size()) return 1.0;
  const std::size_t n = a.size();
  if (n == 0) return 0.0;
  if (n > max_points)
    throw std::invalid_argument("d1_distance: pattern exceeds the exact-solver size cap");
  if (a.dim() != b.dim()) throw std::invalid_argument("d1_distance: dimension mismatch");
  std::vector<double> cost(n * n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) cost[i * n + j] = d0(a.point(i), b.point(j));
  return min_cost_assignment(cost, n) / static_cast<double>(n);
}

void write_pattern_csv(std::ostream& os, const PointPattern& pattern) {
  for (int k = 0; k < pattern.dim(); ++k) os << (k ? "," : "") << "x" << (k + 1);
  os << "\n";
  os.precision(17);
  for (std::size_t i = 0; i < pattern.size(); ++i) {
    const std::span<const double> p = pattern.point(i);
    for (int k = 0; k < pattern.dim(); ++k) os << (k ? "," : "") << p[k];
    os << "\n";
  }
}

void write_pattern_csv_file(const std::string& path, const PointPattern& pattern) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot open for writing: " + path);
  write_pattern_csv(os, pattern);
}

PointPattern read_pattern_csv(std::istream& is) {
  std::string line;
  if (!std::getline(is, line)) throw std::runtime_error("pattern CSV: missing header");
  int dim = 1;
  for (char c : line)
    if (c == ',') ++dim;
  PointPattern out(dim);
  std::vector<double> p(dim);
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::string cell;
    for (int k = 0; k < dim; ++k) {
      if (!std::getline(ss, cell, ',')) throw std::runtime_error("pattern CSV: short row");
      p[k] = std::stod(cell);
    }
    out.add(p);
  }
  return out;
}

PointPattern read_pattern_csv_file(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw std::runtime_error("cannot open for reading: " + path);
  return read_pattern_csv(is);
}

}  // namespace ppthin
