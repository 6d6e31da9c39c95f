#include "ppthin/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace ppthin {

double norm_value(Norm norm, std::span<const double> x) {
  if (norm == Norm::euclidean) {
    double s = 0.0;
    for (double v : x) s += v * v;
    return std::sqrt(s);
  }
  double m = 0.0;
  for (double v : x) m = std::max(m, std::abs(v));
  return m;
}

double squared_euclidean(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) {
    const double d = a[k] - b[k];
    s += d * d;
  }
  return s;
}

double distance(Norm norm, std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw std::invalid_argument("distance: dimension mismatch");
  if (norm == Norm::euclidean) return std::sqrt(squared_euclidean(a, b));
  double m = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) m = std::max(m, std::abs(a[k] - b[k]));
  return m;
}

double unit_ball_volume(Norm norm, int dim) {
  if (dim < 1) throw std::invalid_argument("unit_ball_volume: dim must be >= 1");
  if (norm == Norm::sup) return std::pow(2.0, dim);
  return std::pow(std::numbers::pi, 0.5 * dim) / std::tgamma(0.5 * dim + 1.0);
}

double ball_volume(Norm norm, int dim, double radius) {
  if (radius < 0.0) throw std::invalid_argument("ball_volume: radius must be >= 0");
  return unit_ball_volume(norm, dim) * std::pow(radius, dim);
}

namespace {

bool in_ball(Norm norm, std::span<const double> x, std::span<const double> center, double r) {
  if (norm == Norm::euclidean) return squared_euclidean(x, center) <= r * r;
  for (std::size_t k = 0; k < x.size(); ++k)
    if (std::abs(x[k] - center[k]) > r) return false;
  return true;
}

}  // namespace

McVolume ball_volume_mc(Norm norm, int dim, double radius, std::size_t samples, RngStream& rng) {
  if (radius < 0.0) throw std::invalid_argument("ball_volume_mc: radius must be >= 0");
  if (samples == 0) throw std::invalid_argument("ball_volume_mc: samples must be positive");
  // Hit-or-miss over the bounding cube [-r, r]^D.
  const double box = std::pow(2.0 * radius, dim);
  std::vector<double> x(dim);
  const std::vector<double> origin(dim, 0.0);
  std::size_t hits = 0;
  for (std::size_t i = 0; i < samples; ++i) {
    for (int k = 0; k < dim; ++k) x[k] = rng.uniform(-radius, radius);
    if (in_ball(norm, x, origin, radius)) ++hits;
  }
  const double p = static_cast<double>(hits) / static_cast<double>(samples);
  McVolume out;
  out.value = box * p;
  out.std_error = box * std::sqrt(p * (1.0 - p) / static_cast<double>(samples));
  out.samples = samples;
  return out;
}

bool ball_overlap_exact_supported(Norm norm, int dim) {
  if (norm == Norm::sup) return true;
  return dim >= 1 && dim <= 3;
}

double ball_intersection_volume(Norm norm, int dim, std::span<const double> offset, double radius) {
  if (static_cast<int>(offset.size()) != dim)
    throw std::invalid_argument("ball_intersection_volume: offset dimension mismatch");
  if (radius < 0.0) throw std::invalid_argument("ball_intersection_volume: radius must be >= 0");
  if (radius == 0.0) return 0.0;
  if (norm == Norm::sup) {
    double v = 1.0;
    for (double y : offset) v *= std::max(0.0, 2.0 * radius - std::abs(y));
    return v;
  }
  const double s = norm_value(Norm::euclidean, offset);
  if (s >= 2.0 * radius) return 0.0;
  switch (dim) {
    case 1:
      return 2.0 * radius - s;
    case 2: {
      const double half = 0.5 * s;
      return 2.0 * radius * radius * std::acos(half / radius) -
             half * std::sqrt(4.0 * radius * radius - s * s);
    }
    case 3: {
      // Lens of two equal spheres at center distance s.
      const double d = 2.0 * radius - s;
      return std::numbers::pi * d * d * (4.0 * radius + s) / 12.0;
    }
    default:
      throw std::invalid_argument("ball_intersection_volume: no closed form for Euclidean dim > 3");
  }
}

McVolume union_ball_volume_mc(Norm norm, int dim, std::span<const double> offset, double radius,
                              std::size_t samples, RngStream& rng) {
  if (samples == 0) throw std::invalid_argument("union_ball_volume_mc: samples must be positive");
  // Bounding box of B(0,r) ∪ B(y,r).
  std::vector<double> lo(dim), hi(dim);
  double box = 1.0;
  for (int k = 0; k < dim; ++k) {
    lo[k] = std::min(0.0, offset[k]) - radius;
    hi[k] = std::max(0.0, offset[k]) + radius;
    box *= hi[k] - lo[k];
  }
  const std::vector<double> origin(dim, 0.0);
  std::vector<double> x(dim);
  std::size_t hits = 0;
  for (std::size_t i = 0; i < samples; ++i) {
    for (int k = 0; k < dim; ++k) x[k] = rng.uniform(lo[k], hi[k]);
    if (in_ball(norm, x, origin, radius) || in_ball(norm, x, offset, radius)) ++hits;
  }
  const double p = static_cast<double>(hits) / static_cast<double>(samples);
  McVolume out;
  out.value = box * p;
  out.std_error = box * std::sqrt(p * (1.0 - p) / static_cast<double>(samples));
  out.samples = samples;
  return out;
}

double union_ball_volume(Norm norm, int dim, std::span<const double> offset, double radius,
                         std::size_t mc_samples, std::uint64_t mc_seed) {
  if (radius <= 0.0) throw std::invalid_argument("union_ball_volume: radius must be positive");
  const double single = ball_volume(norm, dim, radius);
  if (ball_overlap_exact_supported(norm, dim))
    return 2.0 * single - ball_intersection_volume(norm, dim, offset, radius);
  RngStream rng(mc_seed, 0);
  const McVolume mc = union_ball_volume_mc(norm, dim, offset, radius, mc_samples, rng);
  // The union always lies between one ball and two disjoint balls.
  return std::clamp(mc.value, single, 2.0 * single);
}

Window::Window(std::vector<Interval> bounds) : bounds_(std::move(bounds)) {
  if (bounds_.empty()) throw std::invalid_argument("Window: dimension must be >= 1");
  for (const Interval& iv : bounds_)
    if (!(iv.hi >= iv.lo)) throw std::invalid_argument("Window: interval with hi < lo");
}

Window Window::unit_cube(int dim) {
  if (dim < 1) throw std::invalid_argument("Window::unit_cube: dim must be >= 1");
  return Window(std::vector<Interval>(dim, Interval{0.0, 1.0}));
}

double Window::volume() const {
  double v = 1.0;
  for (const Interval& iv : bounds_) v *= iv.length();
  return v;
}

bool Window::contains(std::span<const double> x) const {
  if (static_cast<int>(x.size()) != dim()) return false;
  for (int k = 0; k < dim(); ++k)
    if (x[k] < bounds_[k].lo || x[k] > bounds_[k].hi) return false;
  return true;
}

Window Window::halo(double pad) const {
  if (pad < 0.0) throw std::invalid_argument("Window::halo: pad must be >= 0");
  std::vector<Interval> grown = bounds_;
  for (Interval& iv : grown) {
    iv.lo -= pad;
    iv.hi += pad;
  }
  Window out(std::move(grown));
  out.halo_pad_ = pad;
  out.inner_bounds_ = bounds_;
  return out;
}

Window Window::inner() const {
  if (!halo_pad_) throw std::logic_error("Window::inner: not a halo window");
  return Window(inner_bounds_);
}

bool Window::covers_halo_of(const Window& inner, double pad) const {
  if (inner.dim() != dim()) return false;
  constexpr double kTol = 1e-12;
  for (int k = 0; k < dim(); ++k) {
    if (bounds_[k].lo > inner.bounds_[k].lo - pad + kTol) return false;
    if (bounds_[k].hi < inner.bounds_[k].hi + pad - kTol) return false;
  }
  return true;
}

void Window::sample_point(RngStream& rng, std::span<double> out) const {
  for (int k = 0; k < dim(); ++k) out[k] = rng.uniform(bounds_[k].lo, bounds_[k].hi);
}

}  // namespace ppthin
