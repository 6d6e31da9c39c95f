#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "ppthin/rng.hpp"

namespace ppthin {

/// Norm generating the ball metric on R^D.
enum class Norm { euclidean, sup };

double norm_value(Norm norm, std::span<const double> x);
double distance(Norm norm, std::span<const double> a, std::span<const double> b);
double squared_euclidean(std::span<const double> a, std::span<const double> b);

/// Volume of the unit ball of the norm in dimension dim (alpha_D).
double unit_ball_volume(Norm norm, int dim);
/// Volume of a ball of radius r: alpha_D * r^D.
double ball_volume(Norm norm, int dim, double radius);

struct McVolume {
  double value = 0.0;
  double std_error = 0.0;
  std::size_t samples = 0;
};

/// Hit-or-miss estimate of the ball volume; cross-check for the closed form.
McVolume ball_volume_mc(Norm norm, int dim, double radius, std::size_t samples, RngStream& rng);

/// True when |B(0,r) ∩ B(y,r)| has a closed form for this norm/dimension
/// (Euclidean D<=3, sup-norm any D).
bool ball_overlap_exact_supported(Norm norm, int dim);

/// |B(0,r) ∩ B(y,r)| in closed form; throws when unsupported.
double ball_intersection_volume(Norm norm, int dim, std::span<const double> offset, double radius);

/// |B(0,r) ∪ B(y,r)|. Uses the closed form when available, otherwise an
/// internal Monte Carlo fallback with mc_samples draws.
double union_ball_volume(Norm norm, int dim, std::span<const double> offset, double radius,
                         std::size_t mc_samples = 1000000, std::uint64_t mc_seed = 0x9E3779B9ULL);

/// Hit-or-miss estimate of |B(0,r) ∪ B(y,r)| over the bounding box.
McVolume union_ball_volume_mc(Norm norm, int dim, std::span<const double> offset, double radius,
                              std::size_t samples, RngStream& rng);

struct Interval {
  double lo = 0.0;
  double hi = 0.0;
  double length() const { return hi - lo; }
};

/// Compact axis-aligned box, optionally recorded as the halo extension of an
/// inner box (how much padding was added on every axis).
class Window {
 public:
  Window() = default;
  explicit Window(std::vector<Interval> bounds);
  static Window box(std::vector<Interval> bounds) { return Window(std::move(bounds)); }
  /// Unit cube [0,1]^dim.
  static Window unit_cube(int dim);

  int dim() const { return static_cast<int>(bounds_.size()); }
  const std::vector<Interval>& bounds() const { return bounds_; }
  double volume() const;
  bool contains(std::span<const double> x) const;

  /// Axis-expanded window carrying this window as its inner region. The
  /// expansion contains the metric halo B(window, pad) for both norms.
  Window halo(double pad) const;

  bool is_halo() const { return halo_pad_.has_value(); }
  double halo_pad() const { return halo_pad_.value_or(0.0); }
  /// Inner window this halo was built from; only valid when is_halo().
  Window inner() const;

  /// True when this window contains the axis expansion of `inner` by `pad`
  /// (and hence the metric halo of `inner` of radius `pad`).
  bool covers_halo_of(const Window& inner, double pad) const;

  void sample_point(RngStream& rng, std::span<double> out) const;

 private:
  std::vector<Interval> bounds_;
  std::optional<double> halo_pad_;
  std::vector<Interval> inner_bounds_;
};

}  // namespace ppthin
