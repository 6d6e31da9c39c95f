#include "ppthin/summaries.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>
#include <stdexcept>

namespace ppthin {

namespace {

void check_halo(const Window& pattern_window, const Window& inner, double needed,
                const char* who) {
  if (!pattern_window.covers_halo_of(inner, needed))
    throw std::invalid_argument(std::string(who) +
                                ": pattern window must cover the halo of the inner window");
}

struct MeanSe {
  double mean = 0.0;
  double se = 0.0;
};

MeanSe replicate_mean(const std::vector<double>& xs) {
  const double n = static_cast<double>(xs.size());
  double s = 0.0, ss = 0.0;
  for (double x : xs) {
    s += x;
    ss += x * x;
  }
  MeanSe out;
  out.mean = s / n;
  const double var = std::max(0.0, ss / n - out.mean * out.mean) * n / std::max(1.0, n - 1.0);
  out.se = std::sqrt(var / n);
  return out;
}

}  // namespace

SummaryEstimate estimate_K(const std::vector<PointPattern>& patterns, double m1,
                           const std::vector<double>& r_grid, Norm norm, const Window& inner,
                           const Window& pattern_window) {
  if (m1 <= 0.0) throw std::invalid_argument("estimate_K: m1 must be positive");
  if (patterns.empty()) throw std::invalid_argument("estimate_K: needs replicated patterns");
  const double rmax = *std::max_element(r_grid.begin(), r_grid.end());
  check_halo(pattern_window, inner, rmax, "estimate_K");
  const double denom = m1 * m1 * inner.volume();
  SummaryEstimate out;
  out.r = r_grid;
  out.replicates = patterns.size();
  for (double r : r_grid) {
    std::vector<double> per_rep;
    per_rep.reserve(patterns.size());
    for (const PointPattern& pat : patterns) {
      std::size_t pairs = 0;
      for (std::size_t i = 0; i < pat.size(); ++i) {
        if (!inner.contains(pat.point(i))) continue;
        for (std::size_t j = 0; j < pat.size(); ++j) {
          if (j == i) continue;
          if (distance(norm, pat.point(i), pat.point(j)) <= r) ++pairs;
        }
      }
      per_rep.push_back(static_cast<double>(pairs) / denom);
    }
    const MeanSe m = replicate_mean(per_rep);
    out.value.push_back(m.mean);
    out.std_error.push_back(m.se);
  }
  return out;
}

SummaryEstimate estimate_G(const std::vector<PointPattern>& patterns,
                           const std::vector<double>& r_grid, Norm norm, const Window& inner,
                           const Window& pattern_window) {
  if (patterns.empty()) throw std::invalid_argument("estimate_G: needs replicated patterns");
  const double rmax = *std::max_element(r_grid.begin(), r_grid.end());
  check_halo(pattern_window, inner, rmax, "estimate_G");
  SummaryEstimate out;
  out.r = r_grid;
  out.replicates = patterns.size();
  // Nearest-neighbor distance per inner point, pooled per replicate.
  std::vector<std::vector<double>> nn_dists(patterns.size());
  std::size_t usable = 0;
  for (std::size_t rep = 0; rep < patterns.size(); ++rep) {
    const PointPattern& pat = patterns[rep];
    for (std::size_t i = 0; i < pat.size(); ++i) {
      if (!inner.contains(pat.point(i))) continue;
      double best = std::numeric_limits<double>::infinity();
      for (std::size_t j = 0; j < pat.size(); ++j) {
        if (j == i) continue;
        best = std::min(best, distance(norm, pat.point(i), pat.point(j)));
      }
      nn_dists[rep].push_back(best);
    }
    if (!nn_dists[rep].empty()) ++usable;
  }
  if (usable == 0) {
    out.defined = false;
    out.flag = "no inner-window points in any replicate";
    out.value.assign(r_grid.size(), 0.0);
    out.std_error.assign(r_grid.size(), 0.0);
    return out;
  }
  for (double r : r_grid) {
    std::vector<double> per_rep;
    for (const std::vector<double>& ds : nn_dists) {
      if (ds.empty()) continue;
      std::size_t hits = 0;
      for (double d : ds)
        if (d <= r) ++hits;
      per_rep.push_back(static_cast<double>(hits) / static_cast<double>(ds.size()));
    }
    const MeanSe m = replicate_mean(per_rep);
    out.value.push_back(m.mean);
    out.std_error.push_back(m.se);
  }
  if (usable < patterns.size()) out.flag = "replicates without inner points were skipped";
  return out;
}

G2Estimate estimate_G2(const std::vector<PointPattern>& patterns, std::span<const double> y,
                       double r, Norm norm, const Window& inner, const Window& pattern_window,
                       double bin_tolerance) {
  if (patterns.empty()) throw std::invalid_argument("estimate_G2: needs replicated patterns");
  const int dim = patterns.front().dim();
  if (static_cast<int>(y.size()) != dim)
    throw std::invalid_argument("estimate_G2: displacement dimension mismatch");
  const double ynorm = norm_value(norm, y);
  const double tol = bin_tolerance > 0.0 ? bin_tolerance : 0.05 * ynorm;
  check_halo(pattern_window, inner, ynorm + tol + r, "estimate_G2");
  std::size_t qualifying = 0, with_third = 0;
  std::vector<double> disp(dim);
  for (const PointPattern& pat : patterns) {
    for (std::size_t i = 0; i < pat.size(); ++i) {
      if (!inner.contains(pat.point(i))) continue;
      const std::span<const double> a = pat.point(i);
      for (std::size_t j = 0; j < pat.size(); ++j) {
        if (j == i) continue;
        const std::span<const double> b = pat.point(j);
        for (int k = 0; k < dim; ++k) disp[k] = b[k] - a[k] - y[k];
        if (norm_value(norm, disp) > tol) continue;
        ++qualifying;
        bool third = false;
        for (std::size_t t = 0; t < pat.size() && !third; ++t) {
          if (t == i || t == j) continue;
          if (distance(norm, pat.point(t), a) <= r || distance(norm, pat.point(t), b) <= r)
            third = true;
        }
        if (third) ++with_third;
      }
    }
  }
  G2Estimate out;
  out.bin_tolerance = tol;
  out.qualifying_pairs = qualifying;
  if (qualifying == 0) {
    out.defined = false;
    return out;
  }
  out.defined = true;
  out.value = static_cast<double>(with_third) / static_cast<double>(qualifying);
  out.std_error = std::sqrt(out.value * (1.0 - out.value) / static_cast<double>(qualifying));
  return out;
}

double capacity_functional(const BooleanModel& model) {
  if (model.germ_intensity < 0.0)
    throw std::invalid_argument("capacity_functional: negative intensity");
  const double mean_ball = unit_ball_volume(model.norm, model.dim) * model.radii.moment(model.dim);
  return 1.0 - std::exp(-model.germ_intensity * mean_ball);
}

double capacity_functional_pair(const BooleanModel& model, std::span<const double> displacement) {
  if (static_cast<int>(displacement.size()) != model.dim)
    throw std::invalid_argument("capacity_functional_pair: displacement dimension mismatch");
  double mean_union = 0.0;
  for (const auto& [radius, prob] : model.radii.atoms()) {
    if (prob == 0.0) continue;
    if (radius == 0.0) continue;
    mean_union += prob * union_ball_volume(model.norm, model.dim, displacement, radius);
  }
  return 1.0 - std::exp(-model.germ_intensity * mean_union);
}

double b_function(const BooleanModel& model, std::span<const double> y) {
  const double mean_ball = unit_ball_volume(model.norm, model.dim) * model.radii.moment(model.dim);
  if (mean_ball <= 0.0) throw std::invalid_argument("b_function: E(R^D) must be positive");
  double mean_diff = 0.0;
  for (const auto& [radius, prob] : model.radii.atoms()) {
    if (prob == 0.0 || radius == 0.0) continue;
    const double ball = ball_volume(model.norm, model.dim, radius);
    double overlap;
    if (ball_overlap_exact_supported(model.norm, model.dim)) {
      overlap = ball_intersection_volume(model.norm, model.dim, y, radius);
    } else {
      overlap = 2.0 * ball - union_ball_volume(model.norm, model.dim, y, radius);
    }
    mean_diff += prob * (ball - overlap);
  }
  return std::clamp(mean_diff / mean_ball, 0.0, 1.0);
}

void write_summary_csv(std::ostream& os, const SummaryEstimate& estimate) {
  os << "r,value,stderr,n\n";
  os.precision(17);
  for (std::size_t i = 0; i < estimate.r.size(); ++i)
    os << estimate.r[i] << "," << estimate.value[i] << "," << estimate.std_error[i] << ","
       << estimate.replicates << "\n";
}

}  // namespace ppthin
