#include "ppthin/thinning.hpp"

#include <cmath>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace ppthin {

std::vector<double> matern_probabilities(const MaternField& field, const PointPattern& pattern) {
  const std::size_t n = pattern.size();
  std::vector<double> probs(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    const std::span<const double> s = pattern.point(i);
    if (!field.inner.contains(s)) continue;
    bool crowded = false;
    for (std::size_t j = 0; j < n && !crowded; ++j)
      if (j != i && distance(field.norm, s, pattern.point(j)) <= field.r) crowded = true;
    probs[i] = crowded ? 0.0 : field.q;
  }
  return probs;
}

std::vector<double> boolean_probabilities(const BooleanGrains& grains, double q,
                                          const PointPattern& pattern) {
  std::vector<double> probs(pattern.size(), 0.0);
  for (std::size_t i = 0; i < pattern.size(); ++i)
    probs[i] = grains.covers(pattern.point(i)) ? 0.0 : q;
  return probs;
}

std::vector<double> realize_retention(const RetentionField& field, const PointPattern& pattern,
                                      const Window& pattern_window, RngStream& rng) {
  return std::visit(
      [&](const auto& f) -> std::vector<double> {
        using T = std::decay_t<decltype(f)>;
        if constexpr (std::is_same_v<T, ConstantField>) {
          if (f.p < 0.0 || f.p > 1.0)
            throw std::invalid_argument("realize_retention: p must lie in [0, 1]");
          return std::vector<double>(pattern.size(), f.p);
        } else if constexpr (std::is_same_v<T, BooleanCoverField>) {
          const BooleanGrains grains = sample_boolean_model(f.model, f.grain_region, rng);
          return boolean_probabilities(grains, f.q, pattern);
        } else {
          if (!pattern_window.covers_halo_of(f.inner, f.r))
            throw std::invalid_argument(
                "realize_retention: pattern window must cover the halo of the inner window of "
                "radius r");
          return matern_probabilities(f, pattern);
        }
      },
      field);
}

ThinningOutcome thin(const PointPattern& pattern, std::span<const double> probabilities,
                     RngStream& rng) {
  if (probabilities.size() != pattern.size())
    throw std::invalid_argument("thin: probabilities not aligned with the pattern");
  ThinningOutcome out{pattern, PointPattern(pattern.dim()), {}};
  out.decisions.resize(pattern.size(), 0);
  for (std::size_t i = 0; i < pattern.size(); ++i) {
    const double u = rng.uniform();
    if (u < probabilities[i]) {
      out.decisions[i] = 1;
      out.retained.add(pattern.point(i));
    }
  }
  return out;
}

std::vector<double> exact_thinning_distribution(const PointPattern& pattern,
                                                std::span<const double> probabilities) {
  const std::size_t n = pattern.size();
  if (probabilities.size() != n)
    throw std::invalid_argument("exact_thinning_distribution: probability size mismatch");
  if (n > 20)
    throw std::invalid_argument("exact_thinning_distribution: pattern exceeds the 2^n size cap");
  const std::size_t count = std::size_t{1} << n;
  std::vector<double> law(count, 0.0);
  for (std::size_t mask = 0; mask < count; ++mask) {
    double p = 1.0;
    for (std::size_t i = 0; i < n; ++i)
      p *= (mask >> i & 1) ? probabilities[i] : 1.0 - probabilities[i];
    law[mask] = p;
  }
  return law;
}

namespace {

// Retention probabilities of the merged pattern under the field's conditional
// law given the pattern; deterministic for constant and Matern fields.
std::vector<double> conditional_probabilities(const RetentionField& field,
                                              const PointPattern& merged) {
  return std::visit(
      [&](const auto& f) -> std::vector<double> {
        using T = std::decay_t<decltype(f)>;
        if constexpr (std::is_same_v<T, ConstantField>) {
          return std::vector<double>(merged.size(), f.p);
        } else if constexpr (std::is_same_v<T, MaternField>) {
          return matern_probabilities(f, merged);
        } else {
          throw std::logic_error("conditional_probabilities: Boolean field needs grain draws");
        }
      },
      field);
}

double subset_probability(std::span<const double> probs, std::span<const std::uint8_t> kept) {
  double p = 1.0;
  for (std::size_t i = 0; i < probs.size(); ++i) p *= kept[i] ? probs[i] : 1.0 - probs[i];
  return p;
}

}  // namespace

McEstimate thinned_density_mc(const PointPattern& pattern,
                              const std::function<double(const PointPattern&)>& base_density,
                              const RetentionField& field, const Window& domain,
                              std::size_t replicates, RngStream& rng,
                              std::size_t grain_replicates) {
  if (replicates == 0) throw std::invalid_argument("thinned_density_mc: needs replicates");
  if (const MaternField* f = std::get_if<MaternField>(&field)) {
    if (!domain.covers_halo_of(f->inner, f->r))
      throw std::invalid_argument(
          "thinned_density_mc: domain must cover the halo of the inner window of radius r");
  }
  const bool boolean = std::holds_alternative<BooleanCoverField>(field);
  const double scale = std::exp(domain.volume());
  double sum = 0.0, sumsq = 0.0;
  std::vector<std::uint8_t> kept;
  for (std::size_t rep = 0; rep < replicates; ++rep) {
    const PointPattern eta = sample_poisson(domain, 1.0, rng);
    PointPattern merged = pattern;
    for (std::size_t i = 0; i < eta.size(); ++i) merged.add(eta.point(i));
    // Points of `pattern` first, then eta: mark which are to be retained.
    kept.assign(merged.size(), 0);
    for (std::size_t i = 0; i < pattern.size(); ++i) kept[i] = 1;
    double q_cond;
    if (boolean) {
      const auto& f = std::get<BooleanCoverField>(field);
      double inner_sum = 0.0;
      for (std::size_t g = 0; g < grain_replicates; ++g) {
        const BooleanGrains grains = sample_boolean_model(f.model, f.grain_region, rng);
        inner_sum += subset_probability(boolean_probabilities(grains, f.q, merged), kept);
      }
      q_cond = inner_sum / static_cast<double>(grain_replicates);
    } else {
      q_cond = subset_probability(conditional_probabilities(field, merged), kept);
    }
    const double x = q_cond * base_density(merged);
    sum += x;
    sumsq += x * x;
  }
  const double n = static_cast<double>(replicates);
  const double mean = sum / n;
  const double var = std::max(0.0, sumsq / n - mean * mean) * n / std::max(1.0, n - 1.0);
  McEstimate out;
  out.value = scale * mean;
  out.std_error = scale * std::sqrt(var / n);
  out.replicates = replicates;
  if (mean != 0.0 && out.std_error > 0.5 * std::abs(out.value)) {
    out.flagged = true;
    out.flag_reason = "relative standard error above 50%; increase replicates";
  }
  return out;
}

namespace {

MomentCheck summarize_pairs(const std::vector<double>& lhs, const std::vector<double>& rhs) {
  const double n = static_cast<double>(lhs.size());
  double sl = 0.0, sr = 0.0, sd = 0.0, sdd = 0.0;
  for (std::size_t i = 0; i < lhs.size(); ++i) {
    sl += lhs[i];
    sr += rhs[i];
    const double d = lhs[i] - rhs[i];
    sd += d;
    sdd += d * d;
  }
  MomentCheck out;
  out.lhs_mean = sl / n;
  out.rhs_mean = sr / n;
  out.gap = sd / n;
  const double var = std::max(0.0, sdd / n - out.gap * out.gap) * n / std::max(1.0, n - 1.0);
  out.std_error = std::sqrt(var / n);
  out.gap_in_se = out.std_error > 0.0 ? out.gap / out.std_error : 0.0;
  return out;
}

}  // namespace

MomentCheckReport check_thinning_moments(const std::function<PointPattern(RngStream&)>& sampler,
                                         const RetentionField& field, const Window& pattern_window,
                                         const Window& count_region, double pair_radius,
                                         std::size_t replicates, RngStream& rng) {
  if (replicates < 2) throw std::invalid_argument("check_thinning_moments: needs replicates >= 2");
  const Norm norm = std::holds_alternative<MaternField>(field)
                        ? std::get<MaternField>(field).norm
                        : Norm::euclidean;
  std::vector<double> lhs1(replicates), rhs1(replicates), lhs2(replicates), rhs2(replicates);
  for (std::size_t rep = 0; rep < replicates; ++rep) {
    const PointPattern xi = sampler(rng);
    const std::vector<double> probs = realize_retention(field, xi, pattern_window, rng);
    const ThinningOutcome outcome = thin(xi, probs, rng);
    // First order: counts in the region vs summed probabilities.
    double lambda_a = 0.0;
    for (std::size_t i = 0; i < xi.size(); ++i)
      if (count_region.contains(xi.point(i))) lambda_a += probs[i];
    double retained_a = 0.0;
    for (std::size_t i = 0; i < outcome.retained.size(); ++i)
      if (count_region.contains(outcome.retained.point(i))) retained_a += 1.0;
    lhs1[rep] = retained_a;
    rhs1[rep] = lambda_a;
    // Second order on ordered close pairs.
    lhs2[rep] = static_cast<double>(pair_count(outcome.retained, pair_radius, norm));
    double lambda2 = 0.0;
    for (std::size_t i = 0; i < xi.size(); ++i)
      for (std::size_t j = 0; j < xi.size(); ++j) {
        if (i == j) continue;
        if (distance(norm, xi.point(i), xi.point(j)) <= pair_radius)
          lambda2 += probs[i] * probs[j];
      }
    rhs2[rep] = lambda2;
  }
  MomentCheckReport report;
  report.replicates = replicates;
  report.first_order = summarize_pairs(lhs1, rhs1);
  report.second_order = summarize_pairs(lhs2, rhs2);
  return report;
}

void write_thinning_csv(std::ostream& os, const ThinningOutcome& outcome) {
  for (int k = 0; k < outcome.parent.dim(); ++k) os << "x" << (k + 1) << ",";
  os << "retained\n";
  os.precision(17);
  for (std::size_t i = 0; i < outcome.parent.size(); ++i) {
    const std::span<const double> p = outcome.parent.point(i);
    for (int k = 0; k < outcome.parent.dim(); ++k) os << p[k] << ",";
    os << static_cast<int>(outcome.decisions[i]) << "\n";
  }
}

ThinningOutcome read_thinning_csv(std::istream& is) {
  std::string line;
  if (!std::getline(is, line)) throw std::runtime_error("thinning CSV: missing header");
  int cols = 1;
  for (char c : line)
    if (c == ',') ++cols;
  const int dim = cols - 1;
  if (dim < 1) throw std::runtime_error("thinning CSV: needs coordinates plus retained column");
  ThinningOutcome out{PointPattern(dim), PointPattern(dim), {}};
  std::vector<double> p(dim);
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::string cell;
    for (int k = 0; k < dim; ++k) {
      if (!std::getline(ss, cell, ',')) throw std::runtime_error("thinning CSV: short row");
      p[k] = std::stod(cell);
    }
    if (!std::getline(ss, cell, ',')) throw std::runtime_error("thinning CSV: short row");
    const int kept = std::stoi(cell);
    out.parent.add(p);
    out.decisions.push_back(static_cast<std::uint8_t>(kept != 0));
    if (kept) out.retained.add(p);
  }
  return out;
}

}  // namespace ppthin
