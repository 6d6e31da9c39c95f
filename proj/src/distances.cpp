#include "ppthin/distances.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include <json.hpp>

namespace ppthin {

CountLaw poisson_count_law(double mean, double tail_cutoff) {
  if (mean < 0.0) throw std::invalid_argument("poisson_count_law: mean must be >= 0");
  CountLaw law;
  double p = std::exp(-mean);
  double cumulative = 0.0;
  std::size_t k = 0;
  // Walk the pmf until the remaining tail is below the cutoff.
  while (true) {
    law.probs.push_back(p);
    cumulative += p;
    if (1.0 - cumulative < tail_cutoff && k >= static_cast<std::size_t>(mean)) break;
    if (k > 100000) break;
    ++k;
    p *= mean / static_cast<double>(k);
  }
  law.tail_mass = std::max(0.0, 1.0 - cumulative);
  return law;
}

CountLaw empirical_count_law(std::span<const std::uint64_t> counts) {
  if (counts.empty()) throw std::invalid_argument("empirical_count_law: no samples");
  const std::uint64_t max_count = *std::max_element(counts.begin(), counts.end());
  CountLaw law;
  law.probs.assign(max_count + 1, 0.0);
  const double w = 1.0 / static_cast<double>(counts.size());
  for (std::uint64_t c : counts) law.probs[c] += w;
  return law;
}

double tv_exact_small(const CountLaw& p, const CountLaw& q) {
  const std::size_t n = std::max(p.probs.size(), q.probs.size());
  double l1 = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    const double pk = k < p.probs.size() ? p.probs[k] : 0.0;
    const double qk = k < q.probs.size() ? q.probs[k] : 0.0;
    l1 += std::abs(pk - qk);
  }
  return 0.5 * (l1 + p.tail_mass + q.tail_mass);
}

double tv_exact_small(std::span<const double> p, std::span<const double> q) {
  if (p.size() != q.size())
    throw std::invalid_argument("tv_exact_small: laws live on different outcome spaces");
  double l1 = 0.0;
  for (std::size_t k = 0; k < p.size(); ++k) l1 += std::abs(p[k] - q[k]);
  return 0.5 * l1;
}

namespace {

// Approximate binomial for bootstrap resampling: exact inversion when the
// count is small, matched-moments rounding otherwise.
std::uint64_t bootstrap_binomial(std::uint64_t n, double p, RngStream& rng) {
  if (p <= 0.0 || n == 0) return 0;
  if (p >= 1.0) return n;
  const double np = static_cast<double>(n) * p;
  if (np * (1.0 - p) > 100.0) {
    // Box-Muller from two uniforms.
    const double u1 = std::max(rng.uniform(), 1e-300);
    const double u2 = rng.uniform();
    const double z = std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586 * u2);
    const double x = np + z * std::sqrt(np * (1.0 - p));
    const double clamped = std::clamp(x, 0.0, static_cast<double>(n));
    return static_cast<std::uint64_t>(std::llround(clamped));
  }
  std::uint64_t successes = 0;
  for (std::uint64_t i = 0; i < n; ++i)
    if (rng.uniform() < p) ++successes;
  return successes;
}

double tv_against_poisson(const std::vector<double>& empirical, const CountLaw& poisson) {
  const std::size_t n = std::max(empirical.size(), poisson.probs.size());
  double l1 = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    const double pk = k < empirical.size() ? empirical[k] : 0.0;
    const double qk = k < poisson.probs.size() ? poisson.probs[k] : 0.0;
    l1 += std::abs(pk - qk);
  }
  return 0.5 * (l1 + poisson.tail_mass);
}

}  // namespace

EmpiricalDistance tv_counts_lower(std::span<const std::uint64_t> counts, double poisson_mean,
                                  RngStream& rng, std::size_t bootstrap_resamples,
                                  std::size_t min_samples) {
  if (counts.size() < min_samples)
    throw std::invalid_argument("tv_counts_lower: too few samples for a stable estimate");
  const CountLaw poisson = poisson_count_law(poisson_mean);
  const CountLaw empirical = empirical_count_law(counts);
  EmpiricalDistance out;
  out.metric = "tv";
  out.direction = Direction::lower_bound;
  out.exact = false;
  out.samples = counts.size();
  out.value = tv_against_poisson(empirical.probs, poisson);
  // Bootstrap over multinomial resamples of the count histogram.
  const std::uint64_t n = counts.size();
  std::vector<double> resampled(empirical.probs.size());
  double sum = 0.0, sumsq = 0.0;
  for (std::size_t b = 0; b < bootstrap_resamples; ++b) {
    std::uint64_t remaining = n;
    double remaining_p = 1.0;
    for (std::size_t k = 0; k < empirical.probs.size(); ++k) {
      std::uint64_t draw = 0;
      if (remaining > 0 && remaining_p > 0.0) {
        const double cell = std::min(1.0, empirical.probs[k] / remaining_p);
        draw = (k + 1 == empirical.probs.size())
                   ? remaining
                   : bootstrap_binomial(remaining, cell, rng);
      }
      resampled[k] = static_cast<double>(draw) / static_cast<double>(n);
      remaining -= draw;
      remaining_p = std::max(0.0, remaining_p - empirical.probs[k]);
    }
    const double tv = tv_against_poisson(resampled, poisson);
    sum += tv;
    sumsq += tv * tv;
  }
  const double bn = static_cast<double>(bootstrap_resamples);
  const double mean = sum / bn;
  out.std_error = std::sqrt(std::max(0.0, sumsq / bn - mean * mean));
  return out;
}

EmpiricalDistance d2_lower_witness(const std::vector<PointPattern>& samples_p,
                                   const std::vector<PointPattern>& samples_q,
                                   const PointPattern& anchor, const BoundedMetric& d0) {
  if (samples_p.empty() || samples_q.empty())
    throw std::invalid_argument("d2_lower_witness: needs samples on both sides");
  auto witness_mean = [&](const std::vector<PointPattern>& samples, double& se) {
    double s = 0.0, ss = 0.0;
    for (const PointPattern& pat : samples) {
      const double f = d1_distance(pat, anchor, d0);
      s += f;
      ss += f * f;
    }
    const double n = static_cast<double>(samples.size());
    const double mean = s / n;
    const double var = std::max(0.0, ss / n - mean * mean) * n / std::max(1.0, n - 1.0);
    se = std::sqrt(var / n);
    return mean;
  };
  double se_p = 0.0, se_q = 0.0;
  const double mp = witness_mean(samples_p, se_p);
  const double mq = witness_mean(samples_q, se_q);
  EmpiricalDistance out;
  out.metric = "d2";
  out.direction = Direction::lower_bound;
  out.exact = false;
  out.samples = samples_p.size() + samples_q.size();
  out.value = std::abs(mp - mq);
  out.std_error = std::sqrt(se_p * se_p + se_q * se_q);
  return out;
}

IdentityReport check_slivnyak_mecke(double intensity, const Window& window, ExchangeH h,
                                    double ball_radius, std::size_t replicates, RngStream& rng) {
  if (intensity < 0.0) throw std::invalid_argument("check_slivnyak_mecke: negative intensity");
  if (replicates < 2) throw std::invalid_argument("check_slivnyak_mecke: needs replicates >= 2");
  const double mass = intensity * window.volume();
  IdentityReport report;
  report.replicates = replicates;
  double lhs_sum = 0.0, lhs_sumsq = 0.0;
  RngStream lhs_rng = rng.substream(1);
  for (std::size_t rep = 0; rep < replicates; ++rep) {
    const PointPattern eta = sample_poisson(window, intensity, lhs_rng);
    double integral = 0.0;
    switch (h) {
      case ExchangeH::unit:
        integral = static_cast<double>(eta.size());
        break;
      case ExchangeH::total_count:
        // h(x, eta - delta_x) = (eta - delta_x)(window) summed over points.
        integral = static_cast<double>(eta.size()) * static_cast<double>(eta.size() ? eta.size() - 1 : 0);
        break;
      case ExchangeH::empty_ball:
        for (std::size_t i = 0; i < eta.size(); ++i) {
          bool isolated = true;
          for (std::size_t j = 0; j < eta.size() && isolated; ++j)
            if (j != i &&
                distance(Norm::euclidean, eta.point(i), eta.point(j)) <= ball_radius)
              isolated = false;
          if (isolated) integral += 1.0;
        }
        break;
    }
    lhs_sum += integral;
    lhs_sumsq += integral * integral;
  }
  const double n = static_cast<double>(replicates);
  report.lhs = lhs_sum / n;
  const double lhs_var =
      std::max(0.0, lhs_sumsq / n - report.lhs * report.lhs) * n / (n - 1.0);
  report.lhs_se = std::sqrt(lhs_var / n);
  switch (h) {
    case ExchangeH::unit:
      report.rhs = mass;
      report.rhs_exact = true;
      break;
    case ExchangeH::total_count:
      report.rhs = mass * mass;
      report.rhs_exact = true;
      break;
    case ExchangeH::empty_ball: {
      // Independent Monte Carlo of ∫ E h(x, eta) lambda dx with a fresh
      // location and a fresh pattern per replicate.
      RngStream rhs_rng = rng.substream(2);
      std::vector<double> x(window.dim());
      double s = 0.0, ssq = 0.0;
      for (std::size_t rep = 0; rep < replicates; ++rep) {
        const PointPattern eta = sample_poisson(window, intensity, rhs_rng);
        window.sample_point(rhs_rng, x);
        bool empty = true;
        for (std::size_t i = 0; i < eta.size() && empty; ++i)
          if (distance(Norm::euclidean, eta.point(i), x) <= ball_radius) empty = false;
        const double v = empty ? 1.0 : 0.0;
        s += v;
        ssq += v * v;
      }
      const double mean = s / n;
      const double var = std::max(0.0, ssq / n - mean * mean) * n / (n - 1.0);
      report.rhs = mass * mean;
      report.rhs_se = mass * std::sqrt(var / n);
      break;
    }
  }
  report.gap = report.lhs - report.rhs;
  report.joint_se = std::sqrt(report.lhs_se * report.lhs_se + report.rhs_se * report.rhs_se);
  report.gap_in_se = report.joint_se > 0.0 ? report.gap / report.joint_se : 0.0;
  return report;
}

std::string Certificate::to_json_string() const {
  nlohmann::json j;
  j["config_hash"] = config_hash;
  j["pass"] = pass;
  j["entries"] = nlohmann::json::array();
  for (const CertificateEntry& e : entries) {
    nlohmann::json je;
    je["metric"] = e.metric;
    je["bound"] = e.bound;
    je["estimate"] = e.estimate;
    je["se"] = e.std_error;
    je["verdict"] = e.pass ? "PASS" : "FAIL";
    je["uninformative"] = e.uninformative;
    j["entries"].push_back(je);
  }
  return j.dump(2);
}

Certificate certify_bound(const BoundReport& bound, std::uint64_t config_hash,
                          const CertificationSamples& samples, RngStream& rng) {
  if (bound.config_hash != config_hash)
    throw std::invalid_argument("certify_bound: bound was produced for a different configuration");
  Certificate cert;
  cert.config_hash = config_hash;
  {
    const EmpiricalDistance tv = tv_counts_lower(samples.counts, bound.total_mass, rng);
    CertificateEntry entry;
    entry.metric = "tv";
    entry.bound = bound.total_tv;
    entry.estimate = tv.value;
    entry.std_error = tv.std_error;
    entry.uninformative = bound.total_tv >= 1.0;
    entry.pass = entry.uninformative || tv.value <= bound.total_tv + 3.0 * tv.std_error;
    cert.entries.push_back(entry);
  }
  if (samples.thinned_patterns && samples.poisson_patterns && samples.anchor) {
    const EmpiricalDistance witness = d2_lower_witness(*samples.thinned_patterns,
                                                       *samples.poisson_patterns, *samples.anchor,
                                                       samples.d0);
    CertificateEntry entry;
    entry.metric = "d2";
    entry.bound = bound.total_d2;
    entry.estimate = witness.value;
    entry.std_error = witness.std_error;
    entry.uninformative = bound.total_d2 >= 1.0;
    entry.pass = entry.uninformative || witness.value <= bound.total_d2 + 3.0 * witness.std_error;
    cert.entries.push_back(entry);
  }
  cert.pass = std::all_of(cert.entries.begin(), cert.entries.end(),
                          [](const CertificateEntry& e) { return e.pass; });
  return cert;
}

}  // namespace ppthin
