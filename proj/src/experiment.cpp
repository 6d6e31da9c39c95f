#include "ppthin/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>
#include <thread>

#include <json.hpp>

#include "ppthin/bounds.hpp"
#include "ppthin/distances.hpp"
#include "ppthin/summaries.hpp"
#include "ppthin/thinning.hpp"

namespace ppthin {

using nlohmann::json;

namespace {

const std::map<std::string, ExperimentKind> kKindNames = {
    {"matern_poisson", ExperimentKind::matern_poisson},
    {"boolean_cover", ExperimentKind::boolean_cover},
    {"boolean_rate_sweep", ExperimentKind::boolean_rate_sweep},
    {"strauss_matern", ExperimentKind::strauss_matern},
    {"identity_suite", ExperimentKind::identity_suite}};

std::string kind_name(ExperimentKind kind) {
  for (const auto& [name, k] : kKindNames)
    if (k == kind) return name;
  return "unknown";
}

}  // namespace

double ExperimentConfig::param(const std::string& name, std::size_t index) const {
  const auto it = params.find(name);
  if (it == params.end()) throw std::invalid_argument("missing parameter: params." + name);
  const std::vector<double>& v = it->second.values;
  return v.size() == 1 ? v.front() : v.at(index);
}

ExperimentConfig parse_config(const std::string& json_text) {
  const json j = json::parse(json_text);
  ExperimentConfig config;
  if (!j.contains("kind")) throw std::invalid_argument("config: missing 'kind'");
  const auto it = kKindNames.find(j.at("kind").get<std::string>());
  if (it == kKindNames.end())
    throw std::invalid_argument("config: unknown kind '" + j.at("kind").get<std::string>() + "'");
  config.kind = it->second;
  config.seed = j.value("seed", std::uint64_t{1});
  config.replicates = j.value("replicates", std::size_t{100000});
  if (j.contains("window")) {
    std::vector<Interval> bounds;
    for (const auto& iv : j.at("window").at("bounds"))
      bounds.push_back({iv.at(0).get<double>(), iv.at(1).get<double>()});
    config.window = Window(bounds);
  }
  if (j.contains("norm")) {
    const std::string n = j.at("norm").get<std::string>();
    if (n == "euclidean")
      config.norm = Norm::euclidean;
    else if (n == "sup")
      config.norm = Norm::sup;
    else
      throw std::invalid_argument("config: norm must be 'euclidean' or 'sup'");
  }
  if (j.contains("params")) {
    for (const auto& [name, value] : j.at("params").items()) {
      ParamSpec spec;
      if (value.is_array()) {
        for (const auto& x : value) spec.values.push_back(x.get<double>());
        if (spec.values.empty())
          throw std::invalid_argument("config: params." + name + " is an empty sweep");
      } else {
        spec.values.push_back(value.get<double>());
      }
      config.params[name] = spec;
    }
  }
  return config;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw std::runtime_error("cannot open config: " + path);
  std::stringstream ss;
  ss << is.rdbuf();
  return parse_config(ss.str());
}

std::string canonical_config_json(const ExperimentConfig& config) {
  json j;
  j["kind"] = kind_name(config.kind);
  j["seed"] = config.seed;
  j["replicates"] = config.replicates;
  json bounds = json::array();
  for (const Interval& iv : config.window.bounds()) bounds.push_back({iv.lo, iv.hi});
  j["window"]["bounds"] = bounds;
  j["norm"] = config.norm == Norm::euclidean ? "euclidean" : "sup";
  for (const auto& [name, spec] : config.params) j["params"][name] = spec.values;
  return j.dump();
}

std::uint64_t config_hash(const ExperimentConfig& config) {
  const std::string text = canonical_config_json(config);
  std::uint64_t h = 1469598103934665603ULL;  // FNV-1a
  for (unsigned char c : text) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

namespace {

void require_param(const ExperimentConfig& config, const std::string& name,
                   std::vector<std::string>& errors) {
  if (!config.has(name)) errors.push_back("params." + name + ": required but missing");
}

void check_range(const ExperimentConfig& config, const std::string& name, double lo, double hi,
                 bool lo_strict, std::vector<std::string>& errors) {
  if (!config.has(name)) return;
  for (double v : config.params.at(name).values) {
    const bool low_ok = lo_strict ? v > lo : v >= lo;
    if (!low_ok || v > hi) {
      std::ostringstream os;
      os << "params." << name << ": value " << v << " outside " << (lo_strict ? "(" : "[") << lo
         << ", " << hi << "]";
      errors.push_back(os.str());
    }
  }
}

}  // namespace

std::vector<std::string> validate_config(const ExperimentConfig& config) {
  std::vector<std::string> errors;
  if (config.replicates == 0) errors.push_back("replicates: must be positive");
  if (config.window.volume() <= 0.0) errors.push_back("window: volume must be positive");
  const double inf = std::numeric_limits<double>::infinity();
  switch (config.kind) {
    case ExperimentKind::matern_poisson:
      require_param(config, "m1", errors);
      require_param(config, "r", errors);
      check_range(config, "m1", 0.0, inf, false, errors);
      check_range(config, "r", 0.0, inf, true, errors);
      check_range(config, "q", 0.0, 1.0, false, errors);
      break;
    case ExperimentKind::boolean_cover: {
      require_param(config, "m1", errors);
      require_param(config, "l1", errors);
      require_param(config, "R", errors);
      check_range(config, "m1", 0.0, inf, false, errors);
      check_range(config, "l1", 0.0, inf, false, errors);
      check_range(config, "R", 0.0, inf, true, errors);
      check_range(config, "q", 0.0, 1.0, false, errors);
      check_range(config, "beta_sup", 0.0, inf, false, errors);
      if (config.has("m1") && config.params.at("m1").values.empty()) break;
      if (config.has("rbar") && config.has("R")) {
        // The dependence neighborhoods must dominate twice the grain reach.
        for (double rbar : config.params.at("rbar").values)
          for (double R : config.params.at("R").values)
            if (rbar < 2.0 * R)
              errors.push_back(
                  "params.rbar: must be at least twice the maximal grain radius (halo "
                  "requirement for the cover bound)");
      }
      break;
    }
    case ExperimentKind::boolean_rate_sweep: {
      require_param(config, "l1", errors);
      require_param(config, "m1", errors);
      require_param(config, "n", errors);
      check_range(config, "l1", 0.0, inf, true, errors);
      check_range(config, "m1", 0.0, inf, false, errors);
      check_range(config, "rbar_factor", 2.0, inf, false, errors);
      if (config.has("n") && config.has("q_n")) {
        const int dim = config.window.dim();
        for (double n : config.params.at("n").values)
          for (double qn : config.params.at("q_n").values)
            if (qn < std::pow(n, -dim) || qn > 1.0)
              errors.push_back("params.q_n: must lie in [n^-D, 1] for every level n");
      }
      break;
    }
    case ExperimentKind::strauss_matern:
      require_param(config, "lambda", errors);
      require_param(config, "r", errors);
      check_range(config, "lambda", 0.0, inf, true, errors);
      check_range(config, "gamma", 0.0, 1.0, false, errors);
      if (config.has("gamma")) {
        for (double g : config.params.at("gamma").values)
          if (g == 0.0)
            errors.push_back(
                "params.gamma: hard-core limit (gamma = 0) is excluded from the "
                "conditional-density bound path");
      }
      check_range(config, "r", 0.0, inf, true, errors);
      check_range(config, "q", 0.0, 1.0, false, errors);
      if (config.has("strauss_range") && config.has("r")) {
        for (double sr : config.params.at("strauss_range").values)
          for (double r : config.params.at("r").values)
            if (sr > r)
              errors.push_back(
                  "params.strauss_range: interaction range must not exceed the competition "
                  "radius r");
      }
      break;
    case ExperimentKind::identity_suite:
      check_range(config, "intensity", 0.0, inf, false, errors);
      check_range(config, "p", 0.0, 1.0, false, errors);
      check_range(config, "r", 0.0, inf, true, errors);
      check_range(config, "ball_radius", 0.0, inf, true, errors);
      if (config.has("intensity")) {
        for (double v : config.params.at("intensity").values)
          if (v < 0.0) errors.push_back("params.intensity: must be nonnegative");
      }
      break;
  }
  return errors;
}

namespace {

struct SweepPoint {
  std::map<std::string, double> values;
};

std::vector<SweepPoint> expand_sweep(const ExperimentConfig& config) {
  std::vector<std::string> sweep_names;
  for (const auto& [name, spec] : config.params)
    if (spec.is_sweep()) sweep_names.push_back(name);
  std::vector<SweepPoint> points;
  SweepPoint base;
  for (const auto& [name, spec] : config.params)
    if (!spec.is_sweep()) base.values[name] = spec.values.front();
  if (sweep_names.empty()) {
    points.push_back(base);
    return points;
  }
  std::vector<std::size_t> idx(sweep_names.size(), 0);
  while (true) {
    SweepPoint p = base;
    for (std::size_t k = 0; k < sweep_names.size(); ++k)
      p.values[sweep_names[k]] = config.params.at(sweep_names[k]).values[idx[k]];
    points.push_back(p);
    std::size_t k = 0;
    while (k < sweep_names.size() &&
           ++idx[k] == config.params.at(sweep_names[k]).values.size())
      idx[k++] = 0;
    if (k == sweep_names.size()) break;
  }
  return points;
}

double get(const SweepPoint& point, const std::string& name, double fallback) {
  const auto it = point.values.find(name);
  return it == point.values.end() ? fallback : it->second;
}

double get_required(const SweepPoint& point, const std::string& name) {
  const auto it = point.values.find(name);
  if (it == point.values.end())
    throw std::invalid_argument("missing parameter: params." + name);
  return it->second;
}

PointPattern center_anchor(const Window& window) {
  PointPattern anchor(window.dim());
  std::vector<double> c(window.dim());
  for (int k = 0; k < window.dim(); ++k)
    c[k] = 0.5 * (window.bounds()[k].lo + window.bounds()[k].hi);
  anchor.add(c);
  return anchor;
}

std::string distance_row(std::size_t index, const EmpiricalDistance& d) {
  std::ostringstream os;
  os.precision(17);
  os << index << "," << d.metric << "," << d.value << "," << d.std_error << ","
     << (d.direction == Direction::lower_bound
             ? "lower_bound"
             : (d.direction == Direction::exact ? "exact" : "upper_bound"));
  return os.str();
}

std::string check_row(std::size_t index, const std::string& name, double lhs, double rhs,
                      double gap_in_se, bool pass) {
  std::ostringstream os;
  os.precision(17);
  os << index << "," << name << "," << lhs << "," << rhs << "," << gap_in_se << ","
     << (pass ? "1" : "0");
  return os.str();
}

struct CertifyOutcome {
  Certificate certificate;
  EmpiricalDistance tv;
  EmpiricalDistance d2;
};

// Shared tail of the thinned-model pipelines: counts + pattern subsamples
// against the Poisson law with the bound's retained mass.
CertifyOutcome certify_point(const BoundReport& bound, std::uint64_t hash,
                             const std::vector<std::uint64_t>& counts,
                             const std::vector<PointPattern>& thinned_patterns,
                             const Window& domain, Norm norm, RngStream& rng) {
  const double poisson_intensity = bound.total_mass / domain.volume();
  std::vector<PointPattern> poisson_patterns;
  poisson_patterns.reserve(thinned_patterns.size());
  RngStream poisson_rng = rng.substream(11);
  for (std::size_t i = 0; i < thinned_patterns.size(); ++i)
    poisson_patterns.push_back(sample_poisson(domain, poisson_intensity, poisson_rng));
  const PointPattern anchor = center_anchor(domain);
  CertificationSamples samples;
  samples.counts = counts;
  samples.thinned_patterns = &thinned_patterns;
  samples.poisson_patterns = &poisson_patterns;
  samples.anchor = &anchor;
  samples.d0 = BoundedMetric{norm, 1.0};
  RngStream cert_rng = rng.substream(12);
  CertifyOutcome out;
  out.certificate = certify_bound(bound, hash, samples, cert_rng);
  RngStream tv_rng = rng.substream(13);
  out.tv = tv_counts_lower(counts, bound.total_mass, tv_rng);
  out.d2 = d2_lower_witness(thinned_patterns, poisson_patterns, anchor,
                            BoundedMetric{norm, 1.0});
  return out;
}

void run_matern_poisson(const ExperimentConfig& config, const SweepPoint& point,
                        std::uint64_t hash, SweepPointResult& result, RngStream& rng) {
  const double m1 = get_required(point, "m1");
  const double r = get_required(point, "r");
  const double q = get(point, "q", 1.0);
  const int dim = config.window.dim();
  const double vol = config.window.volume();
  BoundReport bound;
  if (q == 1.0) {
    bound = bound_matern_poisson(vol, m1, r, dim, config.norm);
  } else {
    const double ball = ball_volume(config.norm, dim, r);
    const double g = 1.0 - std::exp(-m1 * ball);
    bound = bound_matern(vol, dim, config.norm, m1, q, r, g,
                         matern_poisson_shell_integral(m1, r, dim, config.norm), 0.0);
  }
  bound.config_hash = hash;
  result.bound_json = bound.to_json_string();

  const Window pattern_window = config.window.halo(r);
  const MaternField field{r, q, config.window, config.norm};
  const std::size_t pattern_cap = std::min<std::size_t>(config.replicates, 2000);
  std::vector<std::uint64_t> counts(config.replicates);
  std::vector<PointPattern> thinned;
  thinned.reserve(pattern_cap);
  RngStream sim_rng = rng.substream(1);
  for (std::size_t rep = 0; rep < config.replicates; ++rep) {
    const PointPattern xi = sample_poisson(pattern_window, m1, sim_rng);
    const std::vector<double> probs = matern_probabilities(field, xi);
    const ThinningOutcome outcome = thin(xi, probs, sim_rng);
    counts[rep] = outcome.retained.size();
    if (rep < pattern_cap) thinned.push_back(outcome.retained);
  }
  const CertifyOutcome cert = certify_point(bound, hash, counts, thinned, config.window,
                                            config.norm, rng);
  result.certificate_json = cert.certificate.to_json_string();
  result.distance_rows.push_back(distance_row(result.index, cert.tv));
  result.distance_rows.push_back(distance_row(result.index, cert.d2));
  result.pass = cert.certificate.pass;
}

void run_boolean_cover(const ExperimentConfig& config, const SweepPoint& point,
                       std::uint64_t hash, SweepPointResult& result, RngStream& rng) {
  const double m1 = get_required(point, "m1");
  const double l1 = get_required(point, "l1");
  const double radius = get_required(point, "R");
  const double q = get(point, "q", 1.0);
  const double rbar = get(point, "rbar", 2.0 * radius);
  const double beta_sup = get(point, "beta_sup", 0.0);
  const int dim = config.window.dim();
  const BooleanModel model{dim, l1, RadiusLaw::deterministic(radius), config.norm};
  BoundReport bound = bound_boolean(config.window, m1, model, q, rbar, beta_sup);
  bound.config_hash = hash;
  result.bound_json = bound.to_json_string();

  const Window grain_region = config.window.halo(radius);
  const BooleanCoverField field{model, q, grain_region};
  const std::size_t pattern_cap = std::min<std::size_t>(config.replicates, 2000);
  std::vector<std::uint64_t> counts(config.replicates);
  std::vector<PointPattern> thinned;
  thinned.reserve(pattern_cap);
  double uncovered_sum = 0.0, uncovered_sumsq = 0.0;
  std::size_t uncovered_reps = 0;
  RngStream sim_rng = rng.substream(1);
  for (std::size_t rep = 0; rep < config.replicates; ++rep) {
    const PointPattern xi = sample_poisson(config.window, m1, sim_rng);
    const std::vector<double> probs = realize_retention(field, xi, config.window, sim_rng);
    const ThinningOutcome outcome = thin(xi, probs, sim_rng);
    counts[rep] = outcome.retained.size();
    if (rep < pattern_cap) thinned.push_back(outcome.retained);
    if (!xi.empty()) {
      // probs[i] equals q exactly when point i is uncovered.
      std::size_t uncovered = 0;
      for (double p : probs)
        if (p > 0.0) ++uncovered;
      const double frac = static_cast<double>(uncovered) / static_cast<double>(xi.size());
      uncovered_sum += frac;
      uncovered_sumsq += frac * frac;
      ++uncovered_reps;
    }
  }
  if (uncovered_reps > 1) {
    const double n = static_cast<double>(uncovered_reps);
    const double mean = uncovered_sum / n;
    const double var =
        std::max(0.0, uncovered_sumsq / n - mean * mean) * n / (n - 1.0);
    const double se = std::sqrt(var / n);
    const double expected = std::exp(
        -l1 * unit_ball_volume(config.norm, dim) * model.radii.moment(dim));
    const double gap_se = se > 0.0 ? (mean - expected) / se : 0.0;
    result.check_rows.push_back(check_row(result.index, "uncovered_fraction", mean, expected,
                                          gap_se, std::abs(gap_se) < 3.0));
  }
  const CertifyOutcome cert = certify_point(bound, hash, counts, thinned, config.window,
                                            config.norm, rng);
  result.certificate_json = cert.certificate.to_json_string();
  result.distance_rows.push_back(distance_row(result.index, cert.tv));
  result.distance_rows.push_back(distance_row(result.index, cert.d2));
  result.pass = cert.certificate.pass;
  for (const std::string& row : result.check_rows)
    if (row.back() == '0') result.pass = false;
}

void run_rate_sweep_point(const ExperimentConfig& config, const SweepPoint& point,
                          std::uint64_t hash, SweepPointResult& result) {
  const double l1 = get_required(point, "l1");
  const double m1 = get_required(point, "m1");
  const double n = get_required(point, "n");
  const double q_n = get(point, "q_n", 1.0);
  const double rbar_factor = get(point, "rbar_factor", 2.0);
  const int dim = config.window.dim();
  const double r_n = contracted_boolean_radius(l1, n, q_n, dim, config.norm);
  const BooleanModel model{dim, l1, RadiusLaw::deterministic(r_n), config.norm};
  BoundReport bound = bound_boolean_contracted(config.window, n, q_n, model,
                                               rbar_factor * r_n, m1, 0.0);
  bound.config_hash = hash;
  result.bound_json = bound.to_json_string();
  result.pass = true;
}

void run_strauss_matern(const ExperimentConfig& config, const SweepPoint& point,
                        std::uint64_t hash, SweepPointResult& result, RngStream& rng) {
  const double lambda = get_required(point, "lambda");
  const double gamma = get(point, "gamma", 0.5);
  const double strauss_range = get(point, "strauss_range", get_required(point, "r"));
  const double r = get_required(point, "r");
  const double q = get(point, "q", 1.0);
  const int dim = config.window.dim();
  if (gamma <= 0.0)
    throw std::invalid_argument("params.gamma: must be positive on the bound path");
  // Chains live on a window wide enough for the two-point statistics; the
  // competition field only needs the r-halo inside it.
  const double est_pad = 2.0 * r + 0.05 * (2.0 * r) + r + 1e-9;
  const Window chain_window = config.window.halo(est_pad);
  StraussParams sp{lambda, gamma, strauss_range, chain_window, config.norm};
  const std::size_t kappa_reps =
      static_cast<std::size_t>(get(point, "kappa_replicates", 20000.0));
  RngStream kappa_rng = rng.substream(1);
  const KappaEstimate kappa = estimate_strauss_kappa(sp, kappa_reps, kappa_rng);
  const double m_bound = strauss_M_bound(lambda, kappa.value);
  {
    const double analytic =
        gamma == 1.0 ? std::exp((1.0 - lambda) * chain_window.volume()) : kappa.value;
    const double gap_se =
        kappa.std_error > 0.0 ? (kappa.value - analytic) / kappa.std_error : 0.0;
    result.check_rows.push_back(check_row(result.index, "kappa_estimate", kappa.value, analytic,
                                          gamma == 1.0 ? gap_se : 0.0,
                                          gamma != 1.0 || std::abs(gap_se) < 3.0));
  }
  // The count certificate needs at least 10^4 samples.
  const std::size_t chains =
      std::max<std::size_t>(10000, static_cast<std::size_t>(get(point, "chains", 10000.0)));
  const std::size_t steps =
      std::max(strauss_default_steps(sp),
               static_cast<std::size_t>(get(point, "mcmc_steps", 0.0)));
  std::vector<PointPattern> parents;
  parents.reserve(chains);
  RngStream chain_rng = rng.substream(2);
  double mean_count = 0.0;
  for (std::size_t c = 0; c < chains; ++c) {
    RngStream one = chain_rng.substream(c);
    parents.push_back(sample_strauss(sp, steps, one));
    mean_count += static_cast<double>(parents.back().size());
  }
  mean_count /= static_cast<double>(chains);
  const double m1_hat = mean_count / chain_window.volume();

  const SummaryEstimate g_est =
      estimate_G(parents, {r}, config.norm, config.window, chain_window);
  const double g_r = std::clamp(g_est.value.front(), 0.0, 1.0);
  // Shell grid over (r, 2r] for the two-point statistics.
  const std::size_t cells = 5;
  std::vector<double> edges{r};
  for (std::size_t k = 1; k <= cells; ++k)
    edges.push_back(r + static_cast<double>(k) * r / static_cast<double>(cells));
  const SummaryEstimate k_est =
      estimate_K(parents, m1_hat > 0.0 ? m1_hat : 1.0, edges, config.norm, config.window,
                 chain_window);
  std::vector<double> g2_values, k_weights;
  std::vector<double> y(dim, 0.0);
  for (std::size_t k = 0; k < cells; ++k) {
    y[0] = 0.5 * (edges[k] + edges[k + 1]);
    const G2Estimate g2 =
        estimate_G2(parents, y, r, config.norm, config.window, chain_window);
    g2_values.push_back(g2.defined ? std::clamp(g2.value, 0.0, 1.0) : 0.0);
    k_weights.push_back(std::max(0.0, k_est.value[k + 1] - k_est.value[k]));
  }
  const double shell = shell_integral_from_grid(g2_values, k_weights);
  const double vol = config.window.volume();
  const double last_term = m1_hat * vol * q * (1.0 - g_r) * m_bound;
  BoundReport bound =
      bound_matern(vol, dim, config.norm, m1_hat, q, r, g_r, shell, last_term);
  bound.model = "matern-strauss";
  bound.config_hash = hash;
  bound.extras["kappa"] = kappa.value;
  bound.extras["kappa_se"] = kappa.std_error;
  bound.extras["M"] = m_bound;
  result.bound_json = bound.to_json_string();

  const MaternField field{r, q, config.window, config.norm};
  const std::size_t pattern_cap = std::min<std::size_t>(chains, 2000);
  std::vector<std::uint64_t> counts(chains);
  std::vector<PointPattern> thinned;
  thinned.reserve(pattern_cap);
  RngStream thin_rng = rng.substream(3);
  for (std::size_t c = 0; c < chains; ++c) {
    const std::vector<double> probs = matern_probabilities(field, parents[c]);
    const ThinningOutcome outcome = thin(parents[c], probs, thin_rng);
    counts[c] = outcome.retained.size();
    if (c < pattern_cap) thinned.push_back(outcome.retained);
  }
  const CertifyOutcome cert =
      certify_point(bound, hash, counts, thinned, config.window, config.norm, rng);
  result.certificate_json = cert.certificate.to_json_string();
  result.distance_rows.push_back(distance_row(result.index, cert.tv));
  result.distance_rows.push_back(distance_row(result.index, cert.d2));
  result.pass = cert.certificate.pass;
  for (const std::string& row : result.check_rows)
    if (row.back() == '0') result.pass = false;
}

void run_identity_suite(const ExperimentConfig& config, const SweepPoint& point,
                        SweepPointResult& result, RngStream& rng) {
  const double intensity = get(point, "intensity", 1.0);
  const double ball_radius = get(point, "ball_radius", 0.1);
  const double p = get(point, "p", 0.5);
  const double r = get(point, "r", 0.1);
  const std::size_t reps = config.replicates;
  std::size_t stream = 1;
  auto push = [&](const std::string& name, double lhs, double rhs, double gap_in_se) {
    result.check_rows.push_back(
        check_row(result.index, name, lhs, rhs, gap_in_se, std::abs(gap_in_se) < 3.0));
    if (std::abs(gap_in_se) >= 3.0) result.pass = false;
  };
  for (const auto& [name, h] : std::vector<std::pair<std::string, ExchangeH>>{
           {"exchange_unit", ExchangeH::unit},
           {"exchange_total_count", ExchangeH::total_count},
           {"exchange_empty_ball", ExchangeH::empty_ball}}) {
    RngStream sub = rng.substream(stream++);
    const IdentityReport rep =
        check_slivnyak_mecke(intensity, config.window, h, ball_radius, reps, sub);
    push(name, rep.lhs, rep.rhs, rep.gap_in_se);
  }
  {
    RngStream sub = rng.substream(stream++);
    const RetentionField field = ConstantField{p};
    const Window w = config.window;
    const MomentCheckReport rep = check_thinning_moments(
        [&](RngStream& r2) { return sample_poisson(w, intensity, r2); }, field, w, w,
        ball_radius, reps, sub);
    push("moment_first_constant", rep.first_order.lhs_mean, rep.first_order.rhs_mean,
         rep.first_order.gap_in_se);
    push("moment_second_constant", rep.second_order.lhs_mean, rep.second_order.rhs_mean,
         rep.second_order.gap_in_se);
  }
  {
    RngStream sub = rng.substream(stream++);
    const Window pattern_window = config.window.halo(r);
    const RetentionField field = MaternField{r, p, config.window, config.norm};
    const MomentCheckReport rep = check_thinning_moments(
        [&](RngStream& r2) { return sample_poisson(pattern_window, intensity, r2); }, field,
        pattern_window, config.window, 2.0 * r, reps, sub);
    push("moment_first_matern", rep.first_order.lhs_mean, rep.first_order.rhs_mean,
         rep.first_order.gap_in_se);
    push("moment_second_matern", rep.second_order.lhs_mean, rep.second_order.rhs_mean,
         rep.second_order.gap_in_se);
  }
  {
    // Densities relative to the unit-intensity reference integrate to one.
    RngStream sub = rng.substream(stream++);
    double s = 0.0, ss = 0.0;
    for (std::size_t i = 0; i < reps; ++i) {
      const PointPattern eta = sample_poisson(config.window, 1.0, sub);
      const double v = poisson_density(eta, intensity, config.window);
      s += v;
      ss += v * v;
    }
    const double n = static_cast<double>(reps);
    const double mean = s / n;
    const double var = std::max(0.0, ss / n - mean * mean) * n / (n - 1.0);
    const double se = std::sqrt(var / n);
    push("density_normalization", mean, 1.0, se > 0.0 ? (mean - 1.0) / se : 0.0);
  }
  {
    // Thinned-density estimator against the thinned-Poisson closed form.
    RngStream sub = rng.substream(stream++);
    const RetentionField field = ConstantField{p};
    const Window w = config.window;
    PointPattern rho = center_anchor(w);
    const McEstimate est = thinned_density_mc(
        rho, [&](const PointPattern& sigma) { return poisson_density(sigma, intensity, w); },
        field, w, reps, sub);
    const double expected = std::exp((1.0 - p * intensity) * w.volume()) * (p * intensity);
    push("thinned_density_singleton", est.value, expected,
         est.std_error > 0.0 ? (est.value - expected) / est.std_error : 0.0);
  }
}

void write_text_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot write " + path.string());
  os << text;
}

std::size_t thread_count() {
  if (const char* env = std::getenv("PPTHIN_THREADS")) {
    const long n = std::strtol(env, nullptr, 10);
    if (n >= 1) return static_cast<std::size_t>(n);
  }
  return 1;
}

}  // namespace

ExperimentResult run_experiment(const ExperimentConfig& config, const std::string& out_dir) {
  const std::vector<std::string> errors = validate_config(config);
  if (!errors.empty()) {
    std::string all = "invalid config:";
    for (const std::string& e : errors) all += "\n  " + e;
    throw std::invalid_argument(all);
  }
  std::filesystem::create_directories(out_dir);
  const std::uint64_t hash = config_hash(config);
  const std::vector<SweepPoint> points = expand_sweep(config);
  ExperimentResult result;
  result.hash = hash;
  result.points.resize(points.size());

  auto run_point = [&](std::size_t i) {
    SweepPointResult& pr = result.points[i];
    pr.index = i;
    pr.point = points[i].values;
    RngStream rng(config.seed, i + 1);
    try {
      switch (config.kind) {
        case ExperimentKind::matern_poisson:
          run_matern_poisson(config, points[i], hash, pr, rng);
          break;
        case ExperimentKind::boolean_cover:
          run_boolean_cover(config, points[i], hash, pr, rng);
          break;
        case ExperimentKind::boolean_rate_sweep:
          run_rate_sweep_point(config, points[i], hash, pr);
          break;
        case ExperimentKind::strauss_matern:
          run_strauss_matern(config, points[i], hash, pr, rng);
          break;
        case ExperimentKind::identity_suite:
          run_identity_suite(config, points[i], pr, rng);
          break;
      }
    } catch (const std::exception& err) {
      pr.error = err.what();
      pr.pass = false;
    }
  };

  const std::size_t workers = std::min(thread_count(), points.size());
  if (workers <= 1) {
    for (std::size_t i = 0; i < points.size(); ++i) run_point(i);
  } else {
    std::vector<std::thread> pool;
    std::atomic<std::size_t> next{0};
    for (std::size_t w = 0; w < workers; ++w)
      pool.emplace_back([&]() {
        while (true) {
          const std::size_t i = next.fetch_add(1);
          if (i >= points.size()) return;
          run_point(i);
        }
      });
    for (std::thread& t : pool) t.join();
  }

  // Serialized writes, in point order, after all computation.
  const std::filesystem::path dir(out_dir);
  std::ostringstream distances, checks, sweep;
  distances << "point,metric,estimate,stderr,direction\n";
  checks << "point,check,lhs,rhs,gap_in_se,pass\n";
  sweep << "point";
  std::vector<std::string> param_names;
  for (const auto& [name, spec] : config.params) param_names.push_back(name);
  for (const std::string& name : param_names) sweep << "," << name;
  sweep << ",total_tv,total_d2,total_mass,pass\n";
  sweep.precision(17);
  for (SweepPointResult& pr : result.points) {
    if (!pr.bound_json.empty())
      write_text_file(dir / ("point_" + std::to_string(pr.index) + "_bound.json"),
                      pr.bound_json);
    if (!pr.certificate_json.empty())
      write_text_file(dir / ("point_" + std::to_string(pr.index) + "_certificate.json"),
                      pr.certificate_json);
    for (const std::string& row : pr.distance_rows) distances << row << "\n";
    for (const std::string& row : pr.check_rows) checks << row << "\n";
    sweep << pr.index;
    for (const std::string& name : param_names) {
      const auto it = pr.point.find(name);
      sweep << ",";
      if (it != pr.point.end()) sweep << it->second;
    }
    double tv = 0.0, d2 = 0.0, mass = 0.0;
    if (!pr.bound_json.empty()) {
      const json jb = json::parse(pr.bound_json);
      tv = jb.value("total_tv", 0.0);
      d2 = jb.value("total_d2", 0.0);
      mass = jb.value("total_mass", 0.0);
    }
    sweep << "," << tv << "," << d2 << "," << mass << "," << (pr.pass ? 1 : 0) << "\n";
    if (!pr.pass) result.all_pass = false;
  }
  write_text_file(dir / "distances.csv", distances.str());
  write_text_file(dir / "checks.csv", checks.str());
  write_text_file(dir / "sweep.csv", sweep.str());

  json manifest;
  manifest["config_hash"] = hash;
  manifest["seed"] = config.seed;
  manifest["kind"] = kind_name(config.kind);
  manifest["points"] = points.size();
  manifest["all_pass"] = result.all_pass;
  manifest["config"] = json::parse(canonical_config_json(config));
  json point_errors = json::array();
  for (const SweepPointResult& pr : result.points)
    if (!pr.error.empty())
      point_errors.push_back({{"point", pr.index}, {"error", pr.error}});
  manifest["errors"] = point_errors;
  const std::filesystem::path manifest_path = dir / "manifest.json";
  write_text_file(manifest_path, manifest.dump(2));
  result.manifest_path = manifest_path.string();
  return result;
}

}  // namespace ppthin
