#include "ppthin/bounds.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "ppthin/quadrature.hpp"
#include "ppthin/summaries.hpp"

namespace ppthin {

double m1_factor(double total_mass) {
  if (total_mass < 0.0) throw std::invalid_argument("m1_factor: mass must be >= 0");
  if (total_mass == 0.0) return 1.0;
  return std::min(1.0, 1.647 / std::sqrt(total_mass));
}

double m2_factor(double total_mass) {
  if (total_mass < 0.0) throw std::invalid_argument("m2_factor: mass must be >= 0");
  if (total_mass == 0.0) return 1.0;
  const double t = 6.0 * total_mass / 11.0;
  const double log_plus = std::max(0.0, std::log(t));
  return std::min(1.0, (1.0 + 2.0 * log_plus) / t);
}

std::string BoundReport::to_json_string() const {
  nlohmann::json j;
  j["model"] = model;
  j["basic_term"] = basic_term;
  j["strong_dependence_term"] = strong_term;
  j["beta_integral"] = beta_integral;
  j["gamma_integral"] = gamma_integral;
  j["weak_dependence_term"] = weak_term;
  j["m1"] = m1;
  j["m2"] = m2;
  j["total_tv"] = total_tv;
  j["total_d2"] = total_d2;
  j["total_mass"] = total_mass;
  j["config_hash"] = config_hash;
  for (const auto& [key, value] : extras) j["extras"][key] = value;
  return j.dump(2);
}

BoundReport assemble_main_bound(double basic, double strong, double beta_integral,
                                double gamma_integral, double total_mass, std::string model) {
  if (basic < 0.0 || strong < 0.0 || beta_integral < 0.0 || gamma_integral < 0.0)
    throw std::invalid_argument("assemble_main_bound: all terms must be >= 0");
  if (total_mass < 0.0) throw std::invalid_argument("assemble_main_bound: mass must be >= 0");
  BoundReport report;
  report.model = std::move(model);
  report.basic_term = basic;
  report.strong_term = strong;
  report.beta_integral = beta_integral;
  report.gamma_integral = gamma_integral;
  report.weak_term = beta_integral + 2.0 * gamma_integral;
  report.m1 = m1_factor(total_mass);
  report.m2 = m2_factor(total_mass);
  report.total_mass = total_mass;
  report.total_tv = basic + strong + report.weak_term;
  report.total_d2 = report.m2 * (basic + strong) + report.m1 * report.weak_term;
  return report;
}

namespace {

// exp(-l1 * alpha_D * E R^D): retention probability of an uncovered point at
// unit q; shared by all Boolean-cover terms.
double uncovered_probability(const BooleanModel& model) {
  const double mean_ball = unit_ball_volume(model.norm, model.dim) * model.radii.moment(model.dim);
  return std::exp(-model.germ_intensity * mean_ball);
}

void require_rbar(const BooleanModel& model, double rbar) {
  if (rbar < 2.0 * model.radii.max_radius())
    throw std::invalid_argument("boolean bound: rbar must be at least twice the maximal radius");
}

}  // namespace

BoundReport bound_boolean(const Window& domain, double m1, const BooleanModel& model, double q,
                          double rbar, double beta_sup) {
  if (q < 0.0 || q > 1.0) throw std::invalid_argument("bound_boolean: q must lie in [0, 1]");
  if (m1 < 0.0) throw std::invalid_argument("bound_boolean: m1 must be >= 0");
  if (beta_sup < 0.0) throw std::invalid_argument("bound_boolean: beta_sup must be >= 0");
  require_rbar(model, rbar);
  const double vol = domain.volume();
  const double p0 = uncovered_probability(model);
  const double alpha = unit_ball_volume(model.norm, model.dim);
  const double mean_ball = alpha * model.radii.moment(model.dim);
  // Product-measure mass of pairs within rbar, bounded via the ball volume.
  const double mu1sq = m1 * m1 * vol * std::min(ball_volume(model.norm, model.dim, rbar), vol);
  const double basic = q * q * p0 * p0 * mu1sq;
  const double integral = shell_integral(
      model.norm, model.dim, 0.0, rbar,
      [&](std::span<const double> y) {
        return std::exp(-model.germ_intensity * (1.0 + b_function(model, y)) * mean_ball);
      });
  const double strong = q * q * m1 * m1 * vol * integral;
  const double beta_term = 2.0 * q * p0 * vol * beta_sup;
  const double mass = q * p0 * m1 * vol;
  BoundReport report = assemble_main_bound(basic, strong, beta_term, 0.0, mass, "boolean-cover");
  report.extras["uncovered_probability"] = p0;
  return report;
}

BoundReport bound_boolean_pairs(const Window& domain, double mu1_total, double mu1sq_mass,
                                const PairSample& pairs, const BooleanModel& model, double q,
                                double rbar, double beta_sup) {
  if (q < 0.0 || q > 1.0) throw std::invalid_argument("bound_boolean_pairs: q must lie in [0, 1]");
  require_rbar(model, rbar);
  const double p0 = uncovered_probability(model);
  const double mean_ball = unit_ball_volume(model.norm, model.dim) * model.radii.moment(model.dim);
  const double basic = q * q * p0 * p0 * mu1sq_mass;
  double mean_weight = 0.0;
  if (!pairs.displacements.empty()) {
    for (const std::vector<double>& y : pairs.displacements)
      mean_weight +=
          std::exp(-model.germ_intensity * (1.0 + b_function(model, y)) * mean_ball);
    mean_weight /= static_cast<double>(pairs.displacements.size());
  }
  const double strong = q * q * pairs.pair_mass * mean_weight;
  const double beta_term = 2.0 * q * p0 * domain.volume() * beta_sup;
  const double mass = q * p0 * mu1_total;
  BoundReport report =
      assemble_main_bound(basic, strong, beta_term, 0.0, mass, "boolean-cover-empirical");
  report.extras["uncovered_probability"] = p0;
  return report;
}

double contracted_boolean_radius(double germ_intensity, double n, double q_n, int dim, Norm norm) {
  if (germ_intensity <= 0.0)
    throw std::invalid_argument("contracted_boolean_radius: germ intensity must be positive");
  const double arg = q_n * std::pow(n, dim);
  if (arg < 1.0)
    throw std::invalid_argument("contracted_boolean_radius: q_n must be at least n^-D");
  return std::pow(std::log(arg) / (germ_intensity * unit_ball_volume(norm, dim)), 1.0 / dim);
}

BoundReport bound_boolean_contracted(const Window& target, double n, double q_n,
                                     const BooleanModel& model_n, double rbar_n, double m1,
                                     double beta_sup, double k_rbar) {
  const int dim = model_n.dim;
  const double nd = std::pow(n, dim);
  if (q_n < 1.0 / nd - 1e-12 || q_n > 1.0)
    throw std::invalid_argument("bound_boolean_contracted: q_n must lie in [n^-D, 1]");
  require_rbar(model_n, rbar_n);
  const double alpha = unit_ball_volume(model_n.norm, dim);
  const double log_qnd = std::log(q_n * nd);
  // The construction requires E R^D = r_n^D with r_n tied to q_n n^D.
  const double expected_rd = log_qnd / (model_n.germ_intensity * alpha);
  const double actual_rd = model_n.radii.moment(dim);
  if (std::abs(actual_rd - expected_rd) > 1e-9 * std::max(1.0, expected_rd))
    throw std::invalid_argument(
        "bound_boolean_contracted: grain radius law does not match the contraction level");
  const double vol = target.volume();
  const double basic = m1 * m1 * vol * alpha * std::pow(rbar_n / n, dim);
  // (q_n n^D)^{-b(y)} = exp(-log(q_n n^D) b(y)); identically 1 at the
  // degenerate level q_n n^D = 1.
  double integral;
  if (log_qnd == 0.0) {
    integral = ball_volume(model_n.norm, dim, rbar_n);
  } else {
    integral = shell_integral(model_n.norm, dim, 0.0, rbar_n,
                              [&](std::span<const double> y) {
                                return std::exp(-log_qnd * b_function(model_n, y));
                              });
  }
  const double strong = m1 * m1 * vol * q_n * integral;
  const double beta_term = 2.0 * vol * beta_sup;
  const double mass = m1 * vol;
  BoundReport report =
      assemble_main_bound(basic, strong, beta_term, 0.0, mass, "boolean-cover-contracted");
  const double k_value = k_rbar >= 0.0 ? k_rbar : ball_volume(model_n.norm, dim, rbar_n);
  report.extras["k_based_total"] =
      vol * (m1 * m1 * alpha * std::pow(rbar_n / n, dim) + m1 * m1 * q_n * k_value +
             2.0 * beta_sup);
  report.extras["r_n"] = std::pow(expected_rd, 1.0 / dim);
  report.extras["n"] = n;
  return report;
}

double shell_integral_from_grid(std::span<const double> g2_values,
                                std::span<const double> k_weights) {
  if (g2_values.size() != k_weights.size())
    throw std::invalid_argument("shell_integral_from_grid: size mismatch");
  double total = 0.0;
  for (std::size_t i = 0; i < g2_values.size(); ++i) {
    if (g2_values[i] < 0.0 || g2_values[i] > 1.0)
      throw std::invalid_argument("shell_integral_from_grid: G2 values must lie in [0, 1]");
    total += k_weights[i] * (1.0 - g2_values[i]);
  }
  return total;
}

BoundReport bound_matern(double domain_volume, int dim, Norm norm, double m1, double q, double r,
                         double g_of_r, double shell_integral, double last_term) {
  if (g_of_r < 0.0 || g_of_r > 1.0)
    throw std::invalid_argument("bound_matern: G(r) must lie in [0, 1]");
  if (q < 0.0 || q > 1.0) throw std::invalid_argument("bound_matern: q must lie in [0, 1]");
  if (shell_integral < 0.0 || last_term < 0.0)
    throw std::invalid_argument("bound_matern: integral terms must be >= 0");
  const double survive = 1.0 - g_of_r;
  const double basic =
      m1 * m1 * domain_volume * ball_volume(norm, dim, 2.0 * r) * q * q * survive * survive;
  const double strong = m1 * m1 * domain_volume * q * q * shell_integral;
  const double mass = m1 * q * survive * domain_volume;
  BoundReport report = assemble_main_bound(basic, strong, last_term, 0.0, mass, "matern-hardcore");
  report.extras["one_minus_G"] = survive;
  return report;
}

double matern_poisson_shell_integral(double m1, double r, int dim, Norm norm) {
  if (r <= 0.0) throw std::invalid_argument("matern_poisson_shell_integral: r must be positive");
  return shell_integral(norm, dim, r, 2.0 * r, [&](std::span<const double> y) {
    return std::exp(-m1 * union_ball_volume(norm, dim, y, r));
  });
}

BoundReport bound_matern_poisson(double domain_volume, double m1, double r, int dim, Norm norm) {
  if (m1 < 0.0) throw std::invalid_argument("bound_matern_poisson: m1 must be >= 0");
  if (r <= 0.0) throw std::invalid_argument("bound_matern_poisson: r must be positive");
  const double ball = ball_volume(norm, dim, r);
  const double survive = std::exp(-m1 * ball);  // 1 - G(r) for a Poisson parent
  const double l1 = m1 * survive;
  const double shell = m1 > 0.0 ? matern_poisson_shell_integral(m1, r, dim, norm) : 0.0;
  BoundReport report =
      bound_matern(domain_volume, dim, norm, m1, 1.0, r, 1.0 - survive, shell, 0.0);
  report.model = "matern-poisson";
  report.extras["l1"] = l1;
  report.extras["simplified_total_tv"] =
      domain_volume * ball_volume(norm, dim, 2.0 * r) * l1 * l1 *
      (1.0 + std::exp(0.5 * m1 * ball));
  return report;
}

double strauss_M_bound(double lambda, double kappa_hat) {
  if (kappa_hat <= 0.0) throw std::invalid_argument("strauss_M_bound: kappa must be positive");
  if (lambda <= 0.0) throw std::invalid_argument("strauss_M_bound: lambda must be positive");
  return std::max(1.0, kappa_hat * std::exp(lambda - 1.0) - 1.0);
}

}  // namespace ppthin
