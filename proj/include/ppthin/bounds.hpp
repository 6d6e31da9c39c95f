#pragma once

#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "ppthin/geometry.hpp"
#include "ppthin/simulate.hpp"

namespace ppthin {

/// Stein factors weighting the Wasserstein-type bound. Both clamp to 1; mass
/// zero is handled by the clamp.
double m1_factor(double total_mass);
double m2_factor(double total_mass);

/// Itemized Poisson-approximation bound. total_tv adds the three terms
/// directly; total_d2 weights the basic+strong block by the second Stein
/// factor and the weak block by the first.
struct BoundReport {
  std::string model;  // which construction produced it
  double basic_term = 0.0;
  double strong_term = 0.0;
  double beta_integral = 0.0;
  double gamma_integral = 0.0;
  double weak_term = 0.0;  // beta_integral + 2 * gamma_integral
  double m1 = 1.0;
  double m2 = 1.0;
  double total_tv = 0.0;
  double total_d2 = 0.0;
  double total_mass = 0.0;  // expected number of retained points
  std::uint64_t config_hash = 0;
  std::map<std::string, double> extras;

  std::string to_json_string() const;
};

BoundReport assemble_main_bound(double basic, double strong, double beta_integral,
                                double gamma_integral, double total_mass,
                                std::string model = "generic");

/// Boolean-cover thinning of a stationary process whose reduced second moment
/// measure is Lebesgue (Poisson second-order behavior). beta_sup is the
/// caller-supplied long-range dependence sup (0 for a Poisson parent).
/// Requires rbar >= 2 * max grain radius.
BoundReport bound_boolean(const Window& domain, double m1, const BooleanModel& model, double q,
                          double rbar, double beta_sup);

/// Same bound with the pair structure supplied empirically: mu1sq_mass is the
/// product-measure mass of close pairs, pair displacements (with total mass
/// mu2_mass) feed the strong-dependence integral, mu1_total the retained mass.
struct PairSample {
  std::vector<std::vector<double>> displacements;
  double pair_mass = 0.0;
};
BoundReport bound_boolean_pairs(const Window& domain, double mu1_total, double mu1sq_mass,
                                const PairSample& pairs, const BooleanModel& model, double q,
                                double rbar, double beta_sup);

/// Boolean-cover thinning compensated by contraction with factor n: the grain
/// radius solves exp(-l1 alpha_D r_n^D) = 1 / (q_n n^D). Reports the integral
/// bound as the totals and the looser K-function bound in the extras
/// ("k_based_total"). k_rbar < 0 selects the Lebesgue value alpha_D rbar^D.
BoundReport bound_boolean_contracted(const Window& target, double n, double q_n,
                                     const BooleanModel& model_n, double rbar_n, double m1,
                                     double beta_sup, double k_rbar = -1.0);

/// Radius for the contracted Boolean construction at level n.
double contracted_boolean_radius(double germ_intensity, double n, double q_n, int dim, Norm norm);

/// Hard-core competition thinning with estimated or analytic inputs.
/// shell_integral = ∫ over { r < |y| <= 2r } of (1 - G2_y(r)) K(dy);
/// last_term is the long-range dependence contribution (0 for a Poisson
/// parent, mass * M for a process with a uniform conditional-density bound M).
BoundReport bound_matern(double domain_volume, int dim, Norm norm, double m1, double q, double r,
                         double g_of_r, double shell_integral, double last_term);

/// Shell integral from a grid of G2 estimates with second-moment weights:
/// sum of weights[k] * (1 - g2_values[k]).
double shell_integral_from_grid(std::span<const double> g2_values,
                                std::span<const double> k_weights);

/// Closed-form shell integral for a Poisson parent:
/// ∫_{r < |y| <= 2r} exp(-m1 |B(0,r) ∪ B(y,r)|) dy.
double matern_poisson_shell_integral(double m1, double r, int dim, Norm norm);

/// Hard-core thinning of a Poisson parent at full retention. Totals use the
/// exact shell integral; extras carry the simplified closed form
/// ("simplified_total_tv", always >= total_tv) and the retained intensity
/// ("l1").
BoundReport bound_matern_poisson(double domain_volume, double m1, double r, int dim, Norm norm);

/// Uniform conditional-density bound for the pairwise-interaction density:
/// max(1, kappa * exp(lambda - 1) - 1).
double strauss_M_bound(double lambda, double kappa_hat);

}  // namespace ppthin
