#include <cstdint>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "ppthin/bounds.hpp"
#include "ppthin/distances.hpp"
#include "ppthin/experiment.hpp"
#include "ppthin/summaries.hpp"
#include "ppthin/thinning.hpp"

namespace {

using namespace ppthin;

Window parse_window(const std::vector<double>& flat) {
  if (flat.empty() || flat.size() % 2 != 0)
    throw CLI::ValidationError("--window needs lo,hi pairs per axis");
  std::vector<Interval> bounds;
  for (std::size_t k = 0; k + 1 < flat.size(); k += 2) bounds.push_back({flat[k], flat[k + 1]});
  return Window(bounds);
}

Norm parse_norm(const std::string& name) {
  if (name == "euclidean") return Norm::euclidean;
  if (name == "sup") return Norm::sup;
  throw CLI::ValidationError("--norm must be euclidean or sup");
}

void write_or_print(const std::string& out, const std::string& text) {
  if (out.empty() || out == "-") {
    std::cout << text << "\n";
    return;
  }
  std::ofstream os(out);
  if (!os) throw std::runtime_error("cannot write " + out);
  os << text;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Dependent-thinning simulation and Poisson-approximation bound toolkit"};
  app.require_subcommand(1);
  app.fallthrough();

  std::uint64_t seed = 1;
  std::size_t replicates = 100000;
  std::string out;
  app.add_option("--seed", seed, "master random seed")->capture_default_str();
  app.add_option("--replicates", replicates, "Monte Carlo replicates")->capture_default_str();
  app.add_option("--out", out, "output file or directory (default: stdout for single files)");

  // ---- simulate -------------------------------------------------------
  auto* sim = app.add_subcommand("simulate", "sample a point process to CSV");
  std::string sim_process = "poisson";
  std::vector<double> sim_window{0, 1, 0, 1};
  std::string sim_norm = "euclidean";
  double sim_intensity = 1.0, sim_lambda = 1.0, sim_gamma = 1.0, sim_range = 0.1, sim_radius = 0.1;
  double sim_halo = 0.0;
  std::size_t sim_steps = 0;
  sim->add_option("--process", sim_process, "poisson | boolean | strauss")
      ->check(CLI::IsMember({"poisson", "boolean", "strauss"}));
  sim->add_option("--window", sim_window, "axis bounds lo,hi per axis")->expected(-1)->delimiter(',');
  sim->add_option("--norm", sim_norm, "euclidean | sup");
  sim->add_option("--intensity", sim_intensity, "Poisson intensity / germ intensity");
  sim->add_option("--lambda", sim_lambda, "pairwise-interaction intensity parameter");
  sim->add_option("--gamma", sim_gamma, "pairwise-interaction parameter in [0,1]");
  sim->add_option("--range", sim_range, "pairwise-interaction range");
  sim->add_option("--radius", sim_radius, "deterministic grain radius");
  sim->add_option("--halo", sim_halo, "pad the window by this much before sampling");
  sim->add_option("--mcmc-steps", sim_steps, "birth-death chain length (0 = default burn-in)");

  // ---- thin -----------------------------------------------------------
  auto* th = app.add_subcommand("thin", "thin a pattern CSV with a retention field");
  std::string th_pattern, th_field = "constant";
  std::vector<double> th_window{0, 1, 0, 1}, th_inner;
  std::string th_norm = "euclidean";
  double th_p = 0.5, th_q = 1.0, th_r = 0.1, th_l1 = 1.0, th_radius = 0.1;
  th->add_option("--pattern", th_pattern, "input pattern CSV")->required();
  th->add_option("--field", th_field, "constant | boolean | matern")
      ->check(CLI::IsMember({"constant", "boolean", "matern"}));
  th->add_option("--window", th_window, "window the pattern lives on")->expected(-1)->delimiter(',');
  th->add_option("--inner", th_inner, "inner window for the competition field")->expected(-1)->delimiter(',');
  th->add_option("--norm", th_norm, "euclidean | sup");
  th->add_option("--p", th_p, "constant retention probability");
  th->add_option("--q", th_q, "retention probability of surviving points");
  th->add_option("--r", th_r, "competition radius");
  th->add_option("--l1", th_l1, "germ intensity of the covering model");
  th->add_option("--radius", th_radius, "grain radius of the covering model");

  // ---- summaries ------------------------------------------------------
  auto* su = app.add_subcommand("summaries", "summary statistics of replicated Poisson patterns");
  std::string su_stat = "K";
  std::vector<double> su_window{0, 1, 0, 1};
  std::string su_norm = "euclidean";
  double su_m1 = 100.0;
  std::vector<double> su_rgrid{0.02, 0.04, 0.06, 0.08, 0.1};
  std::vector<double> su_y;
  double su_r = 0.05;
  su->add_option("--stat", su_stat, "K | G | G2")->check(CLI::IsMember({"K", "G", "G2"}));
  su->add_option("--window", su_window, "inner window bounds")->expected(-1)->delimiter(',');
  su->add_option("--norm", su_norm, "euclidean | sup");
  su->add_option("--m1", su_m1, "Poisson intensity");
  su->add_option("--rgrid", su_rgrid, "radii for K/G")->expected(-1)->delimiter(',');
  su->add_option("--y", su_y, "displacement vector for G2")->expected(-1)->delimiter(',');
  su->add_option("--r", su_r, "ball radius for G2");

  // ---- bound ----------------------------------------------------------
  auto* bo = app.add_subcommand("bound", "evaluate a closed-form bound to JSON");
  std::string bo_model = "matern-poisson";
  std::vector<double> bo_window{0, 1, 0, 1};
  std::string bo_norm = "euclidean";
  double bo_m1 = 0.5, bo_r = 0.1, bo_q = 1.0, bo_l1 = 1.0, bo_radius = 0.1, bo_rbar = -1.0;
  double bo_beta_sup = 0.0, bo_n = 100.0, bo_qn = 1.0;
  bo->add_option("--model", bo_model, "matern-poisson | boolean | boolean-contracted")
      ->check(CLI::IsMember({"matern-poisson", "boolean", "boolean-contracted"}));
  bo->add_option("--window", bo_window, "domain bounds")->expected(-1)->delimiter(',');
  bo->add_option("--norm", bo_norm, "euclidean | sup");
  bo->add_option("--m1", bo_m1, "parent intensity");
  bo->add_option("--r", bo_r, "competition radius");
  bo->add_option("--q", bo_q, "retention probability");
  bo->add_option("--l1", bo_l1, "germ intensity");
  bo->add_option("--radius", bo_radius, "grain radius");
  bo->add_option("--rbar", bo_rbar, "dependence radius (default: twice the grain radius)");
  bo->add_option("--beta-sup", bo_beta_sup, "long-range dependence sup (0 for Poisson)");
  bo->add_option("--n", bo_n, "contraction level");
  bo->add_option("--q-n", bo_qn, "retention at the contraction level");

  // ---- certify / experiment ------------------------------------------
  auto* ce = app.add_subcommand("certify", "run one configuration and certify its bound");
  std::string ce_config;
  ce->add_option("--config", ce_config, "experiment config JSON (single point)")->required();

  auto* ex = app.add_subcommand("experiment", "run a sweep experiment from a config file");
  std::string ex_config;
  ex->add_option("--config", ex_config, "experiment config JSON")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (sim->parsed()) {
      RngStream rng(seed, 0);
      Window window = parse_window(sim_window);
      const Norm norm = parse_norm(sim_norm);
      if (sim_halo > 0.0) window = window.halo(sim_halo);
      std::ostringstream os;
      if (sim_process == "poisson") {
        write_pattern_csv(os, sample_poisson(window, sim_intensity, rng));
      } else if (sim_process == "boolean") {
        const BooleanModel model{window.dim(), sim_intensity,
                                 RadiusLaw::deterministic(sim_radius), norm};
        const Window region = sim_halo > 0.0 ? window : window.halo(sim_radius);
        const BooleanGrains grains = sample_boolean_model(model, region, rng);
        for (int k = 0; k < grains.centers.dim(); ++k) os << "x" << (k + 1) << ",";
        os << "radius\n";
        os.precision(17);
        for (std::size_t i = 0; i < grains.centers.size(); ++i) {
          const std::span<const double> c = grains.centers.point(i);
          for (int k = 0; k < grains.centers.dim(); ++k) os << c[k] << ",";
          os << grains.radii[i] << "\n";
        }
      } else {
        StraussParams params{sim_lambda, sim_gamma, sim_range, window, norm};
        const std::size_t steps = sim_steps ? sim_steps : strauss_default_steps(params);
        StraussDiagnostics diag;
        const PointPattern pat = sample_strauss(params, steps, rng, &diag);
        if (diag.acceptance_warning)
          std::cerr << "warning: acceptance rate " << diag.acceptance_rate
                    << " outside [0.05, 0.95]\n";
        write_pattern_csv(os, pat);
      }
      write_or_print(out, os.str());
    } else if (th->parsed()) {
      RngStream rng(seed, 0);
      const PointPattern raw = read_pattern_csv_file(th_pattern);
      PointPattern pattern = raw;
      pattern.sort_canonical();
      Window window = parse_window(th_window);
      const Norm norm = parse_norm(th_norm);
      RetentionField field = ConstantField{th_p};
      if (th_field == "matern") {
        const Window inner = th_inner.empty() ? window : parse_window(th_inner);
        if (!th_inner.empty()) window = inner.halo(th_r);
        field = MaternField{th_r, th_q, inner, norm};
      } else if (th_field == "boolean") {
        const BooleanModel model{pattern.dim(), th_l1, RadiusLaw::deterministic(th_radius), norm};
        field = BooleanCoverField{model, th_q, window.halo(th_radius)};
      }
      const std::vector<double> probs = realize_retention(field, pattern, window, rng);
      const ThinningOutcome outcome = thin(pattern, probs, rng);
      std::ostringstream os;
      write_thinning_csv(os, outcome);
      write_or_print(out, os.str());
    } else if (su->parsed()) {
      RngStream rng(seed, 0);
      const Window inner = parse_window(su_window);
      const Norm norm = parse_norm(su_norm);
      double pad = su_r;
      for (double r : su_rgrid) pad = std::max(pad, r);
      if (!su_y.empty()) pad = std::max(pad, norm_value(norm, su_y) * 1.05 + su_r);
      const Window pattern_window = inner.halo(pad + 1e-9);
      std::vector<PointPattern> patterns;
      patterns.reserve(replicates);
      for (std::size_t i = 0; i < replicates; ++i)
        patterns.push_back(sample_poisson(pattern_window, su_m1, rng));
      std::ostringstream os;
      if (su_stat == "K") {
        write_summary_csv(os, estimate_K(patterns, su_m1, su_rgrid, norm, inner, pattern_window));
      } else if (su_stat == "G") {
        write_summary_csv(os, estimate_G(patterns, su_rgrid, norm, inner, pattern_window));
      } else {
        if (su_y.empty()) throw CLI::ValidationError("--y is required for G2");
        const G2Estimate g2 = estimate_G2(patterns, su_y, su_r, norm, inner, pattern_window);
        os << "r,value,stderr,n\n";
        os.precision(17);
        os << su_r << "," << g2.value << "," << g2.std_error << "," << g2.qualifying_pairs
           << "\n";
        if (!g2.defined) os << "# undefined: no qualifying pairs\n";
      }
      write_or_print(out, os.str());
    } else if (bo->parsed()) {
      const Window window = parse_window(bo_window);
      const Norm norm = parse_norm(bo_norm);
      BoundReport report;
      if (bo_model == "matern-poisson") {
        report = bound_matern_poisson(window.volume(), bo_m1, bo_r, window.dim(), norm);
      } else if (bo_model == "boolean") {
        const BooleanModel model{window.dim(), bo_l1, RadiusLaw::deterministic(bo_radius), norm};
        const double rbar = bo_rbar > 0.0 ? bo_rbar : 2.0 * bo_radius;
        report = bound_boolean(window, bo_m1, model, bo_q, rbar, bo_beta_sup);
      } else {
        const double r_n = contracted_boolean_radius(bo_l1, bo_n, bo_qn, window.dim(), norm);
        const BooleanModel model{window.dim(), bo_l1, RadiusLaw::deterministic(r_n), norm};
        const double rbar = bo_rbar > 0.0 ? bo_rbar : 2.0 * r_n;
        report = bound_boolean_contracted(window, bo_n, bo_qn, model, rbar, bo_m1, bo_beta_sup);
      }
      write_or_print(out, report.to_json_string());
    } else if (ce->parsed() || ex->parsed()) {
      ExperimentConfig config = load_config(ce->parsed() ? ce_config : ex_config);
      if (app.count("--seed")) config.seed = seed;
      if (app.count("--replicates")) config.replicates = replicates;
      const std::vector<std::string> errors = validate_config(config);
      if (!errors.empty()) {
        std::cerr << "invalid config:\n";
        for (const std::string& e : errors) std::cerr << "  " << e << "\n";
        return 2;
      }
      if (ce->parsed()) {
        bool has_sweep = false;
        for (const auto& [name, spec] : config.params) has_sweep |= spec.is_sweep();
        if (has_sweep) {
          std::cerr << "certify expects a single-point config; use `experiment` for sweeps\n";
          return 2;
        }
      }
      const std::string dir = out.empty() ? "ppthin_out" : out;
      const ExperimentResult result = run_experiment(config, dir);
      for (const SweepPointResult& pr : result.points) {
        std::cout << "point " << pr.index << ": " << (pr.pass ? "PASS" : "FAIL");
        if (!pr.error.empty()) std::cout << " (" << pr.error << ")";
        std::cout << "\n";
      }
      std::cout << (result.all_pass ? "ALL PASS" : "FAILURES PRESENT") << ", manifest at "
                << result.manifest_path << "\n";
      return result.all_pass ? 0 : 1;
    }
  } catch (const std::exception& err) {
    std::cerr << "error: " << err.what() << "\n";
    return 2;
  }
  return 0;
}
