#include "ppthin/quadrature.hpp"

#include <array>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <vector>

namespace ppthin {

namespace {

// K15 nodes/weights on [-1, 1]; G7 uses the odd-indexed nodes.
constexpr std::array<double, 15> kNodes = {
    -0.991455371120813, -0.949107912342759, -0.864864423359769, -0.741531185599394,
    -0.586087235467691, -0.405845151377397, -0.207784955007898, 0.0,
    0.207784955007898,  0.405845151377397,  0.586087235467691,  0.741531185599394,
    0.864864423359769,  0.949107912342759,  0.991455371120813};
constexpr std::array<double, 15> kWeights = {
    0.022935322010529, 0.063092092629979, 0.104790010322250, 0.140653259715525,
    0.169004726639267, 0.190350578064785, 0.204432940075298, 0.209482141084728,
    0.204432940075298, 0.190350578064785, 0.169004726639267, 0.140653259715525,
    0.104790010322250, 0.063092092629979, 0.022935322010529};
constexpr std::array<double, 7> kGaussWeights = {
    0.129484966168870, 0.279705391489277, 0.381830050505119, 0.417959183673469,
    0.381830050505119, 0.279705391489277, 0.129484966168870};

struct GkResult {
  double kronrod;
  double error;
};

GkResult gk15(const std::function<double(double)>& f, double a, double b) {
  const double mid = 0.5 * (a + b);
  const double half = 0.5 * (b - a);
  double kr = 0.0, gauss = 0.0;
  for (int i = 0; i < 15; ++i) {
    const double y = f(mid + half * kNodes[i]);
    kr += kWeights[i] * y;
    if (i % 2 == 1) gauss += kGaussWeights[i / 2] * y;
  }
  kr *= half;
  gauss *= half;
  return {kr, std::abs(kr - gauss)};
}

double adaptive(const std::function<double(double)>& f, double a, double b, double tol, int depth,
                int max_depth) {
  const GkResult r = gk15(f, a, b);
  if (depth >= max_depth || r.error <= tol * std::max(1.0, std::abs(r.kronrod)))
    return r.kronrod;
  const double mid = 0.5 * (a + b);
  return adaptive(f, a, mid, 0.5 * tol, depth + 1, max_depth) +
         adaptive(f, mid, b, 0.5 * tol, depth + 1, max_depth);
}

}  // namespace

double integrate_gk(const std::function<double(double)>& f, double a, double b, double rel_tol,
                    int max_depth) {
  if (a == b) return 0.0;
  if (a > b) return -integrate_gk(f, b, a, rel_tol, max_depth);
  return adaptive(f, a, b, rel_tol, 0, max_depth);
}

double radial_shell_integral(const std::function<double(double)>& g, int dim, double a, double b,
                             double rel_tol) {
  if (a < 0.0 || b < a) throw std::invalid_argument("radial_shell_integral: need 0 <= a <= b");
  // Surface area of the unit sphere: omega_D = D * alpha_D.
  const double omega = dim * unit_ball_volume(Norm::euclidean, dim);
  return omega * integrate_gk([&](double s) { return g(s) * std::pow(s, dim - 1); }, a, b, rel_tol);
}

namespace {

constexpr int kGlOrder = 32;

struct GlRule {
  std::array<double, kGlOrder> nodes;    // on [-1, 1]
  std::array<double, kGlOrder> weights;
};

// Legendre roots by Newton iteration; machine-precision nodes without tables.
GlRule make_gl_rule() {
  GlRule rule{};
  const int n = kGlOrder;
  for (int i = 0; i < n; ++i) {
    double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p0 = 1.0, p1 = x;
      for (int k = 2; k <= n; ++k) {
        const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      dp = n * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-15) break;
    }
    rule.nodes[i] = x;
    rule.weights[i] = 2.0 / ((1.0 - x * x) * dp * dp);
  }
  return rule;
}

const GlRule& gl_rule() {
  static const GlRule rule = make_gl_rule();
  return rule;
}

void gl_on(double lo, double hi, std::vector<double>& nodes, std::vector<double>& weights) {
  nodes.clear();
  weights.clear();
  const GlRule& rule = gl_rule();
  const double mid = 0.5 * (lo + hi), half = 0.5 * (hi - lo);
  for (int i = 0; i < kGlOrder; ++i) {
    nodes.push_back(mid + half * rule.nodes[i]);
    weights.push_back(half * rule.weights[i]);
  }
}

}  // namespace

double shell_integral(Norm norm, int dim, double a, double b,
                      const std::function<double(std::span<const double>)>& f, double rel_tol) {
  if (a < 0.0 || b < a) throw std::invalid_argument("shell_integral: need 0 <= a <= b");
  if (norm == Norm::euclidean) {
    std::vector<double> rep(dim, 0.0);
    return radial_shell_integral(
        [&](double s) {
          rep[0] = s;
          return f(rep);
        },
        dim, a, b, rel_tol);
  }
  if (dim > 3) throw std::invalid_argument("shell_integral: sup norm supported for dim <= 3");
  // Split each axis at -b, -a, 0, a, b and integrate every cell that is not
  // inside the inner box; within a cell the integrand is smooth.
  std::vector<std::array<double, 2>> segments;
  if (a > 0.0) {
    segments.push_back({-b, -a});
    segments.push_back({-a, 0.0});
    segments.push_back({0.0, a});
    segments.push_back({a, b});
  } else {
    segments.push_back({-b, 0.0});
    segments.push_back({0.0, b});
  }
  const int per_axis = static_cast<int>(segments.size());
  std::vector<int> idx(dim, 0);
  std::vector<double> nodes, weights;
  std::vector<std::vector<double>> axis_nodes(dim), axis_weights(dim);
  double total = 0.0;
  while (true) {
    // Skip cells entirely inside the inner box { |y|_inf <= a }.
    bool inside_inner = a > 0.0;
    for (int k = 0; k < dim && inside_inner; ++k) {
      const auto& seg = segments[idx[k]];
      if (seg[0] < -a - 1e-15 || seg[1] > a + 1e-15) inside_inner = false;
    }
    if (!inside_inner) {
      for (int k = 0; k < dim; ++k) {
        gl_on(segments[idx[k]][0], segments[idx[k]][1], nodes, weights);
        axis_nodes[k] = nodes;
        axis_weights[k] = weights;
      }
      std::vector<int> q(dim, 0);
      std::vector<double> y(dim);
      while (true) {
        double w = 1.0;
        for (int k = 0; k < dim; ++k) {
          y[k] = axis_nodes[k][q[k]];
          w *= axis_weights[k][q[k]];
        }
        total += w * f(y);
        int k = 0;
        while (k < dim && ++q[k] == kGlOrder) q[k++] = 0;
        if (k == dim) break;
      }
    }
    int k = 0;
    while (k < dim && ++idx[k] == per_axis) idx[k++] = 0;
    if (k == dim) break;
  }
  return total;
}

}  // namespace ppthin
