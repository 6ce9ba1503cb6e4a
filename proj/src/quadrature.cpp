#include "rtpinn/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <string>

#include "rtpinn/errors.hpp"

namespace rtpinn {

double GaussRule::integrate(const std::function<double(double)>& f) const {
  double s = 0.0;
  for (std::size_t i = 0; i < nodes.size(); ++i) s += weights[i] * f(nodes[i]);
  return s;
}

double legendre_p(int l, double x) {
  if (l == 0) return 1.0;
  double p0 = 1.0;
  double p1 = x;
  for (int k = 2; k <= l; ++k) {
    const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
    p0 = p1;
    p1 = p2;
  }
  return p1;
}

GaussRule gauss_legendre(int n) {
  if (n < 1 || n > 128) throw UnsupportedError("Gauss-Legendre order " + std::to_string(n) + " outside 1..128");
  GaussRule rule;
  rule.nodes.assign(n, 0.0);
  rule.weights.assign(n, 0.0);
  const int half = (n + 1) / 2;
  for (int i = 0; i < half; ++i) {
    // Root i counted from the right end.
    double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p0 = 1.0;
      double p1 = x;
      for (int k = 2; k <= n; ++k) {
        const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      dp = n * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) <= 1e-15 * std::max(1.0, std::abs(x))) break;
    }
    // Re-evaluate the derivative at the converged root.
    double p0 = 1.0;
    double p1 = x;
    for (int k = 2; k <= n; ++k) {
      const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
      p0 = p1;
      p1 = p2;
    }
    dp = n * (x * p1 - p0) / (x * x - 1.0);
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    rule.nodes[n - 1 - i] = x;
    rule.nodes[i] = -x;
    rule.weights[n - 1 - i] = w;
    rule.weights[i] = w;
  }
  if (n % 2 == 1) rule.nodes[n / 2] = 0.0;
  return rule;
}

GaussRule gauss_legendre(int n, double a, double b) {
  GaussRule rule = gauss_legendre(n);
  const double h = 0.5 * (b - a);
  const double m = 0.5 * (a + b);
  for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
    rule.nodes[i] = m + h * rule.nodes[i];
    rule.weights[i] *= h;
  }
  return rule;
}

double SphereRule::weight_sum() const { return std::accumulate(weights.begin(), weights.end(), 0.0); }

SphereRule sphere_rule(int d, int n_mu, int n_phi) {
  if (d != 1 && d != 3) throw UnsupportedError("sphere rule dimension must be 1 or 3");
  const GaussRule g = gauss_legendre(n_mu);
  SphereRule rule;
  rule.dim = d;
  if (d == 1) {
    for (int i = 0; i < n_mu; ++i) {
      rule.directions.push_back(Direction::slab(g.nodes[i]));
      rule.weights.push_back(g.weights[i]);
    }
    return rule;
  }
  if (n_phi < 1) throw UnsupportedError("azimuthal node count must be >= 1");
  const double dphi = 2.0 * std::numbers::pi / n_phi;
  for (int i = 0; i < n_mu; ++i) {
    for (int j = 0; j < n_phi; ++j) {
      rule.directions.push_back(Direction::angles(g.nodes[i], dphi * (j + 0.5)));
      rule.weights.push_back(g.weights[i] * dphi);
    }
  }
  return rule;
}

SphereRule with_frequency_nodes(const SphereRule& angular, Interval band, int n_nu) {
  const GaussRule g = gauss_legendre(n_nu, band.lo, band.hi);
  SphereRule rule;
  rule.dim = angular.dim;
  for (std::size_t i = 0; i < angular.size(); ++i) {
    for (int k = 0; k < n_nu; ++k) {
      rule.directions.push_back(angular.directions[i]);
      rule.weights.push_back(angular.weights[i] * g.weights[k]);
      rule.frequencies.push_back(g.nodes[k]);
    }
  }
  return rule;
}

ScatteringKernel ScatteringKernel::isotropic(double value) {
  ScatteringKernel k{Kind::constant};
  k.value_ = value;
  k.name_ = "isotropic";
  return k;
}

ScatteringKernel ScatteringKernel::legendre(std::vector<double> coefficients) {
  ScatteringKernel k{Kind::legendre};
  k.coefficients_ = std::move(coefficients);
  k.name_ = "legendre";
  return k;
}

ScatteringKernel ScatteringKernel::custom(Function phi, std::string name) {
  ScatteringKernel k{Kind::custom};
  k.phi_ = std::move(phi);
  k.name_ = std::move(name);
  return k;
}

double ScatteringKernel::operator()(const Direction& w, const Direction& wp, double nu, double nup) const {
  switch (kind_) {
    case Kind::constant:
      return value_;
    case Kind::legendre: {
      double s = 0.0;
      for (std::size_t l = 0; l < coefficients_.size(); ++l) {
        s += coefficients_[l] * legendre_p(static_cast<int>(l), w.mu) * legendre_p(static_cast<int>(l), wp.mu);
      }
      return s;
    }
    case Kind::custom:
      return phi_(w, wp, nu, nup);
  }
  return 0.0;
}

double scattering_sum(const ScatteringKernel& phi, std::span<const double> u_vals, const SphereRule& rule,
                      const Direction& omega, double nu) {
  if (u_vals.size() != rule.size()) throw ContractError("intensity values do not match the sphere rule");
  double s = 0.0;
  for (std::size_t i = 0; i < rule.size(); ++i) {
    s += rule.weights[i] * phi(omega, rule.directions[i], nu, rule.frequency(i, nu)) * u_vals[i];
  }
  return s;
}

double incident_radiation(const AngularField& u, const SphereRule& rule) {
  double g = 0.0;
  for (std::size_t i = 0; i < rule.size(); ++i) g += rule.weights[i] * u(rule.directions[i]);
  return g;
}

Vec3 heat_flux(const AngularField& u, const SphereRule& rule) {
  Vec3 f{0.0, 0.0, 0.0};
  for (std::size_t i = 0; i < rule.size(); ++i) {
    const double wu = rule.weights[i] * u(rule.directions[i]);
    for (int a = 0; a < 3; ++a) f[a] += wu * rule.directions[i].v[a];
  }
  if (rule.dim == 1) f[1] = f[2] = 0.0;
  return f;
}

double kernel_normalization(const ScatteringKernel& phi, const SphereRule& rule, const Direction& omega, double nu,
                            double surface_area) {
  double s = 0.0;
  for (std::size_t i = 0; i < rule.size(); ++i) {
    s += rule.weights[i] * phi(omega, rule.directions[i], nu, rule.frequency(i, nu));
  }
  return s / surface_area;
}

}  // namespace rtpinn
