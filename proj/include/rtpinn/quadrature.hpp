#pragma once

#include <functional>
#include <span>
#include <string>
#include <vector>

#include "rtpinn/geometry.hpp"

namespace rtpinn {

struct GaussRule {
  std::vector<double> nodes;  // increasing, in [-1, 1] unless mapped
  std::vector<double> weights;

  std::size_t order() const { return nodes.size(); }
  double integrate(const std::function<double(double)>& f) const;
};

// Gauss-Legendre rule on [-1,1] with 1 <= n <= 128 nodes.
GaussRule gauss_legendre(int n);
// The same rule mapped affinely onto [a,b].
GaussRule gauss_legendre(int n, double a, double b);

// Legendre polynomial P_l(x) by the three-term recurrence.
double legendre_p(int l, double x);

// Directions (and optional frequency nodes) with weights for integrals over
// S (x Lambda). Without frequency nodes, nu_i is taken equal to the evaluation
// frequency, i.e. scattering does not change the frequency.
struct SphereRule {
  int dim = 3;
  std::vector<Direction> directions;
  std::vector<double> weights;
  std::vector<double> frequencies;  // empty, or one entry per node

  std::size_t size() const { return directions.size(); }
  bool has_frequency_nodes() const { return !frequencies.empty(); }
  double frequency(std::size_t i, double nu) const { return frequencies.empty() ? nu : frequencies[i]; }
  double weight_sum() const;
};

// d = 1: Gauss rule in mu on [-1,1] (n_phi ignored).
// d = 3: Gauss in mu = cos(theta) times n_phi equal-weight azimuths
// phi_j = 2 pi (j + 1/2) / n_phi.
SphereRule sphere_rule(int d, int n_mu, int n_phi);

// Tensor product of an angular rule with a Gauss rule on the frequency interval.
SphereRule with_frequency_nodes(const SphereRule& angular, Interval band, int n_nu);

// Scattering kernel Phi(omega, omega', nu, nu').
class ScatteringKernel {
 public:
  using Function = std::function<double(const Direction&, const Direction&, double, double)>;

  ScatteringKernel() : ScatteringKernel(isotropic()) {}

  static ScatteringKernel isotropic(double value = 1.0);
  // Slab kernel sum_l c_l P_l(mu) P_l(mu').
  static ScatteringKernel legendre(std::vector<double> coefficients);
  static ScatteringKernel custom(Function phi, std::string name);

  double operator()(const Direction& w, const Direction& wp, double nu, double nup) const;

  bool is_constant() const { return kind_ == Kind::constant; }
  double constant_value() const { return value_; }
  const std::vector<double>& coefficients() const { return coefficients_; }
  const std::string& name() const { return name_; }

 private:
  enum class Kind { constant, legendre, custom };
  explicit ScatteringKernel(Kind kind) : kind_(kind) {}

  Kind kind_ = Kind::constant;
  double value_ = 1.0;
  std::vector<double> coefficients_;
  Function phi_;
  std::string name_;
};

// sum_i w_i Phi(omega, omega_i, nu, nu_i) u_i
double scattering_sum(const ScatteringKernel& phi, std::span<const double> u_vals, const SphereRule& rule,
                      const Direction& omega, double nu);

using AngularField = std::function<double(const Direction&)>;

// G = sum_i w_i u(omega_i)
double incident_radiation(const AngularField& u, const SphereRule& rule);
// F = sum_i w_i u(omega_i) omega_i
Vec3 heat_flux(const AngularField& u, const SphereRule& rule);

// (1/s_d) sum_i w_i Phi(omega, omega_i, nu, nu_i), which should equal 1 for
// a photon-conserving kernel.
double kernel_normalization(const ScatteringKernel& phi, const SphereRule& rule, const Direction& omega, double nu,
                            double surface_area);

}  // namespace rtpinn
